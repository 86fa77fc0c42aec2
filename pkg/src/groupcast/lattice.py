"""Subset lattice on the receiver indices ``[1:K]``.

Receiver sets are plain ``int`` bitmasks, receiver ``i`` occupying bit
``i - 1``.  Families of receiver sets are :class:`SetFamily` values, which
keep their members as a sorted tuple so that two families compare equal
exactly when they hold the same sets.

The ground family ``P`` is the set of all *nonempty* subsets of ``[1:K]``;
the empty set never appears in a family.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator

MAX_K = 16


class LatticeError(ValueError):
    """Raised for receiver sets or families outside ``[1:K]``."""


# ---------------------------------------------------------------------------
# receiver sets

def full_mask(K: int) -> int:
    return (1 << K) - 1


def rset(*receivers: int) -> int:
    """Bitmask of the given 1-based receiver indices."""
    mask = 0
    for i in receivers:
        if i < 1 or i > MAX_K:
            raise LatticeError(f"receiver index {i} out of range")
        mask |= 1 << (i - 1)
    return mask


def members(mask: int) -> list[int]:
    """Sorted receiver indices contained in ``mask``."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def complement(mask: int, K: int) -> int:
    return full_mask(K) & ~mask


def is_subset(a: int, b: int) -> bool:
    return a & ~b == 0


def format_rset(mask: int, K: int | None = None) -> str:
    """Digit string of a receiver set, e.g. ``"134"``.

    For ``K >= 10`` the indices are dot separated (``"1.10.12"``) since
    plain concatenation would be ambiguous.
    """
    idx = members(mask)
    if (K is not None and K >= 10) or any(i >= 10 for i in idx):
        return ".".join(str(i) for i in idx)
    return "".join(str(i) for i in idx)


def parse_rset(text: str, K: int) -> int:
    text = text.strip()
    if not text:
        raise LatticeError("empty receiver set string")
    if "." in text or K >= 10:
        parts = text.split(".") if "." in text else [text]
        idx = [int(p) for p in parts]
    else:
        idx = [int(ch) for ch in text]
    if any(i < 1 or i > K for i in idx):
        raise LatticeError(f"receiver set {text!r} not inside [1:{K}]")
    return rset(*idx)


def _check_K(K: int) -> None:
    if not 1 <= K <= MAX_K:
        raise LatticeError(f"K={K} outside supported range 1..{MAX_K}")


def _check_receiver(i: int, K: int) -> None:
    if not 1 <= i <= K:
        raise LatticeError(f"receiver {i} outside [1:{K}]")


# ---------------------------------------------------------------------------
# families

@dataclass(frozen=True)
class SetFamily:
    """A finite family of nonempty receiver sets over ``[1:K]``."""

    K: int
    members: tuple[int, ...]

    def __post_init__(self):
        _check_K(self.K)
        top = full_mask(self.K)
        for S in self.members:
            if S == 0 or S & ~top:
                raise LatticeError(
                    f"set {S:#b} is not a nonempty subset of [1:{self.K}]")
        canon = tuple(sorted(set(self.members)))
        if canon != self.members:
            object.__setattr__(self, "members", canon)

    @classmethod
    def of(cls, K: int, sets: Iterable[int]) -> "SetFamily":
        return cls(K, tuple(sets))

    @classmethod
    def parse(cls, K: int, texts: Iterable[str]) -> "SetFamily":
        return cls(K, tuple(parse_rset(t, K) for t in texts))

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, S: object) -> bool:
        return S in self._set

    @property
    def _set(self) -> frozenset[int]:
        cached = self.__dict__.get("_cached_set")
        if cached is None:
            cached = frozenset(self.members)
            object.__setattr__(self, "_cached_set", cached)
        return cached

    def _same_K(self, other: "SetFamily") -> None:
        if other.K != self.K:
            raise LatticeError(f"families over K={self.K} and K={other.K}")

    def __or__(self, other: "SetFamily") -> "SetFamily":
        self._same_K(other)
        return SetFamily(self.K, tuple(self._set | other._set))

    def __and__(self, other: "SetFamily") -> "SetFamily":
        self._same_K(other)
        return SetFamily(self.K, tuple(self._set & other._set))

    def __sub__(self, other: "SetFamily") -> "SetFamily":
        self._same_K(other)
        return SetFamily(self.K, tuple(self._set - other._set))

    def issubset(self, other: "SetFamily") -> bool:
        self._same_K(other)
        return self._set <= other._set

    def is_upset(self, within: "SetFamily | None" = None) -> bool:
        return up_closure(self, within) == self

    def is_downset(self, within: "SetFamily | None" = None) -> bool:
        return down_closure(self, within, strict=False) == self

    def to_json(self) -> list[str]:
        return [format_rset(S, self.K) for S in self.members]

    def __repr__(self) -> str:
        return f"SetFamily(K={self.K}, {{{', '.join(self.to_json())}}})"


def power_family(K: int) -> SetFamily:
    """``P``: every nonempty subset of ``[1:K]``."""
    _check_K(K)
    return SetFamily(K, tuple(range(1, 1 << K)))


def empty_family(K: int) -> SetFamily:
    return SetFamily(K, ())


def up_closure(family: SetFamily, within: SetFamily | None = None) -> SetFamily:
    """Smallest up-set of ``within`` (default ``P``) containing ``family``.

    Relative closures follow the order-theoretic definition
    ``{S' in within : S <= S' for some S in family}``; the generators need
    not lie in ``within``.
    """
    base = power_family(family.K) if within is None else within
    family._same_K(base)
    gens = family.members
    return SetFamily(family.K, tuple(
        T for T in base.members if any(S & ~T == 0 for S in gens)))


def down_closure(family: SetFamily, within: SetFamily | None = None, *,
                 strict: bool = True) -> SetFamily:
    """Smallest down-set of ``within`` (default ``P``) containing ``family``.

    With ``strict`` (the default) every generator must belong to ``within``.
    ``strict=False`` allows generators outside ``within``, which is what the
    relative closures such as ``down_{W_i}{complement(S)}`` need when ``i``
    lies in ``S``.
    """
    base = power_family(family.K) if within is None else within
    family._same_K(base)
    if strict and not family.issubset(base):
        raise LatticeError(f"{family!r} is not contained in {base!r}")
    gens = family.members
    return SetFamily(family.K, tuple(
        T for T in base.members if any(T & ~S == 0 for S in gens)))


def receiver_family(i: int, base: SetFamily) -> SetFamily:
    """``W_i^base``: the members of ``base`` that contain receiver ``i``."""
    _check_receiver(i, base.K)
    bit = 1 << (i - 1)
    return SetFamily(base.K, tuple(S for S in base.members if S & bit))


def W(i: int, K: int) -> SetFamily:
    """Shorthand for ``receiver_family(i, P)``."""
    return receiver_family(i, power_family(K))


def singletons(mask: int, K: int) -> SetFamily:
    return SetFamily(K, tuple(1 << (i - 1) for i in members(mask)))


def complements_of(mask: int, K: int) -> SetFamily:
    """``{complement(i_1), ..., complement(i_N)}`` for ``mask = i_1...i_N``."""
    return SetFamily(K, tuple(complement(1 << (i - 1), K)
                              for i in members(mask)))


def _nonempty_subsets(K: int, proper: bool) -> Iterator[int]:
    top = full_mask(K)
    for S in range(1, top + 1):
        if proper and S == top:
            continue
        yield S


def lattice_identity_failures(K: int) -> list[tuple[str, int, int]]:
    """All ``(identity, S, i)`` triples where an order identity fails.

    Checks, for every nonempty ``S = i_1...i_N``:

    * ``union_{k in S} W_k = up{i_1, ..., i_N}``
    * ``intersection_{k in S} W_k = up{S}``

    and for every nonempty proper ``S`` and every receiver ``i`` that the
    two pairs ``down_{W_i}{comp(i_1), ..., comp(i_N)}``, ``up_{W_i}{S}`` and
    ``down_{W_i}{comp(S)}``, ``up_{W_i}{i_1, ..., i_N}`` each partition
    ``W_i``.
    """
    _check_K(K)
    P = power_family(K)
    Ws = {k: receiver_family(k, P) for k in range(1, K + 1)}
    bad: list[tuple[str, int, int]] = []
    for S in _nonempty_subsets(K, proper=False):
        idx = members(S)
        union = empty_family(K)
        inter = P
        for k in idx:
            union = union | Ws[k]
            inter = inter & Ws[k]
        if union != up_closure(singletons(S, K), P):
            bad.append(("union", S, 0))
        if inter != up_closure(SetFamily(K, (S,)), P):
            bad.append(("intersection", S, 0))
    for S in _nonempty_subsets(K, proper=True):
        comp_each = complements_of(S, K)
        comp_S = SetFamily(K, (complement(S, K),))
        for i in range(1, K + 1):
            Wi = Ws[i]
            d1 = down_closure(comp_each, Wi, strict=False)
            u1 = up_closure(SetFamily(K, (S,)), Wi)
            if (d1 | u1) != Wi:
                bad.append(("partition-cover", S, i))
            if len(d1 & u1):
                bad.append(("partition-disjoint", S, i))
            d2 = down_closure(comp_S, Wi, strict=False)
            u2 = up_closure(singletons(S, K), Wi)
            if (d2 | u2) != Wi:
                bad.append(("dual-partition-cover", S, i))
            if len(d2 & u2):
                bad.append(("dual-partition-disjoint", S, i))
    return bad


def check_lattice_identities(K: int) -> bool:
    """True iff every order identity holds exhaustively for this ``K``."""
    if not 2 <= K <= 12:
        raise LatticeError("identity check supports 2 <= K <= 12")
    return not lattice_identity_failures(K)


def subsets_of_size(K: int, n: int) -> Iterator[int]:
    for combo in combinations(range(1, K + 1), n):
        yield rset(*combo)
