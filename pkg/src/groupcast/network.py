"""Combination networks, the diamond message set and atom valuations."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .geometry.polytope import as_fraction, fraction_str
from .lattice import (MAX_K, LatticeError, SetFamily, W, complement, down_closure,
                      empty_family, format_rset, full_mask, members, parse_rset,
                      power_family, rset)

log = logging.getLogger(__name__)


class NetworkError(ValueError):
    pass


def _check_diamond_K(K: int) -> None:
    if K < 3:
        raise NetworkError(f"the diamond message set needs K >= 3, got K={K}")
    if K > MAX_K:
        raise NetworkError(f"K={K} exceeds the supported maximum {MAX_K}")


@dataclass(frozen=True)
class CombinationNetwork:
    """``K`` receivers and a link capacity ``C_S >= 0`` for every nonempty
    ``S``, keyed by receiver bitmask."""

    K: int
    capacities: Mapping[int, Fraction]

    def __post_init__(self):
        if not 1 <= self.K <= MAX_K:
            raise NetworkError(f"K={self.K} outside 1..{MAX_K}")
        caps = {int(S): as_fraction(c) for S, c in self.capacities.items()}
        top = full_mask(self.K)
        expected = set(range(1, top + 1))
        if set(caps) != expected:
            raise NetworkError(
                f"need exactly {top} capacities, one per nonempty subset")
        for S, c in caps.items():
            if c < 0:
                raise NetworkError(f"C_{format_rset(S, self.K)} = {c} is negative")
        object.__setattr__(self, "capacities", caps)

    @classmethod
    def from_mapping(cls, K: int, caps: Mapping, *, warn_missing: bool = True
                     ) -> "CombinationNetwork":
        """Build from a partial mapping (bitmask or digit-string keys);
        absent links get capacity 0."""
        full = {S: Fraction(0) for S in range(1, full_mask(K) + 1)}
        for key, c in caps.items():
            S = parse_rset(key, K) if isinstance(key, str) else int(key)
            if S not in full:
                raise NetworkError(f"link {key!r} is not a nonempty subset of [1:{K}]")
            full[S] = as_fraction(c)
        missing = (1 << K) - 1 - len(caps)
        if missing and warn_missing:
            log.warning("%d link capacities missing; defaulting them to 0", missing)
        return cls(K, full)

    @classmethod
    def uniform(cls, K: int, value=1) -> "CombinationNetwork":
        return cls(K, {S: as_fraction(value) for S in range(1, full_mask(K) + 1)})

    def __getitem__(self, S: int) -> Fraction:
        return self.capacities[S]

    def C(self, *receivers: int) -> Fraction:
        return self.capacities[rset(*receivers)]

    def relabel(self, perm: Mapping[int, int]) -> "CombinationNetwork":
        """Rename receiver ``i`` to ``perm[i]`` (a permutation of ``[1:K]``)."""
        full = {i: perm.get(i, i) for i in range(1, self.K + 1)}
        if sorted(full.values()) != list(range(1, self.K + 1)):
            raise NetworkError("relabeling must be a permutation of [1:K]")
        caps = {}
        for S, c in self.capacities.items():
            caps[rset(*(full[i] for i in members(S)))] = c
        return CombinationNetwork(self.K, caps)

    def with_weak_pair(self, a: int, b: int) -> "CombinationNetwork":
        """Relabel so that receivers ``a`` and ``b`` become ``K-1`` and ``K``."""
        K = self.K
        if a == b or not (1 <= a <= K and 1 <= b <= K):
            raise NetworkError("weak pair must be two distinct receivers")
        rest = [i for i in range(1, K + 1) if i not in (a, b)]
        perm = {old: new for new, old in enumerate(rest, start=1)}
        perm[a] = K - 1
        perm[b] = K
        return self.relabel(perm)

    def to_json(self) -> dict:
        return {"K": self.K,
                "capacities": {format_rset(S, self.K): fraction_str(c)
                               for S, c in sorted(self.capacities.items())}}

    @classmethod
    def from_json(cls, obj: Mapping) -> "CombinationNetwork":
        try:
            K = int(obj["K"])
            caps = {str(k): Fraction(str(v)) for k, v in obj["capacities"].items()}
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise NetworkError(f"malformed network description: {exc}") from exc
        try:
            return cls.from_mapping(K, caps)
        except LatticeError as exc:
            raise NetworkError(str(exc)) from exc

    @classmethod
    def load(cls, path) -> "CombinationNetwork":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def capacity_sum(net: CombinationNetwork, family: SetFamily | Iterable[int]) -> Fraction:
    """``C_W``: total capacity of the links indexed by ``family``."""
    if isinstance(family, SetFamily) and family.K != net.K:
        raise NetworkError(f"family over K={family.K}, network has K={net.K}")
    total = Fraction(0)
    caps = net.capacities
    for S in family:
        try:
            total += caps[S]
        except KeyError:
            raise NetworkError(f"unknown link {S!r}") from None
    return total


def downset_capacity(net: CombinationNetwork, j: int, S: int, *,
                     antichain: bool = False) -> Fraction:
    """Capacity of a relative down-set of ``W_j``, computed two ways.

    ``antichain=False``: ``down_{W_j}{comp(S)}``, checked against
    ``C_{W_j} - C_{W_j & (W_l1 | ... | W_lN)}``.

    ``antichain=True``: ``down_{W_j}{comp(l1), ..., comp(lN)}``, checked
    against ``C_{W_j} - C_{W_j & W_l1 & ... & W_lN}``.

    ``S`` is a bitmask of ``l1...lN`` (it may be empty, i.e. ``0``).
    """
    K = net.K
    if not 1 <= j <= K:
        raise NetworkError(f"receiver {j} outside [1:{K}]")
    if S & ~full_mask(K) or S == full_mask(K):
        raise NetworkError("S must be a proper subset of [1:K]")
    Wj = W(j, K)
    ls = members(S)
    if not ls:
        direct = capacity_sum(net, Wj)
        return direct
    if antichain:
        gens = SetFamily(K, tuple(complement(1 << (l - 1), K) for l in ls))
        mix = power_family(K)
        for l in ls:
            mix = mix & W(l, K)
    else:
        gens = SetFamily(K, (complement(S, K),))
        mix = empty_family(K)
        for l in ls:
            mix = mix | W(l, K)
    direct = capacity_sum(net, down_closure(gens, Wj, strict=False))
    via_identity = capacity_sum(net, Wj) - capacity_sum(net, Wj & mix)
    if direct != via_identity:
        raise AssertionError(
            f"capacity identity mismatch for j={j}, S={format_rset(S, K)}: "
            f"{direct} != {via_identity}")
    return direct


# alias matching the operation name used in the docs
downset_capacity_identities = downset_capacity


@dataclass(frozen=True)
class DiamondMessageSet:
    """The four groupcast messages: to everybody, to all but ``K``, to all
    but ``K-1``, and to all but both."""

    K: int

    def __post_init__(self):
        _check_diamond_K(self.K)

    @property
    def phi(self) -> int:          # all receivers
        return full_mask(self.K)

    @property
    def not_K(self) -> int:
        return complement(rset(self.K), self.K)

    @property
    def not_Km1(self) -> int:
        return complement(rset(self.K - 1), self.K)

    @property
    def not_pair(self) -> int:
        return complement(rset(self.K - 1, self.K), self.K)

    @property
    def family(self) -> SetFamily:
        return SetFamily(self.K, (self.phi, self.not_K, self.not_Km1, self.not_pair))

    def rate(self, S: int) -> str:
        return "R_" + format_rset(S, self.K)

    @property
    def R_phi(self) -> str:
        return self.rate(self.phi)

    @property
    def R_K(self) -> str:
        """Rate of the message to all but receiver ``K``."""
        return self.rate(self.not_K)

    @property
    def R_Km1(self) -> str:
        """Rate of the message to all but receiver ``K-1``."""
        return self.rate(self.not_Km1)

    @property
    def R_pair(self) -> str:
        return self.rate(self.not_pair)

    @property
    def rates(self) -> tuple[str, str, str, str]:
        return (self.R_phi, self.R_K, self.R_Km1, self.R_pair)

    def split(self, src: int, dst: int) -> str:
        return f"R_{format_rset(src, self.K)}>{format_rset(dst, self.K)}"

    @property
    def split_rates(self) -> tuple[str, str, str, str, str]:
        """Split rates in elimination order: ``K-1 -> phi``, ``K -> phi``,
        ``pair -> K``, ``pair -> K-1``, ``pair -> phi``."""
        return (self.split(self.not_Km1, self.phi),
                self.split(self.not_K, self.phi),
                self.split(self.not_pair, self.not_K),
                self.split(self.not_pair, self.not_Km1),
                self.split(self.not_pair, self.phi))

    @property
    def excess_rates(self) -> tuple[str, str]:
        """Codebook rates of the binned layers (``K`` side, ``K-1`` side)."""
        return ("Rt_" + format_rset(self.not_K, self.K),
                "Rt_" + format_rset(self.not_Km1, self.K))

    def swap_map(self) -> dict[str, str]:
        """Variable renaming induced by exchanging receivers ``K-1`` and ``K``."""
        s = self.split_rates
        t = self.excess_rates
        return {self.R_K: self.R_Km1, self.R_Km1: self.R_K,
                s[0]: s[1], s[1]: s[0], s[2]: s[3], s[3]: s[2],
                t[0]: t[1], t[1]: t[0]}


@dataclass(frozen=True)
class InfoValuation:
    """Nonnegative values of the mutual-information terms.

    ``a1 = I(U0,U_{~K-1}; Y_K)``, ``a2 = I(U0,U_{~K}; Y_{K-1})``,
    ``a3 = I(U_{~K}; Y_{K-1} | U0)``, ``a4 = I(U_{~K-1}; Y_K | U0)``, and for
    each strong receiver ``j`` (index ``j-1`` in the tuples):
    ``b = I(X;Y_j)``, ``c = I(X;Y_j|U0,U_{~K-1})``, ``d = I(X;Y_j|U0,U_{~K})``,
    ``e = I(X;Y_j|U0,U_{~K-1},U_{~K})``, ``f = I(X;Y_j|U0)``.  ``g`` is the
    binning term ``I(U_{~K}; U_{~K-1} | U0)``.  ``U0`` is the cloud center.
    """

    a1: Fraction
    a2: Fraction
    a3: Fraction
    a4: Fraction
    b: tuple[Fraction, ...]
    c: tuple[Fraction, ...]
    d: tuple[Fraction, ...]
    e: tuple[Fraction, ...]
    f: tuple[Fraction, ...]
    g: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4", "g"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        lens = set()
        for name in "bcdef":
            vals = tuple(as_fraction(x) for x in getattr(self, name))
            object.__setattr__(self, name, vals)
            lens.add(len(vals))
        if len(lens) != 1 or 0 in lens:
            raise NetworkError("b, c, d, e, f must share one nonzero length K-2")
        if any(x < 0 for x in self.scalars()):
            raise NetworkError("mutual-information terms must be nonnegative")

    @property
    def K(self) -> int:
        return len(self.b) + 2

    def scalars(self) -> list[Fraction]:
        return [self.a1, self.a2, self.a3, self.a4, self.g,
                *self.b, *self.c, *self.d, *self.e, *self.f]

    def swapped(self) -> "InfoValuation":
        """Valuation seen after exchanging receivers ``K-1`` and ``K``."""
        return InfoValuation(self.a2, self.a1, self.a4, self.a3,
                             self.b, self.d, self.c, self.e, self.f, self.g)

    def with_binning(self, g) -> "InfoValuation":
        return InfoValuation(self.a1, self.a2, self.a3, self.a4,
                             self.b, self.c, self.d, self.e, self.f, g)

    @classmethod
    def zero(cls, K: int) -> "InfoValuation":
        z = (Fraction(0),) * (K - 2)
        return cls(0, 0, 0, 0, z, z, z, z, z)

    def to_json(self) -> dict:
        out = {k: fraction_str(getattr(self, k)) for k in ("a1", "a2", "a3", "a4", "g")}
        for k in "bcdef":
            out[k] = [fraction_str(x) for x in getattr(self, k)]
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "InfoValuation":
        try:
            return cls(*(Fraction(str(obj[k])) for k in ("a1", "a2", "a3", "a4")),
                       *(tuple(Fraction(str(x)) for x in obj[k]) for k in "bcdef"),
                       Fraction(str(obj.get("g", "0"))))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise NetworkError(f"malformed valuation: {exc}") from exc


def optimal_distribution_families(K: int) -> dict[str, object]:
    """Link families whose capacities give each term under the uniform
    independent input with the cloud center on the links seen by both
    ``K-1`` and ``K``.  ``b``..``f`` map to lists indexed by ``j-1``."""
    _check_diamond_K(K)
    fam = SetFamily
    not_K = complement(rset(K), K)
    not_Km1 = complement(rset(K - 1), K)
    not_pair = complement(rset(K - 1, K), K)
    out: dict[str, object] = {
        "a1": W(K, K),
        "a2": W(K - 1, K),
        "a3": down_closure(fam(K, (not_K,)), W(K - 1, K)),
        "a4": down_closure(fam(K, (not_Km1,)), W(K, K)),
    }
    for key in "bcdef":
        out[key] = []
    for j in range(1, K - 1):
        Wj = W(j, K)
        out["b"].append(Wj)
        # conditioning on U_{~K-1} reveals the links K sees, so what is
        # left of Y_j avoids K (and symmetrically for d)
        out["c"].append(down_closure(fam(K, (not_K,)), Wj))
        out["d"].append(down_closure(fam(K, (not_Km1,)), Wj))
        out["e"].append(down_closure(fam(K, (not_pair,)), Wj))
        out["f"].append(down_closure(fam(K, (not_K, not_Km1)), Wj))
    return out


def evaluate_optimal_distribution(net: CombinationNetwork) -> InfoValuation:
    """Mutual-information terms of the capacity-achieving distribution."""
    fams = optimal_distribution_families(net.K)
    cs = lambda F: capacity_sum(net, F)
    return InfoValuation(
        cs(fams["a1"]), cs(fams["a2"]), cs(fams["a3"]), cs(fams["a4"]),
        *(tuple(cs(F) for F in fams[k]) for k in "bcdef"))


def random_network(K: int, rng, *, pmax: int = 64,
                   denominators: Sequence[int] = (1, 2, 4, 8)) -> CombinationNetwork:
    """Capacities ``p/q`` with ``p`` uniform in ``[0, pmax]`` and ``q`` drawn
    from ``denominators``."""
    caps = {S: Fraction(rng.randint(0, pmax), rng.choice(denominators))
            for S in range(1, full_mask(K) + 1)}
    return CombinationNetwork(K, caps)


def random_valuation(K: int, rng, *, pmax: int = 64,
                     denominators: Sequence[int] = (1, 2, 4, 8),
                     binning: bool = False) -> InfoValuation:
    """Independent nonnegative terms with no relations imposed between them."""
    draw = lambda: Fraction(rng.randint(0, pmax), rng.choice(denominators))
    vec = lambda: tuple(draw() for _ in range(K - 2))
    return InfoValuation(draw(), draw(), draw(), draw(),
                         vec(), vec(), vec(), vec(), vec(),
                         draw() if binning else Fraction(0))
