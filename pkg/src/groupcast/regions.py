"""Generators for every rate region of the diamond message set.

All regions live in the positive orthant of the four message rates
``R_phi`` (to every receiver), ``R_K`` (to all but ``K``), ``R_Km1`` (to all
but ``K-1``) and ``R_pair`` (to all but ``K-1`` and ``K``).  Variable names
follow the receiver sets, e.g. ``R_1234, R_123, R_124, R_12`` for ``K = 4``.
"""
from __future__ import annotations

import enum
from collections import Counter
from fractions import Fraction
from itertools import product
from typing import Callable, Mapping

from .geometry import HPolytope, LinearInequality, nonnegativity
from .lattice import SetFamily, W, down_closure, rset
from .network import (CombinationNetwork, DiamondMessageSet, InfoValuation,
                      NetworkError, _check_diamond_K, capacity_sum,
                      evaluate_optimal_distribution)


class RegionKind(enum.Enum):
    THEOREM1 = "theorem1"
    SPLIT_RATE_9D = "split9"
    COROLLARY1 = "corollary1"
    THEOREM2 = "theorem2"
    THREE_DEGRADED = "three-degraded"
    TWO_DEGRADED = "two-degraded"
    THEOREM3 = "theorem3"
    BINNING_SPLIT_11D = "binning11"
    EXAMPLE_K4 = "example-k4"

    @property
    def needs_network(self) -> bool:
        return self in (RegionKind.COROLLARY1, RegionKind.THEOREM2,
                        RegionKind.THREE_DEGRADED, RegionKind.TWO_DEGRADED,
                        RegionKind.EXAMPLE_K4)


def _ineq(coeffs: Mapping[str, int], rhs, label: str) -> LinearInequality:
    return LinearInequality(coeffs, rhs, label)


def _pairs(K: int):
    return list(product(range(1, K - 1), repeat=2))


# ---------------------------------------------------------------------------
# inner bound of the DM BC

def theorem1_rows(v: InfoValuation) -> list[LinearInequality]:
    K = v.K
    M = DiamondMessageSet(K)
    p, k, m, q = M.R_phi, M.R_K, M.R_Km1, M.R_pair
    rows = [
        _ineq({p: 1, m: 1}, v.a1, "(1)"),
        _ineq({p: 1, k: 1}, v.a2, "(2)"),
        _ineq({p: 1, m: 1, k: 1}, v.a3 + v.a1, "(3)"),
        _ineq({p: 1, m: 1, k: 1}, v.a4 + v.a2, "(4)"),
    ]
    all4 = {p: 1, m: 1, k: 1, q: 1}
    for j in range(1, K - 1):
        i = j - 1
        rows += [
            _ineq(all4, v.b[i], f"(5) j={j}"),
            _ineq(all4, v.c[i] + v.a1, f"(6) j={j}"),
            _ineq(all4, v.d[i] + v.a2, f"(7) j={j}"),
            _ineq(all4, v.e[i] + v.a3 + v.a1, f"(8) j={j}"),
            _ineq(all4, v.e[i] + v.a4 + v.a2, f"(9) j={j}"),
            _ineq({p: 2, m: 1, k: 1, q: 1}, v.e[i] + v.a2 + v.a1, f"(10) j={j}"),
            _ineq({p: 2, m: 2, k: 2, q: 1}, v.f[i] + v.a2 + v.a1, f"(11) j={j}"),
        ]
    for j1, j2 in _pairs(K):
        rows.append(_ineq({p: 2, m: 2, k: 2, q: 2},
                          v.f[j1 - 1] + v.e[j2 - 1] + v.a2 + v.a1,
                          f"(12) j1={j1} j2={j2}"))
    return rows


def theorem1_region(v: InfoValuation) -> HPolytope:
    """Rate-splitting and superposition inner bound at one valuation."""
    if v.g != 0:
        raise NetworkError("theorem1_region needs a valuation without binning (g = 0)")
    M = DiamondMessageSet(v.K)
    return HPolytope(M.rates, theorem1_rows(v) + nonnegativity(M.rates))


def split_rate_rows(v: InfoValuation) -> list[LinearInequality]:
    """Decoding constraints in original and split rates (no nonnegativity)."""
    K = v.K
    M = DiamondMessageSet(K)
    p, k, m, q = M.R_phi, M.R_K, M.R_Km1, M.R_pair
    s1, s2, s3, s4, s5 = M.split_rates
    rows = []
    for j in range(1, K - 1):
        i = j - 1
        rows += [
            _ineq({p: 1, m: 1, k: 1, q: 1}, v.b[i], f"(14) j={j}"),
            _ineq({m: 1, k: 1, q: 1, s1: -1, s2: -1, s5: -1}, v.f[i], f"(15) j={j}"),
            _ineq({k: 1, q: 1, s2: -1, s4: -1, s5: -1}, v.c[i], f"(16) j={j}"),
            _ineq({m: 1, q: 1, s1: -1, s3: -1, s5: -1}, v.d[i], f"(17) j={j}"),
            _ineq({q: 1, s4: -1, s3: -1, s5: -1}, v.e[i], f"(18) j={j}"),
        ]
    return rows


def _weak_receiver_rows(v: InfoValuation, M: DiamondMessageSet) -> list[LinearInequality]:
    p, k, m = M.R_phi, M.R_K, M.R_Km1
    s1, s2, s3, s4, s5 = M.split_rates
    return [
        _ineq({p: 1, k: 1, s1: 1, s3: 1, s5: 1}, v.a2, "(19)"),
        _ineq({k: 1, s2: -1, s3: 1}, v.a3, "(20)"),
        _ineq({p: 1, m: 1, s2: 1, s4: 1, s5: 1}, v.a1, "(21)"),
        _ineq({m: 1, s1: -1, s4: 1}, v.a4, "(22)"),
    ]


def split_nonnegativity(M: DiamondMessageSet) -> list[LinearInequality]:
    k, m, q = M.R_K, M.R_Km1, M.R_pair
    s1, s2, s3, s4, s5 = M.split_rates
    return [
        _ineq({q: -1, s4: 1, s3: 1, s5: 1}, 0, "split>=0 (1)"),
        _ineq({s4: -1}, 0, "split>=0 (2)"),
        _ineq({s3: -1}, 0, "split>=0 (3)"),
        _ineq({s5: -1}, 0, "split>=0 (4)"),
        _ineq({k: -1, s2: 1}, 0, "split>=0 (5)"),
        _ineq({s2: -1}, 0, "split>=0 (6)"),
        _ineq({m: -1, s1: 1}, 0, "split>=0 (7)"),
        _ineq({s1: -1}, 0, "split>=0 (8)"),
    ]


def split_rate_region(v: InfoValuation) -> HPolytope:
    """Nine-dimensional polytope in message rates and the five split rates."""
    if v.g != 0:
        raise NetworkError("split_rate_region needs a valuation without binning (g = 0)")
    M = DiamondMessageSet(v.K)
    rows = (split_rate_rows(v) + _weak_receiver_rows(v, M)
            + split_nonnegativity(M) + nonnegativity(M.rates))
    return HPolytope(M.rates + M.split_rates, rows)


# ---------------------------------------------------------------------------
# capacity region of the combination network

CapTerm = Counter  # link bitmask -> multiplicity


def _fam_counter(*families: SetFamily) -> Counter:
    out: Counter = Counter()
    for F in families:
        out.update(F.members)
    return out


def theorem2_symbolic(K: int) -> list[tuple[str, dict[str, int], Counter]]:
    """Capacity-region rows with symbolic right-hand sides.

    Each entry is ``(label, lhs, rhs)`` where ``rhs`` maps a link bitmask
    ``S`` to the multiplicity of ``C_S``.
    """
    _check_diamond_K(K)
    M = DiamondMessageSet(K)
    p, k, m, q = M.R_phi, M.R_K, M.R_Km1, M.R_pair
    WK, WKm1 = W(K, K), W(K - 1, K)
    not_K, not_Km1, not_pair = M.not_K, M.not_Km1, M.not_pair
    down_Km1_notK = down_closure(SetFamily(K, (not_K,)), WKm1)
    rows = [
        ("(41)", {p: 1, m: 1}, _fam_counter(WK)),
        ("(42)", {p: 1, k: 1}, _fam_counter(WKm1)),
        ("(43)", {p: 1, m: 1, k: 1}, _fam_counter(down_Km1_notK, WK)),
    ]
    for j in range(1, K - 1):
        Wj = W(j, K)
        rows += [
            (f"(44) j={j}", {p: 1, m: 1, k: 1, q: 1}, _fam_counter(Wj)),
            (f"(45) j={j}", {p: 2, m: 1, k: 1, q: 1},
             _fam_counter(down_closure(SetFamily(K, (not_pair,)), Wj), WKm1, WK)),
            (f"(46) j={j}", {p: 2, m: 2, k: 2, q: 1},
             _fam_counter(down_closure(SetFamily(K, (not_K, not_Km1)), Wj), WKm1, WK)),
        ]
    return rows


def evaluate_terms(net: CombinationNetwork, term: Counter) -> Fraction:
    return sum((net[S] * mult for S, mult in term.items()), Fraction(0))


def theorem2_region(net: CombinationNetwork) -> HPolytope:
    """Capacity region of the combination network."""
    M = DiamondMessageSet(net.K)
    rows = [_ineq(lhs, evaluate_terms(net, rhs), label)
            for label, lhs, rhs in theorem2_symbolic(net.K)]
    return HPolytope(M.rates, rows + nonnegativity(M.rates))


def corollary1_region(net: CombinationNetwork) -> HPolytope:
    """Inner bound specialised to the network at the optimal distribution."""
    return theorem1_region(evaluate_optimal_distribution(net))


def redundant_families(net: CombinationNetwork) -> list[LinearInequality]:
    """Inner-bound rows that the capacity region makes redundant."""
    K = net.K
    _check_diamond_K(K)
    M = DiamondMessageSet(K)
    p, k, m, q = M.R_phi, M.R_K, M.R_Km1, M.R_pair
    C = lambda F: capacity_sum(net, F)
    WK, WKm1 = W(K, K), W(K - 1, K)
    fam = lambda *sets: SetFamily(K, sets)
    down = lambda gens, within: down_closure(fam(*gens), within)
    a3 = C(down([M.not_K], WKm1))
    a4 = C(down([M.not_Km1], WK))
    all4 = {p: 1, m: 1, k: 1, q: 1}
    rows = []
    for j in range(1, K - 1):
        Wj = W(j, K)
        pair = C(down([M.not_pair], Wj))
        rows += [
            _ineq(all4, C(down([M.not_K], Wj)) + C(WK), f"(62) j={j}"),
            _ineq(all4, C(down([M.not_Km1], Wj)) + C(WKm1), f"(63) j={j}"),
            _ineq(all4, pair + a3 + C(WK), f"(64) j={j}"),
            _ineq(all4, pair + a4 + C(WKm1), f"(65) j={j}"),
        ]
    for j1, j2 in _pairs(K):
        both = C(down([M.not_K, M.not_Km1], W(j1, K)))
        pair2 = C(down([M.not_pair], W(j2, K)))
        rows.append(_ineq({p: 2, m: 2, k: 2, q: 2}, both + pair2 + C(WKm1) + C(WK),
                          f"(66) j1={j1} j2={j2}"))
    return rows


def degraded_regions(net: CombinationNetwork, kind: str) -> HPolytope:
    """Capacity region for three (``kind="three"``: no message to all but
    ``K-1``) or two (``kind="two"``: also none to all but ``K``) degraded
    messages."""
    K = net.K
    _check_diamond_K(K)
    M = DiamondMessageSet(K)
    p, k, q = M.R_phi, M.R_K, M.R_pair
    C = lambda F: capacity_sum(net, F)
    WK, WKm1 = W(K, K), W(K - 1, K)
    fam = lambda *sets: SetFamily(K, sets)
    if kind == "three":
        rows = [_ineq({p: 1}, C(WK), "(three-1)"),
                _ineq({p: 1, k: 1}, C(WKm1), "(three-2)")]
        for j in range(1, K - 1):
            Wj = W(j, K)
            rows += [
                _ineq({p: 1, k: 1, q: 1}, C(Wj), f"(three-4) j={j}"),
                _ineq({p: 2, k: 1, q: 1},
                      C(down_closure(fam(M.not_pair), Wj)) + C(WKm1) + C(WK),
                      f"(three-5) j={j}"),
                _ineq({p: 2, k: 2, q: 1},
                      C(down_closure(fam(M.not_K, M.not_Km1), Wj)) + C(WKm1) + C(WK),
                      f"(three-6) j={j}"),
            ]
        variables = (p, k, q)
    elif kind == "two":
        rows = [_ineq({p: 1}, C(WK), "(three-1)"),
                _ineq({p: 1}, C(WKm1), "(three-2)")]
        for j in range(1, K - 1):
            Wj = W(j, K)
            rows += [
                _ineq({p: 1, q: 1}, C(Wj), f"(three-4) j={j}"),
                _ineq({p: 2, q: 1},
                      C(down_closure(fam(M.not_pair), Wj)) + C(WKm1) + C(WK),
                      f"(three-5) j={j}"),
            ]
        variables = (p, q)
    else:
        raise ValueError(f"kind must be 'three' or 'two', got {kind!r}")
    return HPolytope(variables, rows + nonnegativity(variables))


# ---------------------------------------------------------------------------
# binning

def theorem3_rows(v: InfoValuation) -> list[LinearInequality]:
    K = v.K
    M = DiamondMessageSet(K)
    p, k, m, q = M.R_phi, M.R_K, M.R_Km1, M.R_pair
    g = v.g
    all4 = {p: 1, m: 1, k: 1, q: 1}
    rows = [
        _ineq({p: 1, m: 1}, v.a1, "(B1)"),
        _ineq({p: 1, k: 1}, v.a2, "(B2)"),
        _ineq({p: 1, m: 1, k: 1}, v.a3 + v.a1 - g, "(B3)"),
        _ineq({p: 1, m: 1, k: 1}, v.a4 + v.a2 - g, "(B4)"),
        _ineq({p: 2, m: 1, k: 1}, v.a2 + v.a1 - g, "(B5)"),
    ]
    for j in range(1, K - 1):
        i = j - 1
        rows += [
            _ineq(all4, v.b[i], f"(B6) j={j}"),
            _ineq(all4, v.c[i] + v.a1, f"(B7) j={j}"),
            _ineq(all4, v.d[i] + v.a2, f"(B8) j={j}"),
            _ineq(all4, v.e[i] + v.a3 + v.a1 - g, f"(B9) j={j}"),
            _ineq(all4, v.e[i] + v.a4 + v.a2 - g, f"(B10) j={j}"),
            _ineq({p: 2, m: 1, k: 1, q: 1}, v.e[i] + v.a2 + v.a1 - g, f"(B11) j={j}"),
            _ineq({p: 2, m: 2, k: 2, q: 1}, v.f[i] + v.a2 + v.a1 - g, f"(B12) j={j}"),
            _ineq({p: 2, m: 1, k: 2, q: 1}, v.c[i] + v.a1 + v.a2 - g, f"(B14) j={j}"),
            _ineq({p: 2, m: 2, k: 1, q: 1}, v.d[i] + v.a1 + v.a2 - g, f"(B15) j={j}"),
        ]
    for j1, j2 in _pairs(K):
        rows += [
            _ineq({p: 2, m: 2, k: 2, q: 2},
                  v.f[j1 - 1] + v.e[j2 - 1] + v.a2 + v.a1 - g,
                  f"(B13) j1={j1} j2={j2}"),
            _ineq({p: 2, m: 2, k: 2, q: 2},
                  v.d[j1 - 1] + v.c[j2 - 1] + v.a1 + v.a2 - g,
                  f"(B16) j1={j1} j2={j2}"),
        ]
    return rows


def theorem3_region(v: InfoValuation) -> HPolytope:
    """Inner bound with binning; may be empty when ``g`` is large."""
    M = DiamondMessageSet(v.K)
    return HPolytope(M.rates, theorem3_rows(v) + nonnegativity(M.rates))


def binning_split_region(v: InfoValuation) -> HPolytope:
    """Eleven-dimensional system: rates, split rates and the two binned
    codebook rates."""
    K = v.K
    M = DiamondMessageSet(K)
    p, k, m = M.R_phi, M.R_K, M.R_Km1
    s1, s2, s3, s4, s5 = M.split_rates
    tK, tKm1 = M.excess_rates
    rows = split_rate_rows(v) + [
        _ineq({s3: 1, k: 1, s2: -1, tK: -1}, 0, "(excess K)"),
        _ineq({s4: 1, m: 1, s1: -1, tKm1: -1}, 0, "(excess K-1)"),
        _ineq({s3: 1, s4: 1, k: 1, s2: -1, m: 1, s1: -1, tK: -1, tKm1: -1},
              -v.g, "(covering)"),
        _ineq({p: 1, s1: 1, s2: 1, s5: 1, tK: 1}, v.a2, "(decode K-1, 1)"),
        _ineq({tK: 1}, v.a3, "(decode K-1, 2)"),
        _ineq({p: 1, s1: 1, s2: 1, s5: 1, tKm1: 1}, v.a1, "(decode K, 1)"),
        _ineq({tKm1: 1}, v.a4, "(decode K, 2)"),
    ]
    rows += split_nonnegativity(M) + nonnegativity(M.rates) + nonnegativity((tK, tKm1))
    return HPolytope(M.rates + M.split_rates + (tK, tKm1), rows)


# ---------------------------------------------------------------------------
# the K = 4 example, as printed: lhs over (R_12, R_123, R_124, R_1234) and
# rhs as link-capacity multiplicities

def _links(spec: str) -> Counter:
    out: Counter = Counter()
    for tok in spec.split():
        mult, _, name = tok.rpartition("*")
        out[rset(*(int(ch) for ch in name))] += int(mult) if mult else 1
    return out


EXAMPLE_K4_ROWS: list[tuple[dict[str, int], Counter]] = [
    ({"R_1234": 1, "R_124": 1},
     _links("4 14 24 34 124 134 234 1234")),
    ({"R_1234": 1, "R_123": 1},
     _links("3 13 23 34 123 134 234 1234")),
    ({"R_1234": 1, "R_124": 1, "R_123": 1},
     _links("3 4 13 14 23 24 34 123 124 134 234 1234")),
    ({"R_1234": 1, "R_124": 1, "R_123": 1, "R_12": 1},
     _links("1 12 13 14 123 124 134 1234")),
    ({"R_1234": 1, "R_124": 1, "R_123": 1, "R_12": 1},
     _links("2 12 23 24 123 124 234 1234")),
    ({"R_1234": 2, "R_124": 1, "R_123": 1, "R_12": 1},
     _links("1 3 4 12 13 14 23 24 2*34 123 124 2*134 2*234 2*1234")),
    ({"R_1234": 2, "R_124": 1, "R_123": 1, "R_12": 1},
     _links("2 3 4 12 13 14 23 24 2*34 123 124 2*134 2*234 2*1234")),
    ({"R_1234": 2, "R_124": 2, "R_123": 2, "R_12": 1},
     _links("1 3 4 12 2*13 2*14 23 24 2*34 2*123 2*124 2*134 2*234 2*1234")),
    ({"R_1234": 2, "R_124": 2, "R_123": 2, "R_12": 1},
     _links("2 3 4 12 13 14 2*23 2*24 2*34 2*123 2*124 2*134 2*234 2*1234")),
]


def example_k4_region(net: CombinationNetwork) -> HPolytope:
    """The printed nine-row K = 4 polytope evaluated at ``net``."""
    if net.K != 4:
        raise NetworkError("the K = 4 example needs a four-receiver network")
    rates = DiamondMessageSet(4).rates
    rows = [_ineq(lhs, evaluate_terms(net, rhs), f"(ex{n})")
            for n, (lhs, rhs) in enumerate(EXAMPLE_K4_ROWS, start=1)]
    return HPolytope(rates, rows + nonnegativity(rates))


def build_region(kind: RegionKind | str, *, net: CombinationNetwork | None = None,
                 valuation: InfoValuation | None = None) -> HPolytope:
    """Dispatch on region kind; used by job descriptions and the CLI."""
    kind = RegionKind(kind)
    if kind.needs_network and net is None:
        raise NetworkError(f"region {kind.value} needs a network")
    if valuation is None and not kind.needs_network:
        if net is None:
            raise NetworkError(f"region {kind.value} needs a network or a valuation")
        valuation = evaluate_optimal_distribution(net)
    table: dict[RegionKind, Callable[[], HPolytope]] = {
        RegionKind.THEOREM1: lambda: theorem1_region(valuation),
        RegionKind.SPLIT_RATE_9D: lambda: split_rate_region(valuation),
        RegionKind.COROLLARY1: lambda: corollary1_region(net),
        RegionKind.THEOREM2: lambda: theorem2_region(net),
        RegionKind.THREE_DEGRADED: lambda: degraded_regions(net, "three"),
        RegionKind.TWO_DEGRADED: lambda: degraded_regions(net, "two"),
        RegionKind.THEOREM3: lambda: theorem3_region(valuation),
        RegionKind.BINNING_SPLIT_11D: lambda: binning_split_region(valuation),
        RegionKind.EXAMPLE_K4: lambda: example_k4_region(net),
    }
    return table[kind]()


# ---------------------------------------------------------------------------
# printed intermediate systems of the five-step elimination
#
# Row notation: "lhs | rhs".  lhs tokens are [coef]var with var in
# p (R_phi), m (R_Km1), k (R_K), q (R_pair), s1..s5 (split rates); rhs tokens
# are atoms, with b..f taken at j, or at j1 / j2 when suffixed "@1" / "@2".
# Rows mentioning j are expanded per j, rows mentioning j1/j2 per pair.

_FME_PRINTED: dict[int, list[str]] = {
    2: [
        "p m k q | d a2", "p m k q | c a1", "p m k q | b",
        "q -s5 | f", "q -s5 -s4 | c", "q -s5 -s3 | d",
        "s4 | a4", "s3 | a3",
        "p m s5 s4 | a1", "p k s5 s3 | a2",
        "p m k q s4 | f a1", "p m k q s3 | f a2",
        "p m k s5 s4 s3 | a3 a1", "p m k s5 s4 s3 | a4 a2",
        "q -s5 -s4 -s3 | e",
        "2p 2m 2k q s5 s4 s3 | f a2 a1",
        "-q s4 s3 s5 | ", "-s4 | ", "-s3 | ", "-s5 | ",
    ],
    3: [
        "p m k q | d a2", "p m k q | c a1", "p m k q | b",
        "p m k q | e a3 a1", "p m k q | e a4 a2",
        "2p 2m 2k 2q | f@1 e@2 a2 a1",
        "q -s5 | f", "q -s5 | d a3",
        "q -s5 -s4 | c", "q -s5 -s4 | e a3",
        "p k q -s4 | e a2",
        "p m k 2q -s5 -s4 | f@1 e@2 a2",
        "s4 | d",          # printed with c; see ledger
        "s4 | a4",
        "p k s5 | a2",
        "p m k q s4 | f a1", "p m k q s4 | d a3 a1",
        "p m s5 s4 | a1",
        "p m k s5 s4 | a3 a1", "p m k s5 s4 | a4 a2",
        "2p 2m 2k q s5 s4 | f a2 a1",
        "-q s4 s5 | ", "-s4 | ", "-s5 | ",
    ],
    4: [
        "p m k q | d a2", "p m k q | c a1", "p m k q | b",
        "p m k q | e a3 a1", "p m k q | e a4 a2",
        "2p 2m 2k 2q | f@1 e@2 a2 a1",
        "p m s5 | a1",
        "p k s5 | a2",     # printed with R_Km1; see ledger
        "p m k s5 | a3 a1", "p m k s5 | a4 a2",
        "2p m k q s5 | e a2 a1", "2p 2m 2k q s5 | f a2 a1",
        "q -s5 | f", "q -s5 | c@1 d@2",
        "q -s5 | c a4", "q -s5 | d a3", "q -s5 | e a3 a4",
        "-q s5 | ", "-s5 | ",
    ],
}

# transcription as printed, kept so the corrections above stay auditable
FME_PRINTED_AS_TYPESET = {(3, 13): "s4 | c", (4, 8): "p m s5 | a2"}

_FME_STAGE_VARS = {2: ("s3", "s4", "s5"), 3: ("s4", "s5"), 4: ("s5",)}


def _parse_printed_row(text: str, v: InfoValuation, M: DiamondMessageSet,
                       j: int, j1: int, j2: int, label: str) -> LinearInequality:
    names = {"p": M.R_phi, "m": M.R_Km1, "k": M.R_K, "q": M.R_pair}
    for n, s in enumerate(M.split_rates, start=1):
        names[f"s{n}"] = s
    lhs_text, rhs_text = (part.split() for part in text.split("|"))
    coeffs: dict[str, int] = {}
    for tok in lhs_text:
        sign = -1 if tok.startswith("-") else 1
        tok = tok.lstrip("-")
        digits = ""
        while tok and tok[0].isdigit() and tok not in names:
            digits, tok = digits + tok[0], tok[1:]
        coeffs[names[tok]] = coeffs.get(names[tok], 0) + sign * int(digits or 1)
    rhs = Fraction(0)
    for tok in rhs_text:
        atom, _, which = tok.partition("@")
        if atom in ("a1", "a2", "a3", "a4", "g"):
            rhs += getattr(v, atom)
        else:
            idx = {"": j, "1": j1, "2": j2}[which]
            rhs += getattr(v, atom)[idx - 1]
    return LinearInequality(coeffs, rhs, label)


def printed_fme_stage(v: InfoValuation, step: int,
                      rows: Mapping[int, str] | None = None) -> HPolytope:
    """The printed system after elimination ``step`` (2, 3 or 4), expanded
    over j and (j1, j2), with rate nonnegativity added.

    ``rows`` optionally overrides individual printed rows by 1-based number.
    """
    if step not in _FME_PRINTED:
        raise ValueError("printed systems exist after steps 2, 3 and 4 only")
    M = DiamondMessageSet(v.K)
    names = {"s1": M.split_rates[0], "s2": M.split_rates[1], "s3": M.split_rates[2],
             "s4": M.split_rates[3], "s5": M.split_rates[4]}
    out = []
    for n, text in enumerate(_FME_PRINTED[step], start=1):
        if rows and n in rows:
            text = rows[n]
        label = f"(FME{step}.{n})"
        if "@" in text:
            for j1, j2 in _pairs(v.K):
                out.append(_parse_printed_row(text, v, M, 0, j1, j2,
                                              f"{label} j1={j1} j2={j2}"))
        elif any(t in text.split("|")[1].split() for t in "bcdef"):
            for j in range(1, v.K - 1):
                out.append(_parse_printed_row(text, v, M, j, 0, 0, f"{label} j={j}"))
        else:
            out.append(_parse_printed_row(text, v, M, 0, 0, 0, label))
    variables = M.rates + tuple(names[s] for s in _FME_STAGE_VARS[step])
    return HPolytope(variables, out + nonnegativity(M.rates))
