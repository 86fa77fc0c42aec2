"""Generalized cut-set bounds and the outer-bound polytope.

A bound is a nonnegative combination of set expressions ``Phi_i`` over the
receiver families ``W_1 .. W_K``.  Evaluated on message families it gives a
rate sum; evaluated on link families it gives a capacity sum.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .geometry import HPolytope, LinearInequality, as_fraction, fraction_str, nonnegativity
from .lattice import SetFamily, W, full_mask, receiver_family
from .network import CombinationNetwork, DiamondMessageSet, _check_diamond_K, capacity_sum


class CutsetError(ValueError):
    pass


@dataclass(frozen=True)
class SetExpr:
    """Expression tree: a leaf ``W_i`` or a union/intersection of children."""

    op: str                     # "leaf", "union" or "inter"
    leaf: int = 0
    args: tuple["SetExpr", ...] = ()

    def __post_init__(self):
        if self.op == "leaf":
            if self.leaf < 1:
                raise CutsetError(f"leaf index must be >= 1, got {self.leaf}")
        elif self.op in ("union", "inter"):
            if not self.args:
                raise CutsetError(f"{self.op} needs at least one argument")
        else:
            raise CutsetError(f"unknown operator {self.op!r}")

    def __or__(self, other: "SetExpr") -> "SetExpr":
        return union(self, other)

    def __and__(self, other: "SetExpr") -> "SetExpr":
        return inter(self, other)

    def max_leaf(self) -> int:
        if self.op == "leaf":
            return self.leaf
        return max(a.max_leaf() for a in self.args)

    def to_json(self) -> dict:
        if self.op == "leaf":
            return {"leaf": self.leaf}
        return {"op": self.op, "args": [a.to_json() for a in self.args]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "SetExpr":
        try:
            if "leaf" in obj:
                return cls("leaf", int(obj["leaf"]))
            op = {"union": "union", "inter": "inter",
                  "intersection": "inter"}[obj["op"]]
            return cls(op, args=tuple(cls.from_json(a) for a in obj["args"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise CutsetError(f"malformed set expression: {exc}") from exc

    def __str__(self):
        if self.op == "leaf":
            return f"W{self.leaf}"
        sym = " | " if self.op == "union" else " & "
        return "(" + sym.join(str(a) for a in self.args) + ")"


def leaf(i: int) -> SetExpr:
    return SetExpr("leaf", i)


def union(*args: SetExpr) -> SetExpr:
    return SetExpr("union", args=tuple(args))


def inter(*args: SetExpr) -> SetExpr:
    return SetExpr("inter", args=tuple(args))


def eval_set_expr(expr: SetExpr, families: Sequence[SetFamily]) -> SetFamily:
    """Evaluate with ``families[i-1]`` standing for leaf ``W_i``."""
    if expr.op == "leaf":
        if expr.leaf > len(families):
            raise CutsetError(
                f"leaf W{expr.leaf} out of range for {len(families)} families")
        return families[expr.leaf - 1]
    vals = [eval_set_expr(a, families) for a in expr.args]
    out = vals[0]
    for v in vals[1:]:
        out = out | v if expr.op == "union" else out & v
    return out


@dataclass(frozen=True)
class GcsBound:
    """``sum_i alpha_i R_{Phi_i(W^E)} <= sum_i alpha_i C_{Phi_i(W^P)}``."""

    terms: tuple[tuple[Fraction, SetExpr], ...]
    label: str = ""

    def __post_init__(self):
        if not self.terms:
            raise CutsetError("a cut-set bound needs at least one term")
        terms = tuple((as_fraction(a), e) for a, e in self.terms)
        if any(a < 0 for a, _ in terms):
            raise CutsetError("cut-set weights must be nonnegative")
        object.__setattr__(self, "terms", terms)

    def to_json(self) -> dict:
        out = {"terms": [{"alpha": fraction_str(a), "expr": e.to_json()}
                         for a, e in self.terms]}
        if self.label:
            out["label"] = self.label
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "GcsBound":
        try:
            terms = tuple((Fraction(str(t["alpha"])), SetExpr.from_json(t["expr"]))
                          for t in obj["terms"])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise CutsetError(f"malformed cut-set bound: {exc}") from exc
        return cls(terms, obj.get("label", ""))


def message_families(msg: DiamondMessageSet) -> list[SetFamily]:
    return [receiver_family(i, msg.family) for i in range(1, msg.K + 1)]


def link_families(K: int) -> list[SetFamily]:
    return [W(i, K) for i in range(1, K + 1)]


def gcs_rate_lhs(bound: GcsBound, msg: DiamondMessageSet) -> dict[str, Fraction]:
    """Left side as a linear form in the message rates."""
    fams = message_families(msg)
    form: dict[str, Fraction] = {}
    for alpha, expr in bound.terms:
        for S in eval_set_expr(expr, fams):
            name = msg.rate(S)
            form[name] = form.get(name, Fraction(0)) + alpha
    return {v: c for v, c in form.items() if c}


def gcs_capacity_rhs(bound: GcsBound, net: CombinationNetwork) -> Fraction:
    fams = link_families(net.K)
    return sum((alpha * capacity_sum(net, eval_set_expr(expr, fams))
                for alpha, expr in bound.terms if alpha), Fraction(0))


def gcs_row(bound: GcsBound, msg: DiamondMessageSet,
            net: CombinationNetwork) -> LinearInequality:
    return LinearInequality(gcs_rate_lhs(bound, msg), gcs_capacity_rhs(bound, net),
                            bound.label)


# ---------------------------------------------------------------------------
# the bounds used for the diamond message set

def _single(expr: SetExpr, label: str) -> GcsBound:
    return GcsBound(((Fraction(1), expr),), label)


def diamond_bounds(K: int) -> list[GcsBound]:
    """Plain cut-set bounds for ``K``, ``K-1`` and each strong receiver ``j``,
    and the three generalized families."""
    _check_diamond_K(K)
    a, b = leaf(K - 1), leaf(K)
    one = Fraction(1)
    out = [_single(b, "cut K"), _single(a, "cut K-1"),
           _single(a | b, "gcs0")]
    for j in range(1, K - 1):
        c = leaf(j)
        out += [
            _single(c, f"cut j={j}"),
            GcsBound(((one, union(a, b, c)), (one, a & b)), f"gcs1 j={j}"),
            GcsBound(((one, union(a, b, c)),
                      (one, union(a & b, a & c, b & c))), f"gcs2 j={j}"),
        ]
    return out


def outer_region(net: CombinationNetwork) -> HPolytope:
    """Outer bound from cut-set and generalized cut-set bounds."""
    K = net.K
    msg = DiamondMessageSet(K)
    rows = [gcs_row(bd, msg, net) for bd in diamond_bounds(K)]
    return HPolytope(msg.rates, rows + nonnegativity(msg.rates))


# ---------------------------------------------------------------------------
# submodular functions on families of links and the extremal inequalities

@dataclass(frozen=True)
class SubmodularFn:
    K: int
    fn: Callable[[SetFamily], Fraction]
    modular: bool = False
    name: str = ""

    def __call__(self, family: SetFamily) -> Fraction:
        return as_fraction(self.fn(family))


def modular_function(net: CombinationNetwork) -> SubmodularFn:
    return SubmodularFn(net.K, lambda F: capacity_sum(net, F), True, "capacity")


def coverage_function(K: int, rng: random.Random, *, ground: int = 12,
                      max_cover: int = 4) -> SubmodularFn:
    """``f(F) = |union of g(S) over S in F|`` for a random map ``g``."""
    g = {S: frozenset(rng.sample(range(ground), rng.randint(0, max_cover)))
         for S in range(1, full_mask(K) + 1)}

    def f(F: SetFamily) -> Fraction:
        cover: set[int] = set()
        for S in F:
            cover |= g[S]
        return Fraction(len(cover))
    return SubmodularFn(K, f, False, "coverage")


def truncated_cardinality(K: int, t: int) -> SubmodularFn:
    """``f(F) = min(|F|, t)``, the rank function of a uniform matroid."""
    return SubmodularFn(K, lambda F: Fraction(min(len(F), t)), False,
                        f"min(|.|,{t})")


def random_submodular(K: int, rng: random.Random) -> SubmodularFn:
    if rng.random() < 0.5:
        return coverage_function(K, rng)
    return truncated_cardinality(K, rng.randint(0, 2 ** K))


def extremal_sides(f: SubmodularFn, which: int, j: int) -> tuple[Fraction, Fraction]:
    """Both sides ``(lhs, rhs)`` of extremal inequality ``which`` at ``j``,
    evaluated on the link families."""
    K = f.K
    _check_diamond_K(K)
    A, B = W(K - 1, K), W(K, K)
    if which == 0:
        return f(A | B), f(A) + f(B) - f(A & B)
    if not 1 <= j <= K - 2:
        raise CutsetError(f"j must lie in 1..{K - 2}, got {j}")
    C = W(j, K)
    if which == 1:
        return (f(A | B | C) + f(A & B),
                f(C) - f(C & (A | B)) + f(A) + f(B))
    if which == 2:
        return (f(A | B | C) + f((A & B) | (A & C) | (B & C)),
                f(C) - f(C & A & B) + f(A) + f(B))
    raise CutsetError(f"which must be 0, 1 or 2, got {which}")


def check_extremal_inequality(f: SubmodularFn, which: int, j: int = 1) -> bool:
    """True iff the inequality holds; for modular ``f`` it must be tight."""
    lhs, rhs = extremal_sides(f, which, j)
    if f.modular:
        return lhs == rhs
    return lhs <= rhs


def is_submodular_on(f: SubmodularFn, pairs: Sequence[tuple[SetFamily, SetFamily]]) -> bool:
    return all(f(A) + f(B) >= f(A | B) + f(A & B) for A, B in pairs)
