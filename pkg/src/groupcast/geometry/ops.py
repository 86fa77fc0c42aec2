"""Projection, redundancy removal, containment and vertex enumeration."""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .lp import (INFEASIBLE, OPTIMAL, UNBOUNDED, _ZERO, _f, _q, poly_matrix,
                 solve_dense, solve_matrix)
from .polytope import GeometryError, HPolytope, LinearInequality

MAX_VERTEX_DIM = 6


class CapabilityError(GeometryError):
    """Requested operation is outside the supported size."""


class UnboundedError(GeometryError):
    pass


def _row_vector(row: LinearInequality, index: dict[str, int], n: int):
    c = [_ZERO] * n
    for v, a in row.coeffs:
        c[index[v]] = _q(a)
    return c


def max_row_over(row: LinearInequality, poly: HPolytope, skip: int | None = None):
    """``max row.lhs`` over ``poly`` (minus row ``skip``); raw solver dict."""
    index = {v: k for k, v in enumerate(poly.variables)}
    A, b = poly_matrix(poly, skip)
    return solve_matrix(A, b, _row_vector(row, index, len(poly.variables)))


def _implied(row: LinearInequality, A, b, index, n) -> bool:
    res = solve_dense(A, b, _row_vector(row, index, n))
    st = res["status"]
    if st == OPTIMAL:
        return res["value"] <= _q(row.bound)
    if st == INFEASIBLE:
        return True
    # dual infeasible: unbounded unless the remaining system is empty
    return solve_dense(A, b, [_ZERO] * n)["status"] == INFEASIBLE


def is_redundant(row: LinearInequality, poly: HPolytope) -> bool:
    """True iff the other rows of ``poly`` imply ``row``.

    Copies of ``row`` itself inside ``poly`` are ignored.
    """
    others = poly.with_rows(r for r in poly.rows if r != row)
    if row.is_trivial():
        return True
    index = {v: k for k, v in enumerate(poly.variables)}
    A, b = poly_matrix(others)
    if row.is_contradiction():
        return solve_dense(A, b, [_ZERO] * poly.dim)["status"] == INFEASIBLE
    return _implied(row, A, b, index, poly.dim)


EMPTY_ROW = LinearInequality({}, -1, label="empty")


def minimize(poly: HPolytope) -> HPolytope:
    """Equivalent system with every implied row removed.

    An empty polytope comes back as the single row ``0 <= -1``.
    """
    poly = poly.dedup()
    if any(r.is_contradiction() for r in poly.rows):
        return poly.with_rows([EMPTY_ROW])
    n = poly.dim
    A, b = poly_matrix(poly)
    if poly.rows and solve_dense(A, b, [_ZERO] * n)["status"] == INFEASIBLE:
        return poly.with_rows([EMPTY_ROW])
    index = {v: k for k, v in enumerate(poly.variables)}
    keep = list(range(len(poly.rows)))
    # cheap pass: a row is implied by a single row with the same direction
    # already handled by dedup; go straight to LPs
    k = 0
    while k < len(keep):
        i = keep[k]
        rest = [j for j in keep if j != i]
        Ar = [A[j] for j in rest]
        br = [b[j] for j in rest]
        if _implied(poly.rows[i], Ar, br, index, n):
            keep.pop(k)
        else:
            k += 1
    return poly.with_rows(poly.rows[i] for i in keep)


def _combine(lo: LinearInequality, up: LinearInequality, var: str,
             label: str = "") -> LinearInequality:
    a_lo = -lo.coefficient(var)   # > 0
    a_up = up.coefficient(var)    # > 0
    coeffs: dict[str, Fraction] = {}
    for v, c in lo.coeffs:
        coeffs[v] = coeffs.get(v, 0) + c * a_up
    for v, c in up.coeffs:
        coeffs[v] = coeffs.get(v, 0) + c * a_lo
    coeffs.pop(var, None)
    return LinearInequality(coeffs, lo.bound * a_up + up.bound * a_lo, label)


def fme_eliminate(poly: HPolytope, var: str, *,
                  reduce: bool = True) -> HPolytope:
    """Project ``var`` out of ``poly`` (Fourier-Motzkin), then minimise."""
    if var not in poly.variables:
        raise GeometryError(f"{var!r} is not a variable of this polytope")
    zero, lower, upper = [], [], []
    for r in poly.rows:
        c = r.coefficient(var)
        if c == 0:
            zero.append(r)
        elif c > 0:
            upper.append(r)
        else:
            lower.append(r)
    rows = list(zero)
    for lo in lower:
        for up in upper:
            label = f"{lo.label}+{up.label}" if lo.label and up.label else ""
            rows.append(_combine(lo, up, var, label))
    out = HPolytope([v for v in poly.variables if v != var], rows)
    return minimize(out) if reduce else out.dedup()


def fme_project(poly: HPolytope, order: Iterable[str], *,
                reduce: bool = True) -> list[HPolytope]:
    """Eliminate variables in ``order``; returns every intermediate system
    (the input first)."""
    stages = [poly]
    for v in order:
        stages.append(fme_eliminate(stages[-1], v, reduce=reduce))
    return stages


def find_violation(outer: HPolytope, inner: HPolytope):
    """First ``(row, point)`` with ``point`` in ``inner`` violating ``row``
    of ``outer``; ``None`` if ``inner`` is contained in ``outer``.

    For unbounded violations ``point`` is a feasible point pushed far enough
    along the certifying ray to break the row.
    """
    if set(outer.variables) != set(inner.variables):
        raise GeometryError("containment needs identical variable sets")
    inner = inner.reorder(outer.variables) if inner.variables != outer.variables else inner
    A, b = poly_matrix(inner)
    n = inner.dim
    index = {v: k for k, v in enumerate(inner.variables)}
    if inner.rows and solve_dense(A, b, [_ZERO] * n)["status"] == INFEASIBLE:
        return None
    for row in outer.rows:
        if row.is_trivial():
            continue
        res = solve_matrix(A, b, _row_vector(row, index, n))
        st = res["status"]
        if st == OPTIMAL:
            if res["value"] > _q(row.bound):
                point = {v: _f(x) for v, x in zip(inner.variables, res["x"])}
                return row, point
        elif st == UNBOUNDED:
            x = [_f(t) for t in res["x"]]
            d = [_f(t) for t in res["ray"]]
            point = dict(zip(inner.variables, x))
            slope = row.lhs(dict(zip(inner.variables, d)))
            gap = row.bound - row.lhs(point)
            t = max(Fraction(0), gap / slope) + 1
            point = {v: xv + t * dv for v, xv, dv in zip(inner.variables, x, d)}
            return row, point
        elif st == INFEASIBLE:
            return None
    return None


def contains(outer: HPolytope, inner: HPolytope) -> bool:
    """True iff every point of ``inner`` satisfies every row of ``outer``."""
    return find_violation(outer, inner) is None


def equal_sets(p: HPolytope, q: HPolytope) -> bool:
    return contains(p, q) and contains(q, p)


def _solve_square(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]):
    """Exact Gaussian elimination; ``None`` if singular."""
    n = len(rows)
    M = [list(r) + [v] for r, v in zip(rows, rhs)]
    for col in range(n):
        piv = next((i for i in range(col, n) if M[i][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        p = M[col][col]
        M[col] = [v / p for v in M[col]]
        for i in range(n):
            if i != col and M[i][col] != 0:
                f = M[i][col]
                M[i] = [a - f * c for a, c in zip(M[i], M[col])]
    return [M[i][n] for i in range(n)]


def is_bounded(poly: HPolytope) -> bool:
    A, b = poly_matrix(poly)
    n = poly.dim
    for k in range(n):
        for s in (1, -1):
            c = [_ZERO] * n
            c[k] = _q(Fraction(s))
            st = solve_matrix(A, b, c)["status"]
            if st == UNBOUNDED:
                return False
            if st == INFEASIBLE:
                return True
    return True


def enumerate_vertices(poly: HPolytope) -> list[tuple[Fraction, ...]]:
    """Exact vertex set of a bounded polytope by basis enumeration.

    Coordinates follow ``poly.variables``; the result is sorted.
    """
    n = poly.dim
    if n > MAX_VERTEX_DIM:
        raise CapabilityError(
            f"vertex enumeration limited to dimension {MAX_VERTEX_DIM}, got {n}")
    poly = poly.dedup()
    if any(r.is_contradiction() for r in poly.rows):
        return []
    if not is_bounded(poly):
        raise UnboundedError("polytope is unbounded")
    if n == 0:
        return [()] if all(r.bound >= 0 for r in poly.rows) else []
    rows = [[r.coefficient(v) for v in poly.variables] for r in poly.rows]
    bounds = [r.bound for r in poly.rows]
    found = set()
    for combo in combinations(range(len(rows)), n):
        x = _solve_square([rows[i] for i in combo], [bounds[i] for i in combo])
        if x is None:
            continue
        x = tuple(x)
        if x in found:
            continue
        if all(sum(a * xi for a, xi in zip(r, x)) <= bnd
               for r, bnd in zip(rows, bounds)):
            found.add(x)
    return sorted(found)
