"""Exact rational linear programming.

``max c.x  s.t.  A x <= b`` with free ``x`` is solved through its dual
``min b.y  s.t.  A^T y = c, y >= 0`` by a two-phase tableau simplex using
Bland's rule.  The dual tableau has one row per primal variable, which is
small for every system this package builds, however many inequalities it
has.  Arithmetic is exact (``gmpy2.mpq``).

Every outcome carries a certificate:

* optimal: a primal vertex ``x`` and dual multipliers ``y >= 0`` with
  ``A^T y = c`` and ``b.y = c.x``;
* unbounded: a feasible point and a ray ``d`` with ``A d <= 0``, ``c.d > 0``;
* infeasible: Farkas multipliers ``y >= 0`` with ``A^T y = 0``, ``b.y < 0``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from gmpy2 import mpq

from .polytope import GeometryError, HPolytope, as_fraction

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"
INFEASIBLE = "infeasible"

_ZERO = mpq(0)
_ONE = mpq(1)


def _q(x: Fraction) -> mpq:
    return mpq(x.numerator, x.denominator)


def _f(x: mpq) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


@dataclass
class LPResult:
    status: str
    value: Fraction | None = None
    point: dict[str, Fraction] | None = None
    ray: dict[str, Fraction] | None = None
    multipliers: tuple[Fraction, ...] | None = None
    pivots: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _pivot(T: list[list], obj: list, r: int, col: int) -> None:
    prow = T[r]
    p = prow[col]
    if p != _ONE:
        inv = _ONE / p
        prow = [v * inv if v else v for v in prow]
        T[r] = prow
    nz = [k for k, v in enumerate(prow) if v]
    for i, row in enumerate(T):
        if i != r:
            f = row[col]
            if f:
                for k in nz:
                    row[k] -= f * prow[k]
    f = obj[col]
    if f:
        for k in nz:
            obj[k] -= f * prow[k]


def _simplex(T, obj, basis, allowed: int) -> tuple[str, int, int]:
    """Run Bland's rule on columns ``< allowed``.

    Returns ``(status, pivots, unbounded_column)``.
    """
    pivots = 0
    while True:
        col = -1
        for j in range(allowed):
            if obj[j] < 0:
                col = j
                break
        if col < 0:
            return OPTIMAL, pivots, -1
        best = None
        for i, row in enumerate(T):
            a = row[col]
            if a > 0:
                ratio = row[-1] / a
                if (best is None or ratio < best[0]
                        or (ratio == best[0] and basis[i] < basis[best[1]])):
                    best = (ratio, i)
        if best is None:
            return UNBOUNDED, pivots, col
        _pivot(T, obj, best[1], col)
        basis[best[1]] = col
        pivots += 1


def solve_dense(A: Sequence[Sequence[mpq]], b: Sequence[mpq],
                c: Sequence[mpq]) -> dict:
    """Solve ``max c.x, A x <= b`` on mpq matrices.  Internal workhorse."""
    m = len(A)
    n = len(c)
    if n == 0:
        # no variables: feasible iff every b >= 0
        for j, bj in enumerate(b):
            if bj < 0:
                y = [_ZERO] * m
                y[j] = _ONE
                return {"status": INFEASIBLE, "y": y, "pivots": 0}
        return {"status": OPTIMAL, "x": [], "y": [_ZERO] * m,
                "value": _ZERO, "pivots": 0}

    sign = [(-1 if ci < 0 else 1) for ci in c]
    width = m + n + 1
    T = []
    for i in range(n):
        s = sign[i]
        row = [(A[j][i] if s > 0 else -A[j][i]) for j in range(m)]
        row.extend(_ONE if k == i else _ZERO for k in range(n))
        row.append(c[i] if s > 0 else -c[i])
        T.append(row)
    basis = [m + i for i in range(n)]

    # phase 1: minimise the sum of artificials
    obj = [_ZERO] * width
    for row in T:
        for j in range(m):
            if row[j]:
                obj[j] -= row[j]
        obj[-1] -= row[-1]
    for i in range(n):
        obj[m + i] = _ZERO
    _, piv1, _ = _simplex(T, obj, basis, m)
    if -obj[-1] > 0:
        # dual infeasible: Farkas ray for the primal objective
        d = [(_ONE - obj[m + i]) * sign[i] for i in range(n)]
        return {"status": "dual-infeasible", "ray": d, "pivots": piv1}

    # drive remaining artificials out where possible
    for r in range(n):
        if basis[r] >= m:
            for j in range(m):
                if T[r][j]:
                    _pivot(T, obj, r, j)
                    basis[r] = j
                    piv1 += 1
                    break

    # phase 2: minimise b.y, artificials barred from entering
    obj = [_ZERO] * width
    for j in range(m):
        obj[j] = b[j]
    for i, row in enumerate(T):
        cb = b[basis[i]] if basis[i] < m else _ZERO
        if cb:
            for k in range(width):
                if row[k]:
                    obj[k] -= cb * row[k]
    status, piv2, col = _simplex(T, obj, basis, m)
    pivots = piv1 + piv2
    if status == UNBOUNDED:
        y = [_ZERO] * m
        y[col] = _ONE
        for i, row in enumerate(T):
            if basis[i] < m:
                y[basis[i]] = -row[col]
        return {"status": INFEASIBLE, "y": y, "pivots": pivots}
    y = [_ZERO] * m
    for i, row in enumerate(T):
        if basis[i] < m:
            y[basis[i]] = row[-1]
    x = [-obj[m + i] * sign[i] for i in range(n)]
    value = sum((b[j] * y[j] for j in range(m) if y[j]), _ZERO)
    return {"status": OPTIMAL, "x": x, "y": y, "value": value,
            "pivots": pivots}


def solve_matrix(A, b, c) -> dict:
    """Like :func:`solve_dense` but splits dual infeasibility into
    unbounded versus infeasible."""
    res = solve_dense(A, b, c)
    if res["status"] != "dual-infeasible":
        return res
    feas = solve_dense(A, b, [_ZERO] * len(c))
    if feas["status"] == INFEASIBLE:
        feas["pivots"] += res["pivots"]
        return feas
    return {"status": UNBOUNDED, "ray": res["ray"], "x": feas["x"],
            "pivots": res["pivots"] + feas["pivots"]}


def poly_matrix(poly: HPolytope, skip: int | None = None):
    """Rows of ``poly`` as mpq matrices, optionally omitting row ``skip``."""
    index = {v: k for k, v in enumerate(poly.variables)}
    n = len(poly.variables)
    A, b = [], []
    for r_i, row in enumerate(poly.rows):
        if r_i == skip:
            continue
        a = [_ZERO] * n
        for v, c in row.coeffs:
            a[index[v]] = _q(c)
        A.append(a)
        b.append(_q(row.bound))
    return A, b


def objective_vector(poly: HPolytope, objective: Mapping[str, object]):
    index = {v: k for k, v in enumerate(poly.variables)}
    c = [_ZERO] * len(poly.variables)
    for v, coef in objective.items():
        if v not in index:
            raise GeometryError(f"objective uses undeclared variable {v!r}")
        c[index[v]] = _q(as_fraction(coef))
    return c


def solve_lp(poly: HPolytope, objective: Mapping[str, object],
             maximize: bool = True) -> LPResult:
    """Optimise a linear objective over ``poly`` exactly.

    ``value`` is always reported in the caller's sense (the maximum when
    ``maximize`` is true, else the minimum).
    """
    A, b = poly_matrix(poly)
    c = objective_vector(poly, objective)
    if not maximize:
        c = [-v for v in c]
    res = solve_matrix(A, b, c)
    return _wrap(poly, res, maximize)


def _wrap(poly: HPolytope, res: dict, maximize: bool) -> LPResult:
    names = poly.variables
    status = res["status"]
    out = LPResult(status, pivots=res["pivots"])
    if status == OPTIMAL:
        val = _f(res["value"])
        out.value = val if maximize else -val
        out.point = {v: _f(x) for v, x in zip(names, res["x"])}
        out.multipliers = tuple(_f(y) for y in res["y"])
    elif status == UNBOUNDED:
        out.point = {v: _f(x) for v, x in zip(names, res["x"])}
        out.ray = {v: _f(d) for v, d in zip(names, res["ray"])}
    else:
        out.multipliers = tuple(_f(y) for y in res["y"])
    return out


def is_feasible(poly: HPolytope) -> bool:
    A, b = poly_matrix(poly)
    return solve_dense(A, b, [_ZERO] * poly.dim)["status"] == OPTIMAL


def feasible_point(poly: HPolytope) -> dict[str, Fraction] | None:
    A, b = poly_matrix(poly)
    res = solve_dense(A, b, [_ZERO] * poly.dim)
    if res["status"] != OPTIMAL:
        return None
    return {v: _f(x) for v, x in zip(poly.variables, res["x"])}
