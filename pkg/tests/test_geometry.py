"""Exact LP, projection, redundancy removal and vertex enumeration.

Floating point scipy solves serve as the independent oracle; they are only
compared to the exact answers up to a small tolerance.
"""
import json
import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from groupcast.geometry import (INFEASIBLE, OPTIMAL, UNBOUNDED, CapabilityError,
                                GeometryError, HPolytope, LinearInequality, UnboundedError,
                                contains, enumerate_vertices, equal_sets, feasible_point,
                                find_violation, fme_eliminate, fme_project, is_bounded,
                                is_feasible, is_redundant, minimize, nonnegativity,
                                solve_lp, vrep_from_json, vrep_to_json)


def box(names, hi):
    rows = nonnegativity(names) + [LinearInequality({v: 1}, hi) for v in names]
    return HPolytope(names, rows)


def random_poly(rng, n, m, bounded=True):
    names = [f"x{i}" for i in range(n)]
    rows = []
    for _ in range(m):
        coeffs = {v: rng.randint(-4, 4) for v in names}
        rows.append(LinearInequality(coeffs, rng.randint(-3, 12)))
    if bounded:
        rows += box(names, 10).rows
    return HPolytope(names, rows)


def matrices(poly):
    A = np.array([[float(r.coefficient(v)) for v in poly.variables] for r in poly.rows])
    b = np.array([float(r.bound) for r in poly.rows])
    return A, b


def test_inequality_canonical_form():
    a = LinearInequality({"x": 2, "y": 4}, 6)
    b = LinearInequality({"x": "1/2", "y": 1}, "3/2")
    assert a == b and hash(a) == hash(b)
    assert a.coefficient("x") == 1 and a.bound == 3
    assert LinearInequality({"x": 0}, 5).is_trivial()
    assert LinearInequality({}, -2).is_contradiction()


def test_floats_are_rejected():
    with pytest.raises(TypeError):
        LinearInequality({"x": 0.5}, 1)


def test_json_roundtrip():
    P = HPolytope(["R_1234", "R_12"],
                  [LinearInequality({"R_1234": 2}, F(13, 2), "a")] + nonnegativity(["R_12"]))
    Q = HPolytope.loads(P.dumps())
    assert Q.variables == P.variables and Q.rows == P.rows
    assert json.loads(P.dumps())["rows"][0] == {"coeffs": {"R_1234": "1"}, "rhs": "13/4",
                                                "label": "a"}
    pts = [(F(1, 2), F(0)), (F(3), F(-1, 3))]
    assert vrep_from_json(vrep_to_json(pts)) == pts


def test_malformed_json():
    with pytest.raises(GeometryError):
        HPolytope.from_json({"variables": ["x"], "rows": [{"coeffs": {"y": "1"}, "rhs": "0"}]})
    with pytest.raises(GeometryError):
        HPolytope.from_json({"rows": []})


def test_lp_basic_cases():
    P = box(["x"], 1)
    r = solve_lp(P, {"x": 1})
    assert r.status == OPTIMAL and r.value == 1 and r.point == {"x": 1}
    assert solve_lp(P, {"x": 1}, maximize=False).value == 0
    U = HPolytope(["x"], nonnegativity(["x"]))
    r = solve_lp(U, {"x": 1})
    assert r.status == UNBOUNDED and r.ray["x"] > 0
    E = HPolytope(["x"], [LinearInequality({"x": 1}, -1)] + nonnegativity(["x"]))
    r = solve_lp(E, {"x": 1})
    assert r.status == INFEASIBLE
    assert not is_feasible(E) and feasible_point(E) is None


def test_lp_certificates_are_exact():
    rng = random.Random(7)
    for _ in range(30):
        P = random_poly(rng, 3, 5)
        r = solve_lp(P, {"x0": 1, "x1": 2, "x2": -1})
        if r.status == OPTIMAL:
            y = r.multipliers
            assert all(t >= 0 for t in y)
            for v, c in (("x0", 1), ("x1", 2), ("x2", -1)):
                assert sum(t * row.coefficient(v) for t, row in zip(y, P.rows)) == c
            assert sum(t * row.bound for t, row in zip(y, P.rows)) == r.value
            assert P.contains_point(r.point)
        elif r.status == INFEASIBLE:
            y = r.multipliers
            for v in P.variables:
                assert sum(t * row.coefficient(v) for t, row in zip(y, P.rows)) == 0
            assert sum(t * row.bound for t, row in zip(y, P.rows)) < 0


def test_unbounded_ray_certificate():
    P = HPolytope(["x", "y"], [LinearInequality({"x": 1, "y": -1}, 2)] + nonnegativity("xy"))
    r = solve_lp(P, {"x": 1, "y": 1})
    assert r.status == UNBOUNDED
    for row in P.rows:
        assert row.lhs(r.ray) <= 0
    assert r.ray["x"] + r.ray["y"] > 0


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 4), st.integers(0, 6))
def test_lp_matches_scipy(seed, n, m):
    rng = random.Random(seed)
    P = random_poly(rng, n, m)
    c = {v: rng.randint(-5, 5) for v in P.variables}
    A, b = matrices(P)
    ref = linprog([-c[v] for v in P.variables], A_ub=A, b_ub=b,
                  bounds=[(None, None)] * n, method="highs")
    r = solve_lp(P, c)
    if ref.status == 2:
        assert r.status == INFEASIBLE
    else:
        assert r.status == OPTIMAL
        assert abs(float(r.value) + ref.fun) < 1e-7


def test_vertices_of_simplex():
    P = HPolytope(["x", "y"], nonnegativity("xy") + [LinearInequality({"x": 1, "y": 1}, 1)])
    assert enumerate_vertices(P) == [(0, 0), (0, 1), (1, 0)]


def test_vertex_limits():
    with pytest.raises(CapabilityError):
        enumerate_vertices(box([f"x{i}" for i in range(7)], 1))
    with pytest.raises(UnboundedError):
        enumerate_vertices(HPolytope(["x"], nonnegativity("x")))
    assert not is_bounded(HPolytope(["x"], nonnegativity("x")))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_lp_optimum_is_best_vertex(seed):
    rng = random.Random(seed)
    P = random_poly(rng, 3, 4)
    c = {v: rng.randint(-5, 5) for v in P.variables}
    verts = enumerate_vertices(P)
    r = solve_lp(P, c)
    if not verts:
        assert r.status == INFEASIBLE
    else:
        best = max(sum(ci * x for ci, x in zip(c.values(), vx)) for vx in verts)
        assert r.value == best


def test_minimize_and_redundancy():
    P = HPolytope(["x"], [LinearInequality({"x": 1}, 1), LinearInequality({"x": 1}, 2),
                          LinearInequality({"x": 2}, 3)] + nonnegativity("x"))
    M = minimize(P)
    assert set(M.rows) == {LinearInequality({"x": 1}, 1), LinearInequality({"x": -1}, 0)}
    assert is_redundant(LinearInequality({"x": 1}, 5), P)
    assert not is_redundant(LinearInequality({"x": 1}, F(1, 2)), P)


def test_minimize_empty():
    E = HPolytope(["x"], [LinearInequality({"x": 1}, -1)] + nonnegativity("x"))
    M = minimize(E)
    assert len(M.rows) == 1 and M.rows[0].is_contradiction()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_minimize_keeps_point_set_and_is_irredundant(seed):
    rng = random.Random(seed)
    P = random_poly(rng, 3, 6)
    M = minimize(P)
    if not is_feasible(P):
        return
    assert equal_sets(P, M)
    for row in M.rows:
        assert not is_redundant(row, M)


def test_fme_small_example():
    P = HPolytope(["x", "y"], [LinearInequality({"x": 1, "y": 1}, 3),
                               LinearInequality({"x": -1}, 0), LinearInequality({"y": -1}, 0)])
    Q = fme_eliminate(P, "x")
    assert Q.variables == ("y",)
    assert set(Q.rows) == {LinearInequality({"y": 1}, 3), LinearInequality({"y": -1}, 0)}
    with pytest.raises(GeometryError):
        fme_eliminate(P, "z")


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_fme_against_lifted_feasibility(seed):
    """A point lies in the projection iff the lifted LP in the eliminated
    variables is feasible (checked with scipy)."""
    rng = random.Random(seed)
    P = random_poly(rng, 4, 5)
    stages = fme_project(P, ["x3", "x2"])
    Q = stages[-1]
    assert len(stages) == 3
    A, b = matrices(P)
    for _ in range(15):
        x = [F(rng.randint(-1, 11), rng.choice((1, 2))) for _ in range(2)]
        pt = dict(zip(("x0", "x1"), x))
        rhs = b - A[:, :2] @ np.array([float(t) for t in x])
        ref = linprog([0, 0], A_ub=A[:, 2:], b_ub=rhs, bounds=[(None, None)] * 2,
                      method="highs")
        margins = [float(r.bound - r.lhs(pt)) for r in Q.rows]
        if min(margins, default=1) > 1e-6:
            assert ref.status == 0
        elif min(margins) < -1e-6:
            assert ref.status == 2


def test_containment_witness():
    inner = box(["x", "y"], 2)
    outer = box(["x", "y"], 1)
    assert contains(inner, outer) and not contains(outer, inner)
    row, pt = find_violation(outer, inner)
    assert not row.satisfied_by(pt) and inner.contains_point(pt)


def test_containment_unbounded_witness():
    inner = HPolytope(["x"], nonnegativity("x"))
    outer = box(["x"], 3)
    row, pt = find_violation(outer, inner)
    assert not row.satisfied_by(pt) and inner.contains_point(pt)


def test_substitute_and_rename():
    P = HPolytope(["x", "y"], [LinearInequality({"x": 1, "y": 1}, 3)])
    Q = P.substitute({"x": 1})
    assert Q.variables == ("y",) and Q.rows[0] == LinearInequality({"y": 1}, 2)
    R = P.rename({"x": "z"})
    assert R.variables == ("z", "y")
