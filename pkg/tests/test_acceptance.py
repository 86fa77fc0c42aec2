"""Acceptance criteria, one test each.

Every test records a one-line PASS/FAIL verdict with its runtime; the lines
are printed in the pytest summary and when this file is run as a script.
"""
import random
import sys
import time
from fractions import Fraction as F

from groupcast import verify as V
from groupcast.cutset import (check_extremal_inequality, coverage_function, modular_function,
                              truncated_cardinality)
from groupcast.lattice import check_lattice_identities
from groupcast.network import (CombinationNetwork, evaluate_optimal_distribution,
                               random_network, random_valuation)
from groupcast.regions import EXAMPLE_K4_ROWS, example_k4_region, theorem2_region

SEED = 20240601
_LINES: list[str] = []


def _record(n, title, ok, started, limit, detail=""):
    secs = time.perf_counter() - started
    ok_time = secs < limit
    verdict = "PASS" if ok and ok_time else "FAIL"
    line = (f"[{verdict}] criterion {n}: {title} ({detail}; {secs:.1f}s, limit {limit}s)")
    _LINES.append(line)
    try:
        from conftest import ACCEPTANCE_LINES
        ACCEPTANCE_LINES.append(line)
    except ImportError:
        pass
    print(line)
    assert ok, line
    assert ok_time, line


def test_1_example_k4_golden():
    t0 = time.perf_counter()
    rep = V.verify_example_k4()
    unit = [sum(rhs.values()) for _, rhs in EXAMPLE_K4_ROWS]
    numeric = unit == [8, 8, 12, 8, 8, 18, 18, 22, 22]
    same = V.equality_checks(V.VerificationReport("k4", {}), "k4",
                             example_k4_region(CombinationNetwork.uniform(4)),
                             theorem2_region(CombinationNetwork.uniform(4)))
    _record(1, "Example-1 nine rows match coefficient-for-coefficient",
            rep.passed and numeric and same, t0, 1,
            f"{rep.instance['matched']}/9 matched")


def test_2_capacity_campaign():
    t0 = time.perf_counter()
    reps = V.run_campaign("capacity", [3, 4, 5, 6], 50, SEED)
    bad = [r.instance["seed"] for r in reps if not r.passed]
    _record(2, "inner bound equals outer bound, (62)-(66) redundant",
            len(reps) == 200 and not bad, t0, 300,
            f"{len(reps) - len(bad)}/{len(reps)} networks")


def test_3_fme_campaign():
    t0 = time.perf_counter()
    reps = V.run_campaign("fme", [3, 4, 5], 50, SEED, check_intermediates=True)
    bad = [r.instance["seed"] for r in reps if not r.passed]
    _record(3, "five-step projection, printed stages and symmetry",
            len(reps) == 150 and not bad, t0, 600,
            f"{len(reps) - len(bad)}/{len(reps)} valuations")


def test_4_binning_reduction():
    t0 = time.perf_counter()
    vals = [random_valuation(rng.randint(3, 6), rng)
            for rng in [random.Random(SEED + i) for i in range(100)]]
    for K in (3, 4, 5):
        vals += [evaluate_optimal_distribution(net)
                 for _, net in V.campaign_instances("fme", K, 50, SEED)]
    reps = [V.verify_binning_reduction(v) for v in vals]
    bad = sum(not r.passed for r in reps)
    _record(4, "binning region at g=0 equals the plain inner bound, with certificates",
            bad == 0, t0, 60, f"{len(reps) - bad}/{len(reps)} valuations")


def test_5_extremal_inequalities():
    t0 = time.perf_counter()
    rng = random.Random(SEED)
    checked = bad = 0
    for i in range(1000):
        K = rng.randint(3, 6)
        f = (coverage_function(K, rng) if i % 2 == 0
             else truncated_cardinality(K, rng.randint(0, 2 ** K)))
        for which in (0, 1, 2):
            for j in range(1, K - 1):
                checked += 1
                bad += not check_extremal_inequality(f, which, j)
    for i in range(100):
        K = rng.randint(3, 6)
        m = modular_function(random_network(K, rng))
        for which in (0, 1, 2):
            for j in range(1, K - 1):
                checked += 1
                bad += not check_extremal_inequality(m, which, j)
    _record(5, "extremal inequalities on submodular functions, tight on modular ones",
            bad == 0, t0, 60, f"{checked - bad}/{checked} instances")


def test_6_lattice_identities():
    t0 = time.perf_counter()
    results = {K: check_lattice_identities(K) for K in range(2, 9)}
    _record(6, "lattice identities exhaustive for K=2..8", all(results.values()), t0, 30,
            f"{sum(results.values())}/7 values of K")


def test_7_grid_oracle():
    t0 = time.perf_counter()
    rng = random.Random(SEED)
    bad = 0
    for _ in range(100):
        caps = {S: F(rng.randint(0, 3)) for S in range(1, 8)}
        bad += not V.grid_oracle(CombinationNetwork(3, caps)).passed
    _record(7, "integer points of capacity and outer regions agree (K=3)", bad == 0, t0, 120,
            f"{100 - bad}/100 networks")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
