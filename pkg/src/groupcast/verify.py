"""End-to-end checks with structured, replayable reports."""
from __future__ import annotations

import csv
import json
import logging
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .cutset import outer_region
from .geometry import (HPolytope, LinearInequality, find_violation, fme_project,
                       fraction_str, is_redundant)
from .geometry.lp import OPTIMAL, _f, _q, solve_dense
from .network import (CombinationNetwork, DiamondMessageSet, InfoValuation,
                      evaluate_optimal_distribution, random_network, random_valuation)
from .regions import (EXAMPLE_K4_ROWS, corollary1_region, degraded_regions,
                      printed_fme_stage, redundant_families, split_rate_region,
                      theorem1_region, theorem2_region,
                      theorem2_symbolic, theorem3_region, theorem3_rows)

log = logging.getLogger(__name__)


def _point_json(point) -> dict[str, str]:
    return {v: fraction_str(x) for v, x in point.items()}


@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: dict | None = None
    detail: str = ""
    millis: float = 0.0

    def to_json(self) -> dict:
        out = {"name": self.name, "pass": self.passed}
        if self.detail:
            out["detail"] = self.detail
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class VerificationReport:
    """Outcome of one pipeline on one instance.

    ``to_json`` leaves timings out so identical inputs give identical
    bytes; timings go to the CSV summary.
    """

    kind: str
    instance: dict
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def run(self, name: str, fn: Callable[[], CheckResult | bool]) -> CheckResult:
        t0 = time.perf_counter()
        res = fn()
        if isinstance(res, bool):
            res = CheckResult(name, res)
        res.name = name
        res.millis = (time.perf_counter() - t0) * 1000
        self.checks.append(res)
        if not res.passed:
            log.info("%s: check %s failed", self.kind, name)
        return res

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        return {"kind": self.kind, "instance": self.instance, "pass": self.passed,
                "checks": [c.to_json() for c in self.checks]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)

    def csv_rows(self, instance_id) -> list[list]:
        return [[instance_id, c.name, int(c.passed), f"{c.millis:.1f}"]
                for c in self.checks]


# ---------------------------------------------------------------------------
# building blocks

def contains_check(outer: HPolytope, inner: HPolytope) -> CheckResult:
    """Pass iff ``inner`` lies inside ``outer``; otherwise the witness is a
    point of ``inner`` and the ``outer`` row it breaks."""
    hit = find_violation(outer, inner)
    if hit is None:
        return CheckResult("", True)
    row, point = hit
    return CheckResult("", False, {"row": row.to_json(), "point": _point_json(point)},
                       f"violates {row.label or row}")


def equality_checks(report: VerificationReport, name: str,
                    p: HPolytope, q: HPolytope, p_name="A", q_name="B") -> bool:
    a = report.run(f"{name}: {p_name} in {q_name}", lambda: contains_check(q, p))
    b = report.run(f"{name}: {q_name} in {p_name}", lambda: contains_check(p, q))
    return a.passed and b.passed


def implication_certificate(target: LinearInequality,
                            rows: Sequence[LinearInequality]) -> list[Fraction] | None:
    """Multipliers ``y >= 0`` with ``sum y_i row_i`` having the same left
    side as ``target`` and a right side no larger, or ``None``."""
    names = sorted({v for r in [target, *rows] for v in r.variables})
    A = [[_q(r.coefficient(v)) for v in names] for r in rows]
    b = [_q(r.bound) for r in rows]
    c = [_q(target.coefficient(v)) for v in names]
    res = solve_dense(A, b, c)
    if res["status"] != OPTIMAL or res["value"] > _q(target.bound):
        return None
    y = [_f(t) for t in res["y"]]
    # independent recheck of the combination
    for k, v in enumerate(names):
        if sum(yi * r.coefficient(v) for yi, r in zip(y, rows)) != target.coefficient(v):
            return None
    if sum(yi * r.bound for yi, r in zip(y, rows)) > target.bound:
        return None
    return y


def sum_certificate(target: LinearInequality,
                    parts: Sequence[LinearInequality]) -> list[Fraction] | None:
    """Equal multipliers ``y`` with ``y * sum(parts)`` having the left side
    of ``target`` and a right side no larger, or ``None``.

    Rows are stored scaled, so the common multiplier absorbs the scaling.
    """
    lhs: dict[str, Fraction] = {}
    rhs = Fraction(0)
    for r in parts:
        for v, c in r.coeffs:
            lhs[v] = lhs.get(v, Fraction(0)) + c
        rhs += r.bound
    lhs = {v: c for v, c in lhs.items() if c}
    if set(lhs) != set(target.variables) or not lhs:
        return None
    v0 = target.variables[0]
    lam = lhs[v0] / target.coefficient(v0)
    if lam <= 0 or any(lhs[v] != lam * target.coefficient(v) for v in lhs):
        return None
    if rhs > lam * target.bound:
        return None
    return [1 / lam] * len(parts)


# ---------------------------------------------------------------------------
# pipelines

def _net_instance(net: CombinationNetwork, seed=None) -> dict:
    out = net.to_json()
    if seed is not None:
        out["seed"] = seed
    return out


def _val_instance(v: InfoValuation, seed=None) -> dict:
    out = {"K": v.K, "valuation": v.to_json()}
    if seed is not None:
        out["seed"] = seed
    return out


def verify_capacity(net: CombinationNetwork, seed=None) -> VerificationReport:
    """Achievable region equals the cut-set outer region; the extra inner-bound
    families are redundant."""
    rep = VerificationReport("capacity", _net_instance(net, seed))
    inner = corollary1_region(net)
    outer = outer_region(net)
    equality_checks(rep, "capacity", inner, outer, "inner", "outer")

    def redundant():
        for row in redundant_families(net):
            if not is_redundant(row, inner.add_rows([])):
                return CheckResult("", False, {"row": row.to_json()},
                                   f"{row.label} not redundant")
        return CheckResult("", True)
    rep.run("redundant families (62)-(66)", redundant)
    return rep


def _swap_stage(stage: HPolytope, M: DiamondMessageSet) -> HPolytope:
    return stage.rename(M.swap_map())


def fme_pipeline(v: InfoValuation, check_intermediates: bool = False,
                 seed=None) -> VerificationReport:
    """Eliminate the split rates in the five-step order and compare."""
    rep = VerificationReport("fme", _val_instance(v, seed))
    M = DiamondMessageSet(v.K)
    stages = fme_project(split_rate_region(v), M.split_rates)
    rep.instance["rows_per_stage"] = [len(s) for s in stages]
    if check_intermediates:
        swapped = fme_project(split_rate_region(v.swapped()), M.split_rates)
        for step in (2, 3, 4):
            printed = printed_fme_stage(v, step)
            equality_checks(rep, f"step {step}", stages[step], printed,
                            "pipeline", "printed")
        for step in (2, 4):
            equality_checks(rep, f"symmetry step {step}", stages[step],
                            _swap_stage(swapped[step], M), "stage", "swapped")
            equality_checks(rep, f"printed symmetry step {step}",
                            printed_fme_stage(v, step),
                            _swap_stage(printed_fme_stage(v.swapped(), step), M),
                            "printed", "swapped")
    equality_checks(rep, "final", stages[-1], theorem1_region(v),
                    "projection", "theorem1")
    return rep


# (theorem-3 row, the two theorem-3 rows whose sum it is); rows named by
# label prefix, j-indexed rows matched at the same j, the pair row at (j1, j2)
_BINNING_SUMS = [("(B5)", "(B1)", "(B2)"),
                 ("(B14)", "(B7)", "(B2)"),
                 ("(B15)", "(B8)", "(B1)"),
                 ("(B16)", "(B8)", "(B7)")]


def _rows_by_label(rows: Iterable[LinearInequality]) -> dict[str, LinearInequality]:
    return {r.label: r for r in rows}


def verify_binning_reduction(v: InfoValuation, seed=None) -> VerificationReport:
    """Without binning the binning region equals the plain inner bound."""
    rep = VerificationReport("binning", _val_instance(v, seed))
    if v.g != 0:
        raise ValueError("the reduction is stated at g = 0")
    equality_checks(rep, "g=0", theorem3_region(v), theorem1_region(v),
                    "theorem3", "theorem1")
    rows = _rows_by_label(theorem3_rows(v))

    def certificates():
        certs = {}
        for target, first, second in _BINNING_SUMS:
            for label, row in rows.items():
                if not label.startswith(target + " ") and label != target:
                    continue
                suffix = label[len(target):]
                if target == "(B16)":
                    j1, j2 = (int(t.split("=")[1]) for t in suffix.split())
                    parts = [rows[f"(B8) j={j1}"], rows[f"(B7) j={j2}"]]
                elif target == "(B5)":
                    parts = [rows[first], rows[second]]
                else:
                    parts = [rows[first + suffix], rows[second]]
                y = sum_certificate(row, parts)
                if y is None:
                    return CheckResult("", False, {"row": row.to_json()},
                                       f"no certificate for {label}")
                certs[label] = [fraction_str(t) for t in y]
        return CheckResult("", True, None, json.dumps(certs, sort_keys=True))
    rep.run("sum certificates (5),(14),(15),(16)", certificates)
    return rep


def example_k4_table() -> list[tuple[str, int | None]]:
    """Match each generated K = 4 capacity row to the printed table."""
    printed = list(EXAMPLE_K4_ROWS)
    out = []
    used: set[int] = set()
    for label, lhs, rhs in theorem2_symbolic(4):
        hit = None
        for i, (plhs, prhs) in enumerate(printed):
            if i not in used and plhs == lhs and +prhs == +rhs:
                hit = i
                used.add(i)
                break
        out.append((label, hit))
    return out


def verify_example_k4() -> VerificationReport:
    rep = VerificationReport("example-k4", {"K": 4})
    table = example_k4_table()
    matched = sum(hit is not None for _, hit in table)

    def match():
        ok = matched == len(EXAMPLE_K4_ROWS) == len(table)
        detail = "; ".join(f"{lab} -> {'row %d' % (h + 1) if h is not None else 'none'}"
                           for lab, h in table)
        return CheckResult("", ok, None if ok else {"table": detail}, detail)
    rep.run("nine-row coefficient match", match)
    rep.instance["matched"] = matched
    return rep


def verify_degraded_specializations(net: CombinationNetwork, seed=None) -> VerificationReport:
    K = net.K
    rep = VerificationReport("degraded", _net_instance(net, seed))
    M = DiamondMessageSet(K)
    k, m = M.R_K, M.R_Km1
    full = theorem2_region(net)
    three = degraded_regions(net, "three")
    two = degraded_regions(net, "two")
    equality_checks(rep, "three", three, full.substitute({m: 0}), "three", "capacity")
    equality_checks(rep, "two", two, full.substitute({m: 0, k: 0}), "two", "capacity")
    row43 = next(r for r in full.substitute({m: 0}).rows if r.label == "(43)")
    rep.run("(43) redundant for three messages",
            lambda: is_redundant(row43, three))
    for row in full.substitute({m: 0, k: 0}).rows:
        if row.label.startswith("(46)"):
            r = row
            rep.run(f"{r.label} redundant for two messages",
                    lambda r=r: is_redundant(r, two))
    return rep


# ---------------------------------------------------------------------------
# integer grid oracle (no LP)

def lattice_points(poly: HPolytope, bound: int) -> set[tuple[int, ...]]:
    """Integer points of ``poly`` in ``[0, bound]^dim``, by enumeration."""
    n = poly.dim
    axes = np.meshgrid(*([np.arange(bound + 1, dtype=np.int64)] * n), indexing="ij")
    pts = np.stack([a.ravel() for a in axes], axis=1)
    keep = np.ones(len(pts), dtype=bool)
    for row in poly.rows:
        den = 1
        for _, c in row.coeffs:
            den = np.lcm(den, c.denominator)
        den = int(np.lcm(den, row.bound.denominator))
        coef = np.array([int(row.coefficient(v) * den) for v in poly.variables],
                        dtype=np.int64)
        keep &= pts @ coef <= int(row.bound * den)
    return {tuple(int(x) for x in pt) for pt in pts[keep]}


def grid_oracle(net: CombinationNetwork, bound: int | None = None) -> CheckResult:
    """Integer points of the capacity region equal those of the outer region."""
    if bound is None:
        bound = int(sum(net.capacities.values()))
    a = lattice_points(theorem2_region(net), bound)
    b = outer_region(net)
    b = lattice_points(b.reorder(theorem2_region(net).variables), bound)
    if a == b:
        return CheckResult("grid", True, detail=f"{len(a)} points")
    diff = sorted(a ^ b)[0]
    return CheckResult("grid", False, {"point": [str(x) for x in diff]})


# ---------------------------------------------------------------------------
# campaigns

CAMPAIGNS = ("capacity", "fme", "binning", "degraded")


def campaign_instances(kind: str, K: int, count: int, seed: int):
    """Deterministic instances; the seed of instance ``i`` is recorded."""
    out = []
    for i in range(count):
        s = seed * 1_000_003 + K * 10_007 + i
        rng = random.Random(s)
        if kind == "binning":
            # arbitrary valuations: the reduction is a linear identity
            out.append((s, random_valuation(K, rng)))
        else:
            out.append((s, random_network(K, rng)))
    return out


def run_instance(kind: str, s: int, obj, check_intermediates: bool = False) -> VerificationReport:
    if kind == "capacity":
        return verify_capacity(obj, s)
    if kind == "fme":
        return fme_pipeline(evaluate_optimal_distribution(obj), check_intermediates, s)
    if kind == "binning":
        return verify_binning_reduction(obj, s)
    if kind == "degraded":
        return verify_degraded_specializations(obj, s)
    raise ValueError(f"unknown campaign {kind!r}")


def _run_packed(args) -> VerificationReport:
    return run_instance(*args)


def run_campaign(kind: str, Ks: Iterable[int], count: int, seed: int = 0, *,
                 jobs: int = 1, check_intermediates: bool = False) -> list[VerificationReport]:
    """Run ``count`` instances per ``K``; reports come back in instance order."""
    if kind not in CAMPAIGNS:
        raise ValueError(f"unknown campaign {kind!r}")
    tasks = [(kind, s, obj, check_intermediates)
             for K in Ks for s, obj in campaign_instances(kind, K, count, seed)]
    if jobs > 1:
        from multiprocessing import Pool
        with Pool(jobs) as pool:
            return pool.map(_run_packed, tasks)
    return [_run_packed(t) for t in tasks]


def write_reports(reports: Sequence[VerificationReport], outdir) -> Path:
    """One JSON file per report plus ``summary.csv``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["instance", "check", "pass", "millis"])
        for i, rep in enumerate(reports):
            (outdir / f"{rep.kind}-{i:04d}.json").write_text(rep.dumps() + "\n")
            w.writerows(rep.csv_rows(i))
    return outdir
