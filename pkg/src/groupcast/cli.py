"""Command-line front end: ``python -m groupcast <command> ...``.

Exit status: 0 all checks pass, 1 a check failed, 2 bad input,
3 request beyond supported size (K > 16, vertex enumeration above six
dimensions).
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .cutset import CutsetError
from .geometry import (CapabilityError, GeometryError, HPolytope, UnboundedError,
                       enumerate_vertices, fme_project, minimize, vrep_to_json)
from .lattice import MAX_K, LatticeError
from .network import (CombinationNetwork, DiamondMessageSet, InfoValuation,
                      NetworkError, evaluate_optimal_distribution)
from .regions import RegionKind, build_region, split_rate_region
from . import verify as V

EXIT_OK, EXIT_CHECK, EXIT_SCHEMA, EXIT_CAPABILITY = 0, 1, 2, 3

log = logging.getLogger("groupcast")


class SchemaError(ValueError):
    pass


def _setup_logging() -> None:
    level = os.environ.get("GROUPCAST_LOG", "error").upper()
    if level not in ("ERROR", "INFO", "DEBUG"):
        level = "ERROR"
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from exc


def load_network(path) -> CombinationNetwork:
    obj = _read_json(path)
    if isinstance(obj, dict) and isinstance(obj.get("K"), int) and obj["K"] > MAX_K:
        raise CapabilityError(f"K={obj['K']} exceeds the supported maximum {MAX_K}")
    return CombinationNetwork.from_json(obj)


def load_valuation(path) -> InfoValuation:
    return InfoValuation.from_json(_read_json(path))


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _region(args) -> HPolytope:
    if not args.kind:
        raise SchemaError("--kind is required")
    try:
        kind = RegionKind(args.kind)
    except ValueError:
        names = ", ".join(k.value for k in RegionKind)
        raise SchemaError(f"unknown region kind {args.kind!r}; choose from {names}") from None
    net = load_network(args.net) if args.net else None
    val = load_valuation(args.valuation) if args.valuation else None
    if kind == RegionKind.EXAMPLE_K4 and net is None:
        net = CombinationNetwork.uniform(4)
    return build_region(kind, net=net, valuation=val)


def cmd_region(args) -> int:
    poly = minimize(_region(args))
    _emit(poly.dumps(indent=1), args.out)
    return EXIT_OK


def cmd_vertices(args) -> int:
    poly = minimize(_region(args))
    verts = enumerate_vertices(poly)
    _emit(json.dumps({"variables": list(poly.variables),
                      "vertices": vrep_to_json(verts)}, indent=1), args.out)
    return EXIT_OK


def _finish(reports, out, seed) -> int:
    ok = all(r.passed for r in reports)
    if out:
        V.write_reports(reports, out)
    for r in reports:
        for c in r.checks:
            if not c.passed:
                print(f"FAIL {r.kind} {c.name}: {c.detail}")
                if c.witness is not None:
                    print("  witness:", json.dumps(c.witness, sort_keys=True))
    passed = sum(r.passed for r in reports)
    print(f"seed={seed} {passed}/{len(reports)} reports passed")
    return EXIT_OK if ok else EXIT_CHECK


def cmd_verify(args) -> int:
    if not args.net:
        raise SchemaError("--net is required")
    net = load_network(args.net)
    reports = [V.verify_capacity(net, args.seed),
               V.verify_degraded_specializations(net, args.seed),
               V.fme_pipeline(evaluate_optimal_distribution(net),
                              args.check_intermediates, args.seed)]
    return _finish(reports, args.out, args.seed)


def cmd_fme(args) -> int:
    if args.valuation:
        v = load_valuation(args.valuation)
    elif args.net:
        v = evaluate_optimal_distribution(load_network(args.net))
    else:
        raise SchemaError("--net or --valuation is required")
    stages = fme_project(split_rate_region(v), DiamondMessageSet(v.K).split_rates)
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        for n, st in enumerate(stages):
            (outdir / f"step{n}.json").write_text(st.dumps(indent=1) + "\n")
    for n, st in enumerate(stages):
        print(f"step {n}: {st.dim} variables, {len(st)} rows")
    report = V.fme_pipeline(v, args.check_intermediates, args.seed)
    return _finish([report], None, args.seed)


def cmd_example_k4(args) -> int:
    table = V.example_k4_table()
    for label, hit in table:
        print(f"{label:10s} -> {'printed row %d' % (hit + 1) if hit is not None else 'no match'}")
    matched = sum(h is not None for _, h in table)
    print(f"{matched}/9 rows matched")
    return EXIT_OK if matched == 9 == len(table) else EXIT_CHECK


def cmd_campaign(args) -> int:
    kind = args.kind or "capacity"
    if kind not in V.CAMPAIGNS:
        raise SchemaError(f"campaign kind must be one of {', '.join(V.CAMPAIGNS)}")
    if not 3 <= args.kmin <= args.kmax:
        raise SchemaError("need 3 <= --kmin <= --kmax")
    if args.kmax > MAX_K:
        raise CapabilityError(f"K={args.kmax} exceeds the supported maximum {MAX_K}")
    reports = V.run_campaign(kind, range(args.kmin, args.kmax + 1), args.count,
                             args.seed, jobs=args.jobs,
                             check_intermediates=args.check_intermediates)
    return _finish(reports, args.out, args.seed)


COMMANDS = {"region": cmd_region, "vertices": cmd_vertices, "verify": cmd_verify,
            "fme": cmd_fme, "example-k4": cmd_example_k4, "campaign": cmd_campaign}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="groupcast", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--net", help="network JSON file")
    ap.add_argument("--valuation", help="valuation JSON file (theorem1/theorem3/split kinds)")
    ap.add_argument("--kind", help="region kind, or campaign kind for 'campaign'")
    ap.add_argument("--out", help="output file (region, vertices) or directory")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--check-intermediates", action="store_true")
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--kmin", type=int, default=3)
    ap.add_argument("--kmax", type=int, default=4)
    return ap


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (CapabilityError, UnboundedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except (SchemaError, NetworkError, GeometryError, CutsetError, LatticeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
