"""Command-line batch runner.

    recurbench analyze --config run.yaml [--seed N] [--format json|text]
    recurbench oracle <subcommand> <args...>
    recurbench catalog list
    recurbench catalog export <name> [--lo N] [--hi N]

Exit status: 0 success, 2 invalid configuration, 3 resource cap exceeded,
4 equivalence inconsistency.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__, oracle
from .analyzers import (CONDITIONS, check_ap, check_distal, check_equicontinuous, check_locally_weakly_ap,
                        check_minimal_decomposition, check_orbit_map_usc, check_recurrence_type1,
                        check_recurrence_type2, check_regularly_ap, check_ro_closed, clopen_battery,
                        compute_u_star, cross_check_equivalences, sample_points)
from .config import AnalysisConfig, ConfigError, build_system, load
from .errors import BudgetError, EquivalenceViolation, HypothesisError, ResourceError
from .flows import catalog, export_sequence
from .analyzers.structure import quotient_by_orbit_closure
from .verdict import Verdict, to_jsonable

EXIT_OK, EXIT_CONFIG, EXIT_RESOURCE, EXIT_INCONSISTENT = 0, 2, 3, 4


def _entry(condition: str, v: Verdict, **extra) -> dict:
    return {"condition": condition, **to_jsonable(extra), **v.to_dict()}


def _point_verdicts(cfg: AnalysisConfig, system, pts) -> list:
    b = cfg.budget
    k, R = b.level, b.radius
    run = {
        "ap": lambda x: check_ap(system, x, k, R),
        "type1": lambda x: check_recurrence_type1(system, x, k, R, "auto", b.battery, b.seed),
        "type2": lambda x: check_recurrence_type2(system, x, k, R, b.battery, b.seed),
        "regular_ap": lambda x: check_regularly_ap(system, x, k, R),
        "usc": lambda x: check_orbit_map_usc(system, x, k, R),
    }
    return [_entry(name, run[name](x), point=str(x))
            for name in cfg.analyzers if name in run for x in pts]


def _quotient_verdict(system) -> Verdict:
    try:
        q = quotient_by_orbit_closure(system)
    except HypothesisError as exc:
        return Verdict.unknown({"refused": str(exc)})
    return Verdict.true({"points": len(q.points), "checks": q.checks})


def _global_verdicts(cfg: AnalysisConfig, system, pts) -> list:
    b = cfg.budget
    k, R = b.level, b.radius
    out = []
    for name in cfg.analyzers:
        if name == "minimal_decomposition":
            out.append(_entry(name, check_minimal_decomposition(system, k, R, pts)))
        elif name == "ro_closed":
            out.append(_entry(name, check_ro_closed(system, k, R)))
        elif name == "u_star":
            for U in clopen_battery(system, b):
                out.append(_entry(name, compute_u_star(system, U, R).openness, set=repr(U)))
        elif name == "lwap":
            out.append(_entry(name, check_locally_weakly_ap(system, k, R, pts)))
        elif name == "equicontinuous":
            out.append(_entry(name, check_equicontinuous(system, k, R, pts)))
        elif name == "distal":
            out.append(_entry(name, check_distal(system, k, R, pts)))
        elif name == "quotient":
            out.append(_entry(name, _quotient_verdict(system)))
    return out


def run(cfg: AnalysisConfig) -> tuple[dict, int]:
    """Execute the configured analyzers; return the report and the exit status."""
    start = time.perf_counter()
    system = build_system(cfg.system, cfg.seed, max(16, cfg.budget.level + 10))
    pts = sample_points(system, cfg.budget)
    verdicts = _point_verdicts(cfg, system, pts) + _global_verdicts(cfg, system, pts)
    status = EXIT_OK
    consistency = None
    if "equivalence" in cfg.analyzers:
        try:
            eq = cross_check_equivalences(system, cfg.budget, strict=True)
        except EquivalenceViolation as exc:
            eq = exc.report
            status = EXIT_INCONSISTENT
        consistency = {"consistent": eq.consistent, "violations": eq.violations, "checks": to_jsonable(eq.checks)}
        verdicts += [_entry(f"({i}) {CONDITIONS[i]}", v) for i, v in sorted(eq.conditions.items())]
    report = {
        "config": cfg.echo(),
        "system": system.name,
        "points": [str(x) for x in pts],
        "verdicts": verdicts,
        "consistency": consistency,
        "version": __version__,
        "timing": {"seconds": round(time.perf_counter() - start, 3)},
    }
    return report, status


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2)
    lines = [f"recurbench {report['version']}: {report['system']}"]
    for v in report["verdicts"]:
        where = v.get("point") or v.get("set") or ""
        tag = " exact" if v["exact"] else ""
        lines.append(f"{v['condition']}{' @ ' + where if where else ''}: {v['outcome']}{tag}")
    c = report["consistency"]
    if c is not None:
        lines.append("consistent" if c["consistent"] else "INCONSISTENT: " + "; ".join(c["violations"]))
    return "\n".join(lines)


def _cmd_analyze(args) -> int:
    try:
        cfg = load(args.config, args.seed)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    try:
        report, status = run(cfg)
    except (ResourceError, BudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ValueError as exc:
        # well-formed but unusable parameters, e.g. a non-primitive substitution
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(render(report, args.format or cfg.format))
    return status


def _cmd_oracle(args) -> int:
    try:
        print(oracle.run(args.subcommand, args.args))
    except (ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def _cmd_catalog(args) -> int:
    systems = catalog(args.seed)
    if args.action == "list":
        for name, make in systems.items():
            s = make()
            print(f"{name}\t{s.group.describe()}")
        return EXIT_OK
    if args.name not in systems:
        print(f"error: unknown catalog system {args.name!r}", file=sys.stderr)
        return EXIT_CONFIG
    s = systems[args.name]()
    try:
        print(export_sequence(s, s.base_points[0], args.lo, args.hi))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="recurbench", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"recurbench {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="run analyzers from a YAML configuration")
    a.add_argument("--config", required=True)
    a.add_argument("--seed", type=int, default=None)
    a.add_argument("--format", choices=("json", "text"), default=None)
    a.set_defaults(func=_cmd_analyze)

    o = sub.add_parser("oracle", help="brute-force reference values")
    o.add_argument("subcommand", choices=("ball-count", "kset", "cone", "factor-scan", "return-scan"))
    o.add_argument("args", nargs=argparse.REMAINDER)
    o.set_defaults(func=_cmd_oracle)

    c = sub.add_parser("catalog", help="list or export catalog systems")
    c.add_argument("action", choices=("list", "export"))
    c.add_argument("name", nargs="?")
    c.add_argument("--lo", type=int, default=-32)
    c.add_argument("--hi", type=int, default=32)
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=_cmd_catalog)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
