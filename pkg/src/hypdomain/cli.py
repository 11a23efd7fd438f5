"""Command line interface: ``hypdomain {metric,meridian,map,converge,scenario}``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .canonical import dump_map, solve_canonical_map
from .caratheodory import check_convergence
from .domain import load_domain, separation_for
from .exceptions import HypDomainError
from .geodesic import AbsentMeridian, find_meridian, principal_system
from .hypmetric import solve_density, write_field_csv
from .report import emit_report
from .scenarios import REGISTRY, Figure, get_scenario, run_scenario
from .caratheodory import SuiteTable


def _common(p: argparse.ArgumentParser, domain: bool = True):
    if domain:
        p.add_argument("--domain", required=True, help="domain file (YAML or JSON)")
    p.add_argument("--resolution", type=float, default=0.01, help="grid step h")
    p.add_argument("--horizon", type=int, default=None, help="sequence horizon M")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hypdomain", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("metric", help="solve for the hyperbolic density and write it as CSV")
    _common(p)

    p = sub.add_parser("meridian", help="principal meridians, or the meridian of one class")
    _common(p)
    p.add_argument("--separation", default=None,
                   help="comma-separated 1-based components on one side (default: principal system)")

    p = sub.add_parser("map", help="fit the circular-slit annulus map and dump it as JSON")
    _common(p)
    p.add_argument("--truncation", type=int, default=16)
    p.add_argument("--inner", type=int, default=None, help="1-based component sent to the unit disc")
    p.add_argument("--outer", type=int, default=None, help="1-based component sent outside the annulus")

    p = sub.add_parser("converge", help="check convergence of a registered sequence against its candidate")
    p.add_argument("name", choices=sorted(REGISTRY))
    _common(p, domain=False)

    p = sub.add_parser("scenario", help="run a registered scenario and write text, CSV and SVG reports")
    p.add_argument("name", choices=sorted(REGISTRY))
    _common(p, domain=False)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    out = Path(args.out)
    try:
        return _dispatch(args, out)
    except HypDomainError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def _dispatch(args, out: Path) -> int:
    if args.command == "metric":
        dom = load_domain(args.domain)
        f = solve_density(dom, args.resolution)
        out.mkdir(parents=True, exist_ok=True)
        write_field_csv(f, out / "density.csv")
        print(f"nodes={f.nodes().size} newton_iterations={f.newton_iterations} residual={f.residual_norm:.3g}")
        print(f"wrote {out / 'density.csv'}")
        return 0

    if args.command == "meridian":
        dom = load_domain(args.domain)
        f = solve_density(dom, args.resolution)
        if args.separation:
            side = [int(s) - 1 for s in args.separation.split(",")]
            system = [find_meridian(dom, f, separation_for(dom, side), seed=args.seed)]
        else:
            system = principal_system(dom, f, seed=args.seed)
        rows = []
        for m in system:
            if isinstance(m, AbsentMeridian):
                rows.append((str(m.separation), "absent", "", "", m.reason))
            else:
                rows.append((str(m.separation), "present", m.length, m.dist, ""))
        table = SuiteTable("meridians", ("separation", "status", "length", "dist", "note"), rows)
        emit_report(table, "csv", out / "meridians.csv")
        curves = [m.curve for m in system if not m.absent]
        emit_report(Figure("meridians", dom, curves), "svg", out / "meridians.svg")
        for r in rows:
            print(",".join(str(x) for x in r))
        return 0

    if args.command == "map":
        dom = load_domain(args.domain)
        lab = {}
        if args.inner is not None:
            lab["inner"] = args.inner - 1
        if args.outer is not None:
            lab["outer"] = args.outer - 1
        cm = solve_canonical_map(dom, lab or None, args.truncation)
        out.mkdir(parents=True, exist_ok=True)
        dump_map(cm, out / "map.json")
        print(f"Lambda={cm.Lambda.as_array().tolist()} residual={cm.residual:.3g}")
        return 0

    if args.command == "converge":
        s = get_scenario(args.name)
        seq = s.sequence(args.horizon or s.horizon)
        rep = check_convergence(seq, s.candidate(), s.tolerances)
        emit_report(rep, "text", out / f"{args.name}_convergence.txt")
        emit_report(rep, "csv", out / f"{args.name}_convergence.csv")
        print(rep.summary())
        return 0

    rep = run_scenario(args.name, args.horizon, seed=args.seed)
    emit_report(rep, "text", out / f"{args.name}.txt")
    emit_report(rep, "csv", out / f"{args.name}.csv")
    if rep.figures:
        emit_report(rep, "svg", out / f"{args.name}.svg")
    print(open(out / f"{args.name}.txt").read(), end="")
    return 0 if rep.passed else 1


if __name__ == "__main__":
    sys.exit(main())
