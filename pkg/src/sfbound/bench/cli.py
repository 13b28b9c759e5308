"""Command line: ``sfbound {gen,bound,exact,compare,campaign,report}``.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from .. import lp
from ..driver import Limits, audit, solve_relaxation
from ..exact import ExactLimits, integer_optimum
from ..formulations import Kind
from ..instance import FIXTURES, fixture, generate, read, write
from . import campaign as camp
from . import report as rep

KIND_CHOICES = [k.value for k in Kind] + ["all"]
DEFAULT_GRID = "n=10,15,k=2,3,p=0.5,1,alpha=1.6,2,seeds=2"


class UsageError(Exception):
    pass


def _kinds(text: str) -> tuple[Kind, ...]:
    """``all``, one kind, or a comma list of kinds."""
    parts = [p.strip().lower() for p in text.split(",") if p.strip()]
    if not parts:
        raise argparse.ArgumentTypeError("no formulation given")
    if parts == ["all"]:
        return tuple(Kind)
    bad = [p for p in parts if p not in KIND_CHOICES or p == "all"]
    if bad:
        raise argparse.ArgumentTypeError(f"invalid kind {bad[0]!r} (choose from {', '.join(KIND_CHOICES)})")
    return tuple(Kind(p) for p in dict.fromkeys(parts))


def _grid(text: str) -> dict:
    try:
        return camp.parse_grid(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def load_instance(spec: str):
    """A path, or the name of a packaged fixture (``A``, ``instA`` or ``instA.sfp``)."""
    path = Path(spec)
    if path.exists():
        return read(path)
    label = path.name.removesuffix(".sfp").removeprefix("inst")
    if label in FIXTURES:
        return fixture(label)
    raise FileNotFoundError(f"no instance file {spec}")


def _limits(args) -> Limits:
    return Limits(time=args.time_limit, rounds=args.rounds)


def _report_dict(r) -> dict:
    return {
        "instance": r.instance,
        "kind": r.kind.value,
        "bound": r.bound,
        "status": r.status,
        "rounds": r.rounds,
        "cuts": r.cuts_added,
        "wall_time_s": round(r.wall_time, 3),
        "detail": r.detail,
    }


def _bound_line(r) -> str:
    b = "-" if r.bound is None else f"{r.bound:.6g}"
    line = f"{r.instance:<24} {r.kind.value:<6} bound={b:<10} status={r.status:<15} rounds={r.rounds:<4} cuts={r.cuts_added:<6} time={r.wall_time:.2f}s"
    return line + (f"  ({r.detail})" if r.detail else "")


def cmd_gen(args) -> int:
    c = camp.Campaign(**args.grid, base_seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for cell, seed in c.instances():
        inst = generate(cell.n, cell.k, cell.p, cell.alpha, seed)
        path = out / f"{inst.name}.sfp"
        write(inst, path)
        print(path)
    for cell in c.skipped:
        logging.warning("skipped n=%d k=%d p=%g alpha=%g: too few terminals", cell.n, cell.k, cell.p, cell.alpha)
    return 0


def cmd_bound(args) -> int:
    inst = load_instance(args.instance)
    reports = [solve_relaxation(inst, k, _limits(args), args.backend) for k in args.kind]
    for r in reports:
        print(_bound_line(r))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for r in reports:
            with open(out / f"bound-{r.instance}-{r.kind.value}.json", "w", encoding="utf-8") as fh:
                json.dump(_report_dict(r), fh, indent=2)
                fh.write("\n")
    return 0


def cmd_exact(args) -> int:
    inst = load_instance(args.instance)
    res = integer_optimum(inst, ExactLimits(time=args.time_limit), args.method)
    edges = [] if res.witness is None else list(res.witness.edges)
    state = "optimal" if res.optimal else "limit reached, best found"
    print(f"{inst.name}: {res.value:.6g} ({state}; {res.method}, {res.nodes} nodes)")
    print("edges:", " ".join(f"{inst.graph.edges[e][0]}-{inst.graph.edges[e][1]}" for e in edges))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / f"exact-{inst.name}.json", "w", encoding="utf-8") as fh:
            json.dump(
                {"instance": inst.name, "value": res.value, "optimal": res.optimal, "method": res.method, "edges": edges},
                fh,
                indent=2,
            )
            fh.write("\n")
    return 0


def cmd_compare(args) -> int:
    inst = load_instance(args.instance)
    if len(args.kind) < 2:
        raise UsageError("compare needs at least two formulations")
    reports = [solve_relaxation(inst, k, _limits(args), args.backend) for k in args.kind]
    lines = audit(reports)
    for r in reports:
        print(_bound_line(r))
    print("audit:")
    for line in lines:
        print("  " + str(line))
    verdict = "pass" if all(l.holds for l in lines) else "FAIL"
    print(f"audit {verdict} ({len(lines)} relations checked)")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / f"compare-{inst.name}.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["instance", "kind", "status", "bound", "rounds", "cuts", "wall_time_s"])
            for r in reports:
                w.writerow([r.instance, r.kind.value, r.status, "" if r.bound is None else repr(r.bound), r.rounds, r.cuts_added, f"{r.wall_time:.3f}"])
        with open(out / f"audit-{inst.name}.txt", "w", encoding="utf-8") as fh:
            fh.write("".join(str(l) + "\n" for l in lines))
            fh.write(f"audit {verdict}\n")
    return 0


def cmd_campaign(args) -> int:
    c = camp.Campaign(**args.grid, base_seed=args.seed, kinds=args.kind, limits=_limits(args), backend=args.backend)
    path = camp.run(c, args.out, workers=args.workers)
    print(path)
    return 0


def cmd_report(args) -> int:
    sources = args.csv or [str(Path(args.out) / "campaign.csv")]
    paths = rep.write_reports(sources, args.out)
    for p in paths.values():
        print(p)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sfbound", description="Steiner Forest LP lower bounds")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    def limits(sp, time=60.0):
        sp.add_argument("--time-limit", type=float, default=time, metavar="S", help="seconds per run")
        sp.add_argument("--rounds", type=int, default=200, metavar="N", help="separation rounds per run")
        sp.add_argument("--backend", choices=lp.BACKENDS, default="auto", help="LP solver")

    g = sub.add_parser("gen", help="write generated instances")
    g.add_argument("--grid", type=_grid, default="n=10,k=2,p=1,alpha=1.6,seeds=1")
    g.add_argument("--seed", type=int, default=0, help="first seed")
    g.add_argument("--out", default=".", metavar="DIR")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bound", help="lower bound of one or more relaxations")
    b.add_argument("--instance", required=True, metavar="PATH")
    b.add_argument("--kind", "--kinds", type=_kinds, default=(Kind.UC,), help="formulation, comma list or 'all'")
    b.add_argument("--out", metavar="DIR", help="also write JSON reports here")
    limits(b)
    b.set_defaults(func=cmd_bound)

    e = sub.add_parser("exact", help="integer optimum of a small instance")
    e.add_argument("--instance", required=True, metavar="PATH")
    e.add_argument("--method", choices=("auto", "brute-force", "branch-and-bound"), default="auto")
    e.add_argument("--time-limit", type=float, default=600.0, metavar="S")
    e.add_argument("--out", metavar="DIR")
    e.set_defaults(func=cmd_exact)

    c = sub.add_parser("compare", help="run several relaxations and audit the dominance relations")
    c.add_argument("--instance", required=True, metavar="PATH")
    c.add_argument("--kind", "--kinds", type=_kinds, default=tuple(Kind), help="comma list or 'all'")
    c.add_argument("--out", metavar="DIR")
    limits(c)
    c.set_defaults(func=cmd_compare)

    m = sub.add_parser("campaign", help="run a parameter grid, one CSV row per (instance, kind)")
    m.add_argument("--grid", type=_grid, default=DEFAULT_GRID, help="e.g. n=10,15,k=2,3,p=0.5,1,alpha=1.6,2,seeds=2")
    m.add_argument("--seed", type=int, default=0, help="first seed of each cell")
    m.add_argument("--kind", "--kinds", type=_kinds, default=tuple(Kind), help="comma list or 'all'")
    m.add_argument("--workers", type=int, default=1, metavar="N")
    m.add_argument("--out", default="campaign", metavar="DIR")
    limits(m)
    m.set_defaults(func=cmd_campaign)

    r = sub.add_parser("report", help="solved shares and improvement factors from campaign CSVs")
    r.add_argument("--out", default="campaign", metavar="DIR", help="reads DIR/campaign.csv unless --csv is given")
    r.add_argument("--csv", action="append", metavar="PATH", help="campaign CSV (repeatable)")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "workers", 1) < 1 or getattr(args, "rounds", 0) < 0:
        parser.error("--workers must be positive and --rounds non-negative")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"sfbound {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"sfbound {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
