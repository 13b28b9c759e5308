"""Parameter grids of generated instances, run against a set of formulations."""

from __future__ import annotations

import csv
import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from ..driver import Limits, solve_relaxation
from ..formulations import Kind
from ..instance import generate, write

log = logging.getLogger(__name__)

COLUMNS = ("instance", "n", "k", "p", "alpha", "seed", "kind", "status", "bound", "rounds", "cuts", "wall_time_s")
ERROR = "error"

GRID_KEYS = ("n", "k", "p", "alpha", "seeds")


@dataclass(frozen=True)
class Cell:
    n: int
    k: int
    p: float
    alpha: float

    def valid(self) -> bool:
        # every terminal set needs two members
        return math.ceil(self.p * self.n - 1e-12) >= 2 * self.k


@dataclass
class Campaign:
    n: tuple[int, ...] = (10, 15)
    k: tuple[int, ...] = (2, 3)
    p: tuple[float, ...] = (0.5, 1.0)
    alpha: tuple[float, ...] = (1.6, 2.0)
    seeds: int = 2
    base_seed: int = 0
    kinds: tuple[Kind, ...] = tuple(Kind)
    limits: Limits = Limits()
    backend: str = "auto"
    skipped: list[Cell] = field(default_factory=list)

    def cells(self) -> list[Cell]:
        good, self.skipped = [], []
        for n, k, p, a in itertools.product(self.n, self.k, self.p, self.alpha):
            cell = Cell(n, k, p, a)
            (good if cell.valid() else self.skipped).append(cell)
        return good

    def instances(self) -> list[tuple[Cell, int]]:
        seeds = range(self.base_seed, self.base_seed + self.seeds)
        return [(cell, s) for cell in self.cells() for s in seeds]


def parse_grid(text: str) -> dict:
    """``n=10,15,k=2,3,p=1,alpha=1.6,seeds=2``: a bare value extends the previous key."""
    out: dict[str, list[str]] = {}
    key = None
    for tok in filter(None, (t.strip() for t in text.split(","))):
        if "=" in tok:
            key, val = (s.strip() for s in tok.split("=", 1))
            if key not in GRID_KEYS:
                raise ValueError(f"unknown grid key {key!r} (expected one of {', '.join(GRID_KEYS)})")
            if key in out:
                raise ValueError(f"grid key {key!r} given twice")
            out[key] = [val] if val else []
        elif key is None:
            raise ValueError(f"grid value {tok!r} has no key")
        else:
            out[key].append(tok)
    parsed: dict = {}
    for key, vals in out.items():
        if not vals:
            raise ValueError(f"grid key {key!r} has no values")
        if key in ("n", "k"):
            parsed[key] = tuple(int(v) for v in vals)
        elif key == "seeds":
            if len(vals) != 1:
                raise ValueError("seeds takes a single count")
            parsed[key] = int(vals[0])
        else:
            parsed[key] = tuple(float(v) for v in vals)
    return parsed


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x) if math.isfinite(x) else ""
    return str(x)


def run_one(cell: Cell, seed: int, kind: Kind, limits: Limits, backend: str) -> dict:
    inst = generate(cell.n, cell.k, cell.p, cell.alpha, seed)
    row = {"instance": inst.name, "n": cell.n, "k": cell.k, "p": cell.p, "alpha": cell.alpha, "seed": seed, "kind": kind.value}
    try:
        rep = solve_relaxation(inst, kind, limits, backend)
    except Exception as exc:  # one failing cell must not stop the grid
        log.error("%s %s failed: %s", inst.name, kind.value, exc)
        row.update(status=ERROR, bound=None, rounds=None, cuts=None, wall_time_s=None)
        return row
    row.update(
        status=rep.status,
        bound=rep.bound,
        rounds=rep.rounds,
        cuts=rep.cuts_added,
        wall_time_s=round(rep.wall_time, 3),
    )
    return row


def _run_task(args):
    return run_one(*args)


def run(campaign: Campaign, out_dir, workers: int = 1) -> Path:
    """Run every (instance, kind) pair and write ``campaign.csv`` under ``out_dir``.

    Generated instances are saved under ``out_dir/instances``.  Rows come out
    in grid order whatever the worker count.
    """
    out = Path(out_dir)
    (out / "instances").mkdir(parents=True, exist_ok=True)
    plan = campaign.instances()
    for cell in campaign.skipped:
        log.warning("skipping n=%d k=%d p=%g alpha=%g: fewer than two terminals per set", cell.n, cell.k, cell.p, cell.alpha)
    for cell, seed in plan:
        inst = generate(cell.n, cell.k, cell.p, cell.alpha, seed)
        write(inst, out / "instances" / f"{inst.name}.sfp")
    tasks = [(cell, seed, kind, campaign.limits, campaign.backend) for cell, seed in plan for kind in campaign.kinds]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
            rows = list(pool.map(_run_task, tasks))
    else:
        rows = [_run_task(t) for t in tasks]
    path = out / "campaign.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in COLUMNS])
    if campaign.skipped:
        with open(out / "skipped.txt", "w", encoding="utf-8") as fh:
            for c in campaign.skipped:
                fh.write(f"n={c.n} k={c.k} p={c.p:g} alpha={c.alpha:g}\n")
    return path
