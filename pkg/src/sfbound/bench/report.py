"""Aggregate campaign CSVs into solved-share and improvement-factor reports.

Outputs are deterministic: rows are sorted, numbers use fixed formats, and
the SVG has a fixed layout, so regenerating from the same CSVs gives
byte-identical files.
"""

from __future__ import annotations

import csv
import math
from collections import defaultdict
from pathlib import Path
from typing import Iterable

import numpy as np

from ..driver import ITERATION_LIMIT, OPTIMAL, TIME_LIMIT
from ..formulations import Kind

from .campaign import COLUMNS

KIND_ORDER = {k.value: i for i, k in enumerate(Kind)}
HAS_BOUND = (OPTIMAL, TIME_LIMIT, ITERATION_LIMIT)


def load_rows(paths: Iterable) -> list[dict]:
    rows = []
    for path in paths:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if tuple(reader.fieldnames or ()) != COLUMNS:
                raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
            rows.extend(reader)
    return rows


def _bound(row) -> float | None:
    if row["status"] not in HAS_BOUND or row["bound"] == "":
        return None
    b = float(row["bound"])
    return b if math.isfinite(b) else None


def solved_table(rows: list[dict]) -> list[tuple]:
    """(n, k, kind, instances, solved, percent) with ``solved`` counting optimal runs."""
    seen: dict[tuple, set] = defaultdict(set)
    solved: dict[tuple, set] = defaultdict(set)
    for r in rows:
        key = (int(r["n"]), int(r["k"]), r["kind"])
        seen[key].add(r["instance"])
        if r["status"] == OPTIMAL:
            solved[key].add(r["instance"])
    out = []
    for key in sorted(seen, key=lambda t: (t[0], t[1], KIND_ORDER.get(t[2], 99), t[2])):
        total, ok = len(seen[key]), len(solved[key])
        out.append((*key, total, ok, 100.0 * ok / total))
    return out


def improvement_factors(rows: list[dict]) -> list[tuple]:
    """(instance, n, k, kind, bound / UC bound) wherever both runs produced a bound."""
    uc = {}
    for r in rows:
        if r["kind"] == Kind.UC.value:
            b = _bound(r)
            if b is not None and b > 0:
                uc[r["instance"]] = b
    out = []
    for r in rows:
        b = _bound(r)
        if b is None or r["instance"] not in uc:
            continue
        out.append((r["instance"], int(r["n"]), int(r["k"]), r["kind"], b / uc[r["instance"]]))
    out.sort(key=lambda t: (t[1], KIND_ORDER.get(t[3], 99), t[3], t[0]))
    return out


def quartiles(factors: list[tuple]) -> list[tuple]:
    """(n, kind, count, min, q1, median, q3, max) per group."""
    groups: dict[tuple, list[float]] = defaultdict(list)
    for _, n, _, kind, f in factors:
        groups[(n, kind)].append(f)
    out = []
    for key in sorted(groups, key=lambda t: (t[0], KIND_ORDER.get(t[1], 99), t[1])):
        v = np.array(sorted(groups[key]))
        q1, med, q3 = np.percentile(v, [25, 50, 75])
        out.append((*key, len(v), float(v[0]), float(q1), float(med), float(q3), float(v[-1])))
    return out


def _num(x: float) -> str:
    return f"{x:.6f}"


def box_plot_svg(stats: list[tuple], title: str = "bound / UC bound") -> str:
    """Static box-and-whisker chart, one box per (n, kind) group."""
    width = 90 + 46 * max(len(stats), 1)
    height, top, bottom = 360, 40, 300
    if stats:
        lo = min(s[3] for s in stats)
        hi = max(s[7] for s in stats)
    else:
        lo, hi = 1.0, 1.0
    lo = math.floor(min(lo, 1.0) * 10) / 10
    hi = math.ceil(max(hi, lo + 0.1) * 10) / 10
    if hi <= lo:
        hi = lo + 0.1

    def ypos(v: float) -> str:
        return f"{bottom - (v - lo) / (hi - lo) * (bottom - top):.2f}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="22" font-family="sans-serif" font-size="14" text-anchor="middle">{title}</text>',
        f'<line x1="60" y1="{top}" x2="60" y2="{bottom}" stroke="black"/>',
        f'<line x1="60" y1="{bottom}" x2="{width - 20}" y2="{bottom}" stroke="black"/>',
    ]
    steps = 5
    for i in range(steps + 1):
        v = lo + (hi - lo) * i / steps
        y = ypos(v)
        out.append(f'<line x1="56" y1="{y}" x2="60" y2="{y}" stroke="black"/>')
        out.append(f'<text x="52" y="{y}" font-family="sans-serif" font-size="10" text-anchor="end" dominant-baseline="middle">{v:.2f}</text>')
    y1 = ypos(1.0)
    out.append(f'<line x1="60" y1="{y1}" x2="{width - 20}" y2="{y1}" stroke="#999" stroke-dasharray="4 3"/>')
    for i, (n, kind, count, vmin, q1, med, q3, vmax) in enumerate(stats):
        cx = 90 + 46 * i
        out.append(f'<line x1="{cx}" y1="{ypos(vmin)}" x2="{cx}" y2="{ypos(q1)}" stroke="black"/>')
        out.append(f'<line x1="{cx}" y1="{ypos(q3)}" x2="{cx}" y2="{ypos(vmax)}" stroke="black"/>')
        for v in (vmin, vmax):
            out.append(f'<line x1="{cx - 6}" y1="{ypos(v)}" x2="{cx + 6}" y2="{ypos(v)}" stroke="black"/>')
        ytop, ybot = ypos(q3), ypos(q1)
        h = float(ybot) - float(ytop)
        out.append(f'<rect x="{cx - 14}" y="{ytop}" width="28" height="{h:.2f}" fill="#cfe0f3" stroke="black"/>')
        out.append(f'<line x1="{cx - 14}" y1="{ypos(med)}" x2="{cx + 14}" y2="{ypos(med)}" stroke="#c03020" stroke-width="2"/>')
        out.append(f'<text x="{cx}" y="{bottom + 16}" font-family="sans-serif" font-size="10" text-anchor="middle">{kind}</text>')
        out.append(f'<text x="{cx}" y="{bottom + 30}" font-family="sans-serif" font-size="10" text-anchor="middle">n={n}</text>')
        out.append(f'<text x="{cx}" y="{bottom + 44}" font-family="sans-serif" font-size="9" text-anchor="middle" fill="#555">{count}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_reports(csv_paths: Iterable, out_dir) -> dict[str, Path]:
    """Write ``solved.csv``, ``factors.csv``, ``improvement.csv`` and ``improvement.svg``."""
    rows = load_rows(csv_paths)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {name: out / name for name in ("solved.csv", "factors.csv", "improvement.csv", "improvement.svg")}

    def dump(path, header, body):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(body)

    dump(
        paths["solved.csv"],
        ("n", "k", "kind", "instances", "solved", "percent"),
        [(n, k, kind, total, ok, f"{pct:.1f}") for n, k, kind, total, ok, pct in solved_table(rows)],
    )
    factors = improvement_factors(rows)
    dump(
        paths["factors.csv"],
        ("instance", "n", "k", "kind", "factor"),
        [(i, n, k, kind, _num(f)) for i, n, k, kind, f in factors],
    )
    stats = quartiles(factors)
    dump(
        paths["improvement.csv"],
        ("n", "kind", "count", "min", "q1", "median", "q3", "max"),
        [(n, kind, c, *map(_num, vals)) for n, kind, c, *vals in stats],
    )
    with open(paths["improvement.svg"], "w", encoding="utf-8", newline="\n") as fh:
        fh.write(box_plot_svg(stats))
    return paths
