"""
A desk-sized campaign and its reports
=====================================

Run a small parameter grid, then turn the CSV into the solved-share table
and the improvement factors over the undirected cut bound.  Output goes to
the directory given on the command line (default: ./campaign-out).
"""

import sys
from pathlib import Path

from sfbound.bench import campaign, report
from sfbound.driver import Limits
from sfbound.formulations import Kind

out = Path(sys.argv[1] if len(sys.argv) > 1 else "campaign-out")

grid = campaign.Campaign(
    n=(10, 20),
    k=(2, 3),
    p=(0.5, 1.0),
    alpha=(1.6,),
    seeds=2,
    kinds=(Kind.UC, Kind.DC, Kind.EDC, Kind.SEDC, Kind.KLSVZ),
    limits=Limits(time=30, rounds=100),
)
csv_path = campaign.run(grid, out)
print("rows written to", csv_path)

paths = report.write_reports([csv_path], out)
for name, path in sorted(paths.items()):
    print(f"  {name:<16} {path}")

# median improvement per (n, kind)
rows = report.load_rows([csv_path])
for n, kind, count, lo, q1, med, q3, hi in report.quartiles(report.improvement_factors(rows)):
    print(f"  n={n:<3} {kind:<6} median {med:.3f}  (min {lo:.3f}, max {hi:.3f}, {count} instances)")
