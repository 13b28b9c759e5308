"""
Walking the dominance relations on a generated instance
=======================================================

Generate one random geometric instance, solve the lattice relaxations and
print each audited relation.  Stronger models should never give a smaller
bound, and the flow models should match their cut counterparts.
"""

import sys

from sfbound.driver import Limits, compare
from sfbound.formulations import Kind
from sfbound.instance import generate

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
inst = generate(12, 3, 1.0, 1.6, seed)
print(inst.name, f"{inst.n} nodes, {inst.graph.edge_count} edges, sets {[len(s) for s in inst.terminal_sets]}")

kinds = [Kind.UC, Kind.UF, Kind.DC, Kind.DF, Kind.EDC, Kind.SEDC, Kind.EDF, Kind.KLSVZ, Kind.MR]
reports, lines = compare(inst, kinds, Limits(time=60, rounds=200))

for r in reports:
    shown = "-" if r.bound is None else f"{r.bound:.4f}"
    print(f"  {r.kind.value:<6} {shown:>8}  {r.status:<14} rounds={r.rounds} cuts={r.cuts_added}")

print("relations:")
for line in lines:
    print("  " + str(line))
