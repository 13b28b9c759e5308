"""
Bounds on the three small fixtures
==================================

Every relaxation on instances A, B and C, next to the integer optimum.
A is a 4-cycle where orienting the edges already helps; B and C need the
extended models to close more of the gap.
"""

from sfbound.driver import solve_relaxation
from sfbound.exact import integer_optimum
from sfbound.formulations import Kind
from sfbound.instance import fixture

kinds = [Kind.UC, Kind.UF, Kind.KLSVZ, Kind.DC, Kind.DF, Kind.LT, Kind.ET, Kind.EDC, Kind.SEDC, Kind.EDF, Kind.MR]

print("inst " + "".join(f"{k.value:>7}" for k in kinds) + "    OPT")
for label in "ABC":
    inst = fixture(label)
    cells = []
    for kind in kinds:
        rep = solve_relaxation(inst, kind, backend="simplex")
        cells.append(f"{rep.bound:7.2f}")
    opt = integer_optimum(inst)
    print(f"{label:<5}" + "".join(cells) + f"{opt.value:7.0f}")

# the witness behind the optimum on C
opt = integer_optimum(fixture("C"))
print("edges of an optimal forest on C:", sorted(opt.witness.edges))
