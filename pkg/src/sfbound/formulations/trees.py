"""Tree-polytope models: one tree per terminal set, or one forest overall."""

from __future__ import annotations

from itertools import combinations

from ..instance import SfpInstance
from ..lp import EQ, GE, LE, LpProgram
from .base import FormulationModel, Kind, VarMap, add_edge_vars


def build_lt(inst: SfpInstance) -> FormulationModel:
    from ..separation import lt_family

    g = inst.graph
    prog = LpProgram(f"lt:{inst.name}")
    vm = VarMap(prog)
    add_edge_vars(vm, inst)
    for k in range(inst.K):
        for e in range(g.edge_count):
            vm.add(("xk", k, e))
    for k in range(inst.K):
        members = set(inst.terminal_sets[k])
        for i in range(inst.n):
            lo = 1.0 if i in members else 0.0
            vm.add(("yk", k, i), lo, 1.0)
    for k in range(inst.K):
        terms = {("yk", k, i): 1.0 for i in range(inst.n)}
        terms.update({("xk", k, e): -1.0 for e in range(g.edge_count)})
        prog.add_row(vm.row(terms, EQ, 1))
    for k in range(inst.K):
        for e in range(g.edge_count):
            prog.add_row(vm.row({("xk", k, e): 1, ("x", e): -1}, LE, 0))
    return FormulationModel(Kind.LT, inst, prog, vm, [lt_family()])


def build_et(inst: SfpInstance) -> FormulationModel:
    from ..separation import et_family

    g, K = inst.graph, inst.K
    prog = LpProgram(f"et:{inst.name}")
    vm = VarMap(prog)
    add_edge_vars(vm, inst)
    terminals = inst.terminals
    for i in range(inst.n):
        vm.add(("y", i), 1.0 if i in terminals else 0.0, 1.0)
    for k, l in combinations(range(K), 2):
        vm.add(("w", k, l))
    for k in range(K):
        members = set(inst.terminal_sets[k])
        for i in range(inst.n):
            vm.add(("z", i, k), 1.0 if i in members else 0.0, 1.0)
    for k in range(K):
        vm.add(("a", k))
    vm.add(("R",), 1.0, float(K))

    # y(V) - x(E) = R: the number of components
    terms = {("y", i): 1.0 for i in range(inst.n)}
    terms.update({("x", e): -1.0 for e in range(g.edge_count)})
    terms[("R",)] = -1.0
    prog.add_row(vm.row(terms, EQ, 0))
    # one active set per component
    terms = {("a", k): 1.0 for k in range(K)}
    terms[("R",)] = -1.0
    prog.add_row(vm.row(terms, EQ, 0))
    for k, l in combinations(range(K), 2):
        prog.add_row(vm.row({("a", k): 1, ("w", k, l): 1}, LE, 1))
    # an edge joining the components of two sets merges them
    for e, (i, j, _) in enumerate(g.edges):
        for k, l in combinations(range(K), 2):
            prog.add_row(vm.row({("x", e): 1, ("z", i, k): 1, ("z", j, l): 1, ("w", k, l): -1}, LE, 2))
            prog.add_row(vm.row({("x", e): 1, ("z", i, l): 1, ("z", j, k): 1, ("w", k, l): -1}, LE, 2))
    # membership propagates along chosen edges in both directions
    for e, (i, j, _) in enumerate(g.edges):
        for k in range(K):
            prog.add_row(vm.row({("z", i, k): 1, ("x", e): -1, ("z", j, k): -1}, GE, -1))
            prog.add_row(vm.row({("z", j, k): 1, ("x", e): -1, ("z", i, k): -1}, GE, -1))
    # transitivity of "same component"
    for k, l, m in combinations(range(K), 3):
        prog.add_row(vm.row({("w", k, l): 1, ("w", l, m): 1, ("w", k, m): -1}, LE, 1))
        prog.add_row(vm.row({("w", k, m): 1, ("w", l, m): 1, ("w", k, l): -1}, LE, 1))
        prog.add_row(vm.row({("w", k, l): 1, ("w", k, m): 1, ("w", l, m): -1}, LE, 1))
    return FormulationModel(Kind.ET, inst, prog, vm, [et_family()])
