"""Directed models whose orientation is consistent across terminal sets.

Each root ``r^k`` is either a parent (``z_kk = 1``) or hangs below a
lower-index parent ``r^l`` (``z_lk = 1``).  Terminals of set ``l`` are then
served from the parent's arborescence.
"""

from __future__ import annotations

from ..instance import SfpInstance
from ..lp import EQ, GE, LE, LpProgram
from .base import FormulationModel, Kind, VarMap, add_arc_vars, add_edge_vars


def _parent_columns(vm: VarMap, inst: SfpInstance) -> None:
    for k in range(inst.K):
        for l in range(k, inst.K):
            vm.add(("z", k, l))


def _parent_rows(vm: VarMap, inst: SfpInstance) -> None:
    K = inst.K
    for k in range(K):
        vm.prog.add_row(vm.row({("z", l, k): 1.0 for l in range(k + 1)}, EQ, 1))
    # a root that adopts others must be a parent itself
    for k in range(1, K - 1):
        for l in range(k + 1, K):
            vm.prog.add_row(vm.row({("z", k, k): 1, ("z", k, l): -1}, GE, 0))


def build_edf(inst: SfpInstance) -> FormulationModel:
    g, K = inst.graph, inst.K
    prog = LpProgram(f"edf:{inst.name}")
    vm = VarMap(prog)
    add_edge_vars(vm, inst)
    for k in range(K):
        for e in range(g.edge_count):
            vm.add(("xk", k, e))
    _parent_columns(vm, inst)
    prog.set_bounds(vm[("z", 0, 0)], 1.0, 1.0)
    served = {k: inst.terminals_from(k) for k in range(K)}
    for k in range(K):
        for t in served[k]:
            add_arc_vars(vm, inst, ("f", k, t))

    for e in range(g.edge_count):
        terms = {("x", e): 1.0}
        terms.update({("xk", k, e): -1.0 for k in range(K)})
        prog.add_row(vm.row(terms, GE, 0))
    _parent_rows(vm, inst)
    for k in range(K):
        for e, (i, j, _) in enumerate(g.edges):
            for s in served[k]:
                for t in served[k]:
                    terms = {("f", k, s, i, j): 1.0, ("xk", k, e): -1.0}
                    terms[("f", k, t, j, i)] = terms.get(("f", k, t, j, i), 0.0) + 1.0
                    prog.add_row(vm.row(terms, LE, 0))
    adj = g.adjacency()
    for k in range(K):
        r = inst.roots[k]
        for t in served[k]:
            z = ("z", k, inst.tau[t])
            for i in range(inst.n):
                # inflow - outflow = -z at the root, z at t
                terms: dict[tuple, float] = {}
                for nb, _ in adj[i]:
                    terms[("f", k, t, nb, i)] = 1.0
                    terms[("f", k, t, i, nb)] = -1.0
                if i == r:
                    terms[z] = 1.0
                elif i == t:
                    terms[z] = -1.0
                prog.add_row(vm.row(terms, EQ, 0))
    return FormulationModel(Kind.EDF, inst, prog, vm)


def build_edc(inst: SfpInstance) -> FormulationModel:
    from ..separation import edc_family

    prog = LpProgram(f"edc:{inst.name}")
    vm = VarMap(prog)
    add_edge_vars(vm, inst)
    add_arc_vars(vm, inst, ("y",))
    _parent_columns(vm, inst)
    for e, (i, j, _) in enumerate(inst.graph.edges):
        prog.add_row(vm.row({("y", i, j): 1, ("y", j, i): 1, ("x", e): -1}, LE, 0))
    _parent_rows(vm, inst)
    return FormulationModel(Kind.EDC, inst, prog, vm, [edc_family()])


def build_sedc(inst: SfpInstance) -> FormulationModel:
    from ..separation import sedc_family

    K = inst.K
    prog = LpProgram(f"sedc:{inst.name}")
    vm = VarMap(prog)
    add_edge_vars(vm, inst)
    for k in range(K):
        add_arc_vars(vm, inst, ("y", k))
    _parent_columns(vm, inst)
    for e, (i, j, _) in enumerate(inst.graph.edges):
        terms: dict[tuple, float] = {("x", e): -1.0}
        for k in range(K):
            terms[("y", k, i, j)] = 1.0
            terms[("y", k, j, i)] = 1.0
        prog.add_row(vm.row(terms, LE, 0))
    _parent_rows(vm, inst)
    return FormulationModel(Kind.SEDC, inst, prog, vm, [sedc_family()])
