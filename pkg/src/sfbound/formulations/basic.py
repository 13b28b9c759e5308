"""Per-set flow and cut models, undirected and directed."""

from __future__ import annotations

from ..instance import SfpInstance, shortest_distances
from ..lp import EQ, LE, LpProgram
from .base import BuildRefused, FormulationModel, Kind, VarMap, add_arc_vars, add_edge_vars, flow_conservation


def _flow_columns(vm: VarMap, inst: SfpInstance) -> None:
    for t in inst.non_root_terminals():
        add_arc_vars(vm, inst, ("f", t))


def _conservation_rows(vm: VarMap, inst: SfpInstance) -> None:
    # one unit from r^tau(t) to t, per non-root terminal t
    for t in inst.non_root_terminals():
        r = inst.roots[inst.tau[t]]
        for i in range(inst.n):
            rhs = 1.0 if i == r else -1.0 if i == t else 0.0
            vm.prog.add_row(vm.row(flow_conservation(vm, inst, ("f", t), i), EQ, rhs))


def build_uf(inst: SfpInstance) -> FormulationModel:
    prog = LpProgram(f"uf:{inst.name}")
    vm = VarMap(prog)
    add_edge_vars(vm, inst)
    _flow_columns(vm, inst)
    _conservation_rows(vm, inst)
    for t in inst.non_root_terminals():
        for e, (i, j, _) in enumerate(inst.graph.edges):
            prog.add_row(vm.row({("f", t, i, j): 1, ("f", t, j, i): 1, ("x", e): -1}, LE, 0))
    return FormulationModel(Kind.UF, inst, prog, vm)


def build_df(inst: SfpInstance) -> FormulationModel:
    prog = LpProgram(f"df:{inst.name}")
    vm = VarMap(prog)
    add_edge_vars(vm, inst)
    _flow_columns(vm, inst)
    _conservation_rows(vm, inst)
    # flows of one set agree on every edge orientation; ordered pairs with
    # s == t included, so both orientations of each edge are covered
    for k in range(inst.K):
        ts = inst.non_root(k)
        for e, (i, j, _) in enumerate(inst.graph.edges):
            for s in ts:
                for t in ts:
                    terms = {("f", s, i, j): 1.0, ("x", e): -1.0}
                    terms[("f", t, j, i)] = terms.get(("f", t, j, i), 0.0) + 1.0
                    prog.add_row(vm.row(terms, LE, 0))
    return FormulationModel(Kind.DF, inst, prog, vm)


def build_uc(inst: SfpInstance) -> FormulationModel:
    from ..separation import uc_family

    prog = LpProgram(f"uc:{inst.name}")
    vm = VarMap(prog)
    add_edge_vars(vm, inst)
    return FormulationModel(Kind.UC, inst, prog, vm, [uc_family()])


def build_dc(inst: SfpInstance) -> FormulationModel:
    from ..separation import dc_family

    prog = LpProgram(f"dc:{inst.name}")
    vm = VarMap(prog)
    add_edge_vars(vm, inst)
    for k in range(inst.K):
        add_arc_vars(vm, inst, ("y", k))
    for k in range(inst.K):
        for e, (i, j, _) in enumerate(inst.graph.edges):
            prog.add_row(vm.row({("y", k, i, j): 1, ("y", k, j, i): 1, ("x", e): -1}, LE, 0))
    return FormulationModel(Kind.DC, inst, prog, vm, [dc_family()])


def build_klsvz(inst: SfpInstance) -> FormulationModel:
    from ..separation import klsvz_family

    pairs = shortest_distances(inst)
    if not pairs.applicable:
        raise BuildRefused("lifted cut model needs every terminal pair connected (infinite distance)")
    prog = LpProgram(f"klsvz:{inst.name}")
    vm = VarMap(prog)
    add_edge_vars(vm, inst)
    for l, d in enumerate(pairs.dist):
        vm.add(("yl", l), 0.0, 1.0, d)
    for l, d in enumerate(pairs.dist):
        vm.add(("ybar", l), 0.0, 1.0, d)
    return FormulationModel(Kind.KLSVZ, inst, prog, vm, [klsvz_family()], {"pairs": pairs})

