"""Fully directed flow model with root-to-terminal commodities.

Commodity ``(r^l, t)`` exists for every terminal ``t`` other than the first
root and every ``l <= tau(t)``, except the empty self pair ``(r^k, r^k)``.
A terminal may draw its unit of flow from several lower-index roots, as long
as each such root also reaches the terminal's own root.  Orientation
consistency is enforced over every choice of one commodity per root.
:data:`MAX_CHOICES` and :data:`MAX_ROWS` guard the build.
"""

from __future__ import annotations

import math
from itertools import product

from ..instance import SfpInstance
from ..lp import EQ, GE, LE, LpProgram
from .base import BuildRefused, FormulationModel, Kind, VarMap, add_arc_vars, add_edge_vars, flow_conservation

MAX_CHOICES = 100_000
MAX_ROWS = 1_000_000


def index_sets(inst: SfpInstance) -> tuple[list[tuple[int, int]], list[list[tuple[int, int]]]]:
    """Commodities ``D`` and, per root, the commodities it sources."""
    first = inst.roots[0]
    commodities = []
    for k in range(inst.K):
        for t in inst.terminal_sets[k]:
            if t == first:
                continue
            for l in range(k + 1):
                if inst.roots[l] != t:
                    commodities.append((inst.roots[l], t))
    by_root = [[c for c in commodities if c[0] == r] for r in inst.roots]
    return commodities, by_root


def choice_count(inst: SfpInstance) -> int:
    _, by_root = index_sets(inst)
    return math.prod(len(o) for o in by_root)


def static_row_count(inst: SfpInstance, expanded: bool = False) -> int:
    commodities, by_root = index_sets(inst)
    m, n, K = inst.graph.edge_count, inst.n, inst.K
    non_root = len(inst.non_root_terminals())
    cross = sum(inst.tau[t] for t in inst.non_root_terminals())
    base = len(commodities) * n + non_root + cross + m
    if expanded:
        choices = math.prod(len(o) for o in by_root)
        return base + 2 * m * choices + n * choices
    return base + len(commodities) * (2 * m + n) + 2 * m + n


def build_mr(inst: SfpInstance, expanded: bool = False) -> FormulationModel:
    """The directed flow model.

    The orientation rows range over every choice ``C`` of one commodity per
    root.  A sum over ``C`` is bounded for every ``C`` exactly when the sum
    over roots of the per-root maxima is, so by default each maximum gets a
    variable (``g`` per arc, ``h`` per node) and the model stays polynomial.
    ``expanded=True`` writes one row per choice instead; both have the same
    projection onto ``(x, y, f)``.
    """
    commodities, by_root = index_sets(inst)
    choices = math.prod(len(o) for o in by_root)
    if choices > MAX_CHOICES:
        raise BuildRefused(f"directed flow model refused: |C| = {choices} exceeds {MAX_CHOICES}")
    rows = static_row_count(inst, expanded)
    if rows > MAX_ROWS:
        raise BuildRefused(f"directed flow model refused: {rows} static rows (|C| = {choices}) exceed {MAX_ROWS}")

    g = inst.graph
    prog = LpProgram(f"mr:{inst.name}")
    vm = VarMap(prog)
    add_edge_vars(vm, inst)
    add_arc_vars(vm, inst, ("y",))
    for s, t in commodities:
        add_arc_vars(vm, inst, ("f", s, t))
        # a path from s to t never re-enters s or leaves t
        for i, j, _ in g.arcs():
            if j == s or i == t:
                col = vm[("f", s, t, i, j)]
                prog.set_bounds(col, 0.0, 0.0)

    for s, t in commodities:
        for i in range(inst.n):
            terms = flow_conservation(vm, inst, ("f", s, t), i)
            if i == s:
                prog.add_row(vm.row(terms, LE, 1))
            elif i == t:
                prog.add_row(vm.row(terms, GE, -1))
            else:
                prog.add_row(vm.row(terms, EQ, 0))

    adj = g.adjacency()

    def inflow(s: int, t: int, sign: float = 1.0) -> dict[tuple, float]:
        return {("f", s, t, nb, t): sign for nb, _ in adj[t]}

    for t in inst.non_root_terminals():
        k = inst.tau[t]
        terms: dict[tuple, float] = {}
        for l in range(k + 1):
            terms.update(inflow(inst.roots[l], t))
        prog.add_row(vm.row(terms, EQ, 1))
    # flow from a lower root to t needs as much flow to t's own root
    for t in inst.non_root_terminals():
        k = inst.tau[t]
        for l in range(k):
            terms = inflow(inst.roots[l], t)
            terms.update(inflow(inst.roots[l], inst.roots[k], -1.0))
            prog.add_row(vm.row(terms, LE, 0))

    if expanded:
        for choice in product(*by_root):
            for i, j, _ in g.arcs():
                prog.add_row(vm.row({("f", s, t, i, j): 1.0 for s, t in choice} | {("y", i, j): -1.0}, LE, 0))
    else:
        for k in range(inst.K):
            add_arc_vars(vm, inst, ("g", k))
            for s, t in by_root[k]:
                for i, j, _ in g.arcs():
                    prog.add_row(vm.row({("f", s, t, i, j): 1.0, ("g", k, i, j): -1.0}, LE, 0))
        for i, j, _ in g.arcs():
            terms = {("g", k, i, j): 1.0 for k in range(inst.K)}
            terms[("y", i, j)] = -1.0
            prog.add_row(vm.row(terms, LE, 0))
    for e, (i, j, _) in enumerate(g.edges):
        prog.add_row(vm.row({("y", i, j): 1, ("y", j, i): 1, ("x", e): -1}, LE, 0))
    if expanded:
        for choice in product(*by_root):
            for j in range(inst.n):
                terms = {("f", s, t, i, j): 1.0 for s, t in choice for i, _ in adj[j]}
                if terms:
                    prog.add_row(vm.row(terms, LE, 1))
    else:
        for k in range(inst.K):
            for j in range(inst.n):
                vm.add(("h", k, j))
                for s, t in by_root[k]:
                    terms = {("f", s, t, i, j): 1.0 for i, _ in adj[j]}
                    terms[("h", k, j)] = -1.0
                    prog.add_row(vm.row(terms, LE, 0))
        for j in range(inst.n):
            prog.add_row(vm.row({("h", k, j): 1.0 for k in range(inst.K)}, LE, 1))
    info = {"commodities": commodities, "by_root": by_root, "choices": choices, "expanded": expanded}
    return FormulationModel(Kind.MR, inst, prog, vm, [], info)
