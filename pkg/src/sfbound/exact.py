"""Integer optima for small instances: enumeration and LP-based branch-and-bound."""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass
from typing import Iterable

from . import lp
from .formulations import Kind, build
from .graph import connected_components, is_acyclic
from .instance import SfpInstance

BRUTE_FORCE_EDGES = 16
INTEGRAL_TOL = 1e-6


@dataclass(frozen=True)
class Forest:
    edges: tuple[int, ...]
    cost: float
    feasible: bool


@dataclass(frozen=True)
class ExactResult:
    value: float
    witness: Forest | None
    optimal: bool
    method: str
    nodes: int = 0


@dataclass(frozen=True)
class ExactLimits:
    time: float = 600.0
    nodes: int = 200_000


def check_feasible(inst: SfpInstance, edges: Iterable[int]) -> Forest:
    """Verdict on an edge subset: acyclic and every terminal set inside one component."""
    edges = tuple(sorted(set(int(e) for e in edges)))
    g = inst.graph
    for e in edges:
        if not 0 <= e < g.edge_count:
            raise ValueError(f"edge id {e} out of range")
    cost = float(sum(g.edges[e][2] for e in edges))
    if not is_acyclic(g, edges):
        return Forest(edges, cost, False)
    comp = {}
    for c, nodes in enumerate(connected_components(g, edges)):
        for v in nodes:
            comp[v] = c
    ok = all(len({comp[v] for v in s}) == 1 for s in inst.terminal_sets)
    return Forest(edges, cost, ok)


def brute_force(inst: SfpInstance) -> ExactResult:
    """Minimum over every acyclic edge subset (exponential in |E|)."""
    g = inst.graph
    m, n = g.edge_count, inst.n
    best: tuple[float, tuple[int, ...]] | None = None
    parent = list(range(n))

    def find(v):
        while parent[v] != v:
            v = parent[v]
        return v

    def sets_connected() -> bool:
        return all(len({find(v) for v in s}) == 1 for s in inst.terminal_sets)

    chosen: list[int] = []

    def walk(e: int, cost: float):
        nonlocal best
        if e == m:
            if sets_connected() and (best is None or cost < best[0]):
                best = (cost, tuple(chosen))
            return
        walk(e + 1, cost)
        u, v, c = g.edges[e]
        ru, rv = find(u), find(v)
        if ru != rv:
            # union without path compression so it can be undone
            parent[ru] = rv
            chosen.append(e)
            walk(e + 1, cost + c)
            chosen.pop()
            parent[ru] = ru

    walk(0, 0.0)
    if best is None:
        return ExactResult(float("inf"), None, True, "brute-force")
    return ExactResult(best[0], check_feasible(inst, best[1]), True, "brute-force")


def _prune_forest(inst: SfpInstance, edges: set[int]) -> list[int]:
    """Spanning forest of ``edges`` by cost with non-terminal leaves stripped."""
    g = inst.graph
    parent = list(range(inst.n))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    keep = []
    for e in sorted(edges, key=lambda e: (g.edges[e][2], e)):
        u, v, _ = g.edges[e]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            keep.append(e)
    terminals = inst.terminals
    keep_set = set(keep)
    changed = True
    while changed:
        changed = False
        deg = [0] * inst.n
        for e in keep_set:
            u, v, _ = g.edges[e]
            deg[u] += 1
            deg[v] += 1
        for e in sorted(keep_set):
            u, v, _ = g.edges[e]
            if (deg[u] == 1 and u not in terminals) or (deg[v] == 1 and v not in terminals):
                keep_set.discard(e)
                changed = True
                break
    return sorted(keep_set)


def shortest_path_heuristic(inst: SfpInstance) -> Forest | None:
    """Union of shortest root-to-terminal paths, reduced to a forest."""
    g = inst.graph
    adj = g.adjacency()
    used: set[int] = set()
    for k in range(inst.K):
        r = inst.roots[k]
        dist = {r: 0.0}
        via: dict[int, int] = {}
        heap = [(0.0, r)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist.get(u, float("inf")):
                continue
            for v, e in adj[u]:
                nd = d + g.edges[e][2]
                if nd < dist.get(v, float("inf")):
                    dist[v] = nd
                    via[v] = e
                    heapq.heappush(heap, (nd, v))
        for t in inst.non_root(k):
            if t not in dist:
                return None
            v = t
            while v != r:
                e = via[v]
                used.add(e)
                a, b, _ = g.edges[e]
                v = a if b == v else b
    forest = check_feasible(inst, _prune_forest(inst, used))
    return forest if forest.feasible else None


def branch_and_bound(inst: SfpInstance, limits: ExactLimits = ExactLimits(), backend: str = "auto") -> ExactResult:
    """Depth-first branch-and-bound on edge inclusion with the UC cutting-plane bound.

    Branching picks the fractional edge of largest LP value (lowest index on
    ties) and explores the include branch first.  Cuts found anywhere are kept
    for every later node, since they are valid globally.
    """
    start = time.perf_counter()
    g = inst.graph
    model = build(inst, Kind.UC)
    prog = model.program
    cols = [model.varmap[("x", e)] for e in range(g.edge_count)]
    incumbent = shortest_path_heuristic(inst)
    best = incumbent.cost if incumbent else float("inf")
    stack: list[dict[int, int]] = [{}]
    nodes = 0
    complete = True
    warm = None
    while stack:
        if nodes >= limits.nodes or time.perf_counter() - start > limits.time:
            complete = False
            break
        fix = stack.pop()
        nodes += 1
        for e, j in enumerate(cols):
            v = fix.get(e)
            prog.set_bounds(j, 0.0 if v is None else float(v), 1.0 if v is None else float(v))
        # each node starts from the basis of the last node solved, not from scratch
        sol = lp.rebound_and_resolve(prog, warm, backend) if warm is not None else lp.solve(prog, backend)
        while sol.optimal and sol.objective < best - 1e-9:
            cuts = model.lazy[0].separate(model, sol.x)
            if not cuts:
                break
            sol = lp.add_rows_and_resolve(prog, sol, [c.row for c in cuts], backend)
        if sol.optimal:
            warm = sol
        if not sol.optimal or sol.objective >= best - 1e-9:
            continue
        x = [sol.x[j] for j in cols]
        frac = [e for e in range(g.edge_count) if INTEGRAL_TOL < x[e] < 1 - INTEGRAL_TOL]
        if not frac:
            chosen = {e for e in range(g.edge_count) if x[e] > 0.5}
            forest = check_feasible(inst, _prune_forest(inst, chosen))
            if forest.feasible and forest.cost < best:
                best, incumbent = forest.cost, forest
            continue
        e = max(frac, key=lambda f: (x[f], -f))
        stack.append({**fix, e: 0})
        stack.append({**fix, e: 1})
    for j in cols:
        prog.set_bounds(j, 0.0, 1.0)
    return ExactResult(best, incumbent, complete, "branch-and-bound", nodes)


def integer_optimum(inst: SfpInstance, limits: ExactLimits = ExactLimits(), method: str = "auto") -> ExactResult:
    """Optimum Steiner Forest cost with a witness.

    ``method`` is ``"brute-force"``, ``"branch-and-bound"`` or ``"auto"``
    (enumeration up to 16 edges).  When a limit stops the search the best
    forest found is returned with ``optimal=False``.
    """
    if method == "auto":
        method = "brute-force" if inst.graph.edge_count <= BRUTE_FORCE_EDGES else "branch-and-bound"
    if method == "brute-force":
        return brute_force(inst)
    if method == "branch-and-bound":
        return branch_and_bound(inst, limits)
    raise ValueError(f"unknown method {method!r}")
