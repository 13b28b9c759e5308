"""Undirected graphs, flow networks and a deterministic max-flow/min-cut.

Every separation routine in the package reduces to :func:`min_cut` on a small
:class:`FlowNetwork`, so the implementation favours predictable behaviour over
raw speed: a level-graph (Dinic) blocking-flow method with adjacency lists kept
in insertion order.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

#: residual capacities at or below this value are treated as saturated
FLOW_EPS = 1e-9


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph with non-negative edge costs.

    ``edges`` keeps the input order; edge ``e`` is referred to by its position.
    """

    node_count: int
    edges: tuple[tuple[int, int, float], ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.node_count < 1:
            raise ValueError("graph needs at least one node")
        edges = tuple((int(u), int(v), float(c)) for u, v, c in self.edges)
        index = {}
        for e, (u, v, c) in enumerate(edges):
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise ValueError(f"edge {e} ({u}, {v}) has an endpoint outside [0, {self.node_count})")
            if u == v:
                raise ValueError(f"edge {e} is a self-loop at node {u}")
            if not c >= 0 or math.isinf(c):
                raise ValueError(f"edge {e} has invalid cost {c}")
            key = (min(u, v), max(u, v))
            if key in index:
                raise ValueError(f"edge {e} duplicates edge {index[key]}")
            index[key] = e
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "_index", index)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def costs(self) -> list[float]:
        return [c for _, _, c in self.edges]

    def edge_id(self, u: int, v: int) -> int:
        """Index of edge ``{u, v}``; raises ``KeyError`` if absent."""
        return self._index[(min(u, v), max(u, v))]

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self._index

    def arcs(self) -> list[tuple[int, int, int]]:
        """Both orientations of every edge as ``(tail, head, edge id)``.

        Arc ``2e`` is ``(u, v)`` and arc ``2e + 1`` is ``(v, u)`` for edge
        ``e = (u, v, c)``.
        """
        out = []
        for e, (u, v, _) in enumerate(self.edges):
            out.append((u, v, e))
            out.append((v, u, e))
        return out

    def adjacency(self) -> list[list[tuple[int, int]]]:
        """Per node, the list of ``(neighbour, edge id)`` in edge order."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.node_count)]
        for e, (u, v, _) in enumerate(self.edges):
            adj[u].append((v, e))
            adj[v].append((u, e))
        return adj

    def cut_edges(self, side: Iterable[int]) -> list[int]:
        """Edges with exactly one endpoint in ``side`` (the cut delta(S))."""
        s = set(side)
        return [e for e, (u, v, _) in enumerate(self.edges) if (u in s) != (v in s)]

    def induced_edges(self, side: Iterable[int]) -> list[int]:
        """Edges with both endpoints in ``side`` (E[S])."""
        s = set(side)
        return [e for e, (u, v, _) in enumerate(self.edges) if u in s and v in s]


class FlowNetwork:
    """Directed network with real capacities.

    ``math.inf`` capacities are replaced by a sentinel of ``1 + sum of all
    finite capacities`` when a cut is computed, so any cut that crosses an
    infinite arc is strictly more expensive than every finite cut.
    """

    def __init__(self, node_count: int):
        if node_count < 1:
            raise ValueError("flow network needs at least one node")
        self.node_count = node_count
        self.tails: list[int] = []
        self.heads: list[int] = []
        self.caps: list[float] = []

    def add_arc(self, tail: int, head: int, capacity: float) -> int:
        if not (0 <= tail < self.node_count and 0 <= head < self.node_count):
            raise ValueError(f"arc ({tail}, {head}) outside [0, {self.node_count})")
        if not capacity >= 0:
            raise ValueError(f"negative or NaN capacity {capacity}")
        self.tails.append(tail)
        self.heads.append(head)
        self.caps.append(float(capacity))
        return len(self.caps) - 1

    def add_node(self) -> int:
        self.node_count += 1
        return self.node_count - 1

    @property
    def arc_count(self) -> int:
        return len(self.caps)

    def infinity(self) -> float:
        return 1.0 + sum(c for c in self.caps if not math.isinf(c))

    def finite_caps(self) -> list[float]:
        big = self.infinity()
        return [big if math.isinf(c) else c for c in self.caps]

    def cut_capacity(self, source_side: Iterable[int]) -> float:
        s = set(source_side)
        caps = self.finite_caps()
        return sum(c for a, c in enumerate(caps) if self.tails[a] in s and self.heads[a] not in s)


def _max_flow(net: FlowNetwork, source: int, sink: int):
    n = net.node_count
    if not (0 <= source < n and 0 <= sink < n):
        raise ValueError(f"source/sink ({source}, {sink}) outside [0, {n})")
    if source == sink:
        raise ValueError("source and sink must differ")

    caps = net.finite_caps()
    m = len(caps)
    # residual arcs: 2a forward, 2a+1 backward
    head = [0] * (2 * m)
    res = [0.0] * (2 * m)
    adj: list[list[int]] = [[] for _ in range(n)]
    for a in range(m):
        t, h = net.tails[a], net.heads[a]
        head[2 * a] = h
        head[2 * a + 1] = t
        res[2 * a] = caps[a]
        adj[t].append(2 * a)
        adj[h].append(2 * a + 1)

    total = 0.0
    while True:
        level = _levels(adj, head, res, source, n)
        if level[sink] < 0:
            break
        total += _blocking_flow(adj, head, res, level, source, sink)
    return total, adj, head, res


def min_cut(net: FlowNetwork, source: int, sink: int) -> tuple[float, frozenset[int]]:
    """Maximum ``source``-``sink`` flow value and a minimum cut.

    Returns the flow value and the set of nodes reachable from ``source`` in
    the final residual network, which is the unique inclusion-minimal source
    side of a minimum cut.  The network itself is not modified.
    """
    total, adj, head, res = _max_flow(net, source, sink)
    seen = _levels(adj, head, res, source, net.node_count)
    return total, frozenset(v for v in range(net.node_count) if seen[v] >= 0)


def extreme_min_cuts(net: FlowNetwork, source: int, sink: int) -> tuple[float, frozenset[int], frozenset[int]]:
    """Flow value plus the inclusion-minimal and inclusion-maximal minimum-cut source sides.

    The maximal side is everything that cannot reach ``sink`` in the final
    residual network.  Both sides come from the same maximum flow.
    """
    n = net.node_count
    total, adj, head, res = _max_flow(net, source, sink)
    seen = _levels(adj, head, res, source, n)
    small = frozenset(v for v in range(n) if seen[v] >= 0)
    reach = [False] * n
    reach[sink] = True
    queue = deque([sink])
    while queue:
        w = queue.popleft()
        for a in adj[w]:
            u = head[a]
            # residual arc u -> w is the partner of a
            if not reach[u] and res[a ^ 1] > FLOW_EPS:
                reach[u] = True
                queue.append(u)
    large = frozenset(v for v in range(n) if not reach[v])
    return total, small, large


def _levels(adj, head, res, source, n):
    level = [-1] * n
    level[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for a in adj[u]:
            v = head[a]
            if level[v] < 0 and res[a] > FLOW_EPS:
                level[v] = level[u] + 1
                queue.append(v)
    return level


def _blocking_flow(adj, head, res, level, s, t):
    it = [0] * len(adj)
    total = 0.0
    path: list[int] = []
    u = s
    while True:
        if u == t:
            f = min(res[a] for a in path)
            for a in path:
                res[a] -= f
                res[a ^ 1] += f
            total += f
            path.clear()
            u = s
            continue
        arcs = adj[u]
        advanced = False
        while it[u] < len(arcs):
            a = arcs[it[u]]
            v = head[a]
            if res[a] > FLOW_EPS and level[v] == level[u] + 1:
                path.append(a)
                u = v
                advanced = True
                break
            it[u] += 1
        if advanced:
            continue
        if u == s:
            return total
        level[u] = -1
        a = path.pop()
        u = head[a ^ 1]
        it[u] += 1


def connected_components(g: Graph, active_edges: Iterable[int]) -> list[frozenset[int]]:
    """Partition of the nodes induced by ``active_edges``, ordered by smallest member."""
    parent = list(range(g.node_count))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in active_edges:
        u, v, _ = g.edges[e]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    groups: dict[int, set[int]] = {}
    for v in range(g.node_count):
        groups.setdefault(find(v), set()).add(v)
    return [frozenset(groups[r]) for r in sorted(groups)]


def is_acyclic(g: Graph, edge_ids: Sequence[int]) -> bool:
    parent = list(range(g.node_count))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in edge_ids:
        u, v, _ = g.edges[e]
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True
