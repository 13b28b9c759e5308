"""Steiner Forest instances: model, canonical form, text format and generator."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .graph import Graph


class ParseError(ValueError):
    """Malformed instance text; ``lineno`` is 1-based."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class SfpInstance:
    """A canonical Steiner Forest instance.

    Terminal sets are pairwise disjoint, each has at least two nodes and a
    root that belongs to it.  The order of ``terminal_sets`` is the set index
    used by every index-dependent formulation.
    """

    graph: Graph
    terminal_sets: tuple[tuple[int, ...], ...]
    roots: tuple[int, ...]
    name: str = "instance"
    coords: tuple[tuple[float, float], ...] | None = None
    tau: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        sets = tuple(tuple(sorted(int(v) for v in s)) for s in self.terminal_sets)
        roots = tuple(int(r) for r in self.roots)
        object.__setattr__(self, "terminal_sets", sets)
        object.__setattr__(self, "roots", roots)
        if len(sets) != len(roots):
            raise ValueError("one root per terminal set is required")
        tau = {}
        for k, (s, r) in enumerate(zip(sets, roots)):
            if len(s) < 2:
                raise ValueError(f"terminal set {k} has fewer than two nodes")
            if r not in s:
                raise ValueError(f"root {r} is not in terminal set {k}")
            for v in s:
                if not 0 <= v < self.graph.node_count:
                    raise ValueError(f"terminal {v} is not a node")
                if v in tau:
                    raise ValueError(f"terminal {v} appears in sets {tau[v]} and {k}")
                tau[v] = k
        object.__setattr__(self, "tau", tau)

    @property
    def K(self) -> int:
        return len(self.terminal_sets)

    @property
    def n(self) -> int:
        return self.graph.node_count

    @property
    def terminals(self) -> frozenset[int]:
        return frozenset(self.tau)

    @property
    def steiner_nodes(self) -> frozenset[int]:
        return frozenset(range(self.n)) - self.terminals

    @property
    def root_set(self) -> frozenset[int]:
        return frozenset(self.roots)

    def non_root(self, k: int) -> tuple[int, ...]:
        """T^k without its root."""
        return tuple(v for v in self.terminal_sets[k] if v != self.roots[k])

    def non_root_terminals(self) -> list[int]:
        """All terminals that are not roots, in set-then-node order."""
        return [t for k in range(self.K) for t in self.non_root(k)]

    def terminals_from(self, k: int) -> list[int]:
        """Union of T^k..T^K without r^k, in set-then-node order."""
        return [t for l in range(k, self.K) for t in self.terminal_sets[l] if t != self.roots[k]]


@dataclass(frozen=True)
class TerminalPairs:
    """The pairs ``(r^k, t)`` for ``t`` in ``T^k`` minus its root, with distances."""

    pairs: tuple[tuple[int, int], ...]
    set_index: tuple[int, ...]
    dist: tuple[float, ...]

    @property
    def L(self) -> int:
        return len(self.pairs)

    @property
    def applicable(self) -> bool:
        """False when some pair is disconnected (infinite distance)."""
        return all(math.isfinite(d) for d in self.dist)

    def index_of_terminal(self) -> dict[int, int]:
        """Highest pair index each terminal takes part in."""
        out: dict[int, int] = {}
        for l, (s, t) in enumerate(self.pairs):
            out[s] = l
            out[t] = l
        return out


def canonicalize(
    graph: Graph,
    terminal_sets: Sequence[Iterable[int]],
    roots: Sequence[int | None] | None = None,
    name: str = "instance",
    coords=None,
) -> SfpInstance:
    """Merge overlapping sets, drop singletons and pick roots.

    Overlapping sets are merged transitively; the merged set takes the
    position of its lowest-index constituent and, when roots are given,
    that constituent's root.  Otherwise the root is the lowest node id.
    """
    raw = [set(int(v) for v in s) for s in terminal_sets]
    for k, s in enumerate(raw):
        if not s:
            raise ValueError(f"terminal set {k} is empty")
        for v in s:
            if not 0 <= v < graph.node_count:
                raise ValueError(f"terminal set {k} contains invalid node {v}")
    if roots is not None:
        if len(roots) != len(raw):
            raise ValueError("roots must match terminal sets one-to-one")
        for k, r in enumerate(roots):
            if r is not None and r not in raw[k]:
                raise ValueError(f"root {r} is not in terminal set {k}")

    parent = list(range(len(raw)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner: dict[int, int] = {}
    for k, s in enumerate(raw):
        for v in s:
            if v in owner:
                a, b = find(owner[v]), find(k)
                if a != b:
                    parent[max(a, b)] = min(a, b)
            else:
                owner[v] = k

    merged: dict[int, set[int]] = {}
    for k, s in enumerate(raw):
        merged.setdefault(find(k), set()).update(s)

    sets, chosen = [], []
    for lead in sorted(merged):
        s = merged[lead]
        if len(s) < 2:
            continue
        r = roots[lead] if roots is not None and roots[lead] is not None else min(s)
        sets.append(tuple(sorted(s)))
        chosen.append(r)
    if coords is not None:
        coords = tuple((float(x), float(y)) for x, y in coords)
    return SfpInstance(graph, tuple(sets), tuple(chosen), name=name, coords=coords)


def shortest_distances(inst: SfpInstance) -> TerminalPairs:
    """Shortest-path distance between every root and the other members of its set."""
    g = inst.graph
    pairs, owner = [], []
    for k in range(inst.K):
        for t in inst.non_root(k):
            pairs.append((inst.roots[k], t))
            owner.append(k)
    if not pairs:
        return TerminalPairs((), (), ())
    if g.edge_count:
        u = [a for a, _, _ in g.edges] + [b for _, b, _ in g.edges]
        v = [b for _, b, _ in g.edges] + [a for a, _, _ in g.edges]
        # zero-cost edges must survive the sparse representation
        w = [max(c, 1e-300) for c in g.costs] * 2
        mat = csr_matrix((w, (u, v)), shape=(g.node_count, g.node_count))
    else:
        mat = csr_matrix((g.node_count, g.node_count))
    sources = sorted({s for s, _ in pairs})
    table = dijkstra(mat, directed=True, indices=sources)
    row = {s: i for i, s in enumerate(sources)}
    dist = []
    for s, t in pairs:
        d = float(table[row[s], t])
        dist.append(d if d > 1e-200 else 0.0)
    return TerminalPairs(tuple(pairs), tuple(owner), tuple(dist))


def generate(n: int, k: int, p: float, alpha: float, seed: int) -> SfpInstance:
    """Random geometric instance with a spanning-tree backbone.

    Nodes are uniform in the unit square; nodes closer than ``alpha/sqrt(n)``
    are joined, and a Euclidean minimum spanning tree is added so the graph
    is connected.  ``ceil(p*n)`` terminals are drawn, shuffled and split into
    ``k`` contiguous groups of at least two nodes each.
    """
    m = math.ceil(p * n - 1e-12)
    if n < 4 or k < 2 or not 0 < p <= 1 or m < 2 * k:
        raise ValueError(f"invalid generator parameters n={n} k={k} p={p} (need n>=4, k>=2, 0<p<=1, ceil(p*n)>=2k)")
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2))
    diff = pts[:, None, :] - pts[None, :, :]
    d = np.sqrt((diff**2).sum(axis=2))
    radius = alpha / math.sqrt(n)

    chosen = {(i, j) for i in range(n) for j in range(i + 1, n) if d[i, j] < radius}
    chosen.update(_euclidean_mst(d))
    edges = tuple((i, j, float(d[i, j])) for i, j in sorted(chosen))
    graph = Graph(n, edges)

    terminals = rng.choice(n, size=m, replace=False)
    rng.shuffle(terminals)
    sizes = _split_sizes(rng, m, k)
    sets, start = [], 0
    for size in sizes:
        sets.append([int(v) for v in terminals[start : start + size]])
        start += size
    name = f"n{n}-k{k}-p{p:g}-a{alpha:g}-s{seed}"
    return canonicalize(graph, sets, name=name, coords=[tuple(map(float, q)) for q in pts])


def _euclidean_mst(d: np.ndarray) -> list[tuple[int, int]]:
    n = d.shape[0]
    order = sorted((float(d[i, j]), i, j) for i in range(n) for j in range(i + 1, n))
    parent = list(range(n))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    out = []
    for _, i, j in order:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            out.append((i, j))
            if len(out) == n - 1:
                break
    return out


def _split_sizes(rng: np.random.Generator, m: int, k: int) -> list[int]:
    # Uniform over cut sets in {2..m} whose blocks all have >= 2 members:
    # remove the mandatory 2 per block and place k-1 bars among the rest.
    slack = m - 2 * k
    bars = np.sort(rng.choice(slack + k - 1, size=k - 1, replace=False))
    sizes, prev = [], -1
    for b in list(bars) + [slack + k - 1]:
        sizes.append(int(b - prev - 1) + 2)
        prev = b
    return sizes


# -- text format -----------------------------------------------------------


def _fmt(x: float) -> str:
    if float(x).is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def serialize(inst: SfpInstance) -> str:
    lines = [f"name {inst.name}", f"nodes {inst.n}"]
    if inst.coords is not None:
        for v, (x, y) in enumerate(inst.coords):
            lines.append(f"coord {v} {_fmt(x)} {_fmt(y)}")
    for u, v, c in inst.graph.edges:
        lines.append(f"edge {u} {v} {_fmt(c)}")
    lines.append(f"terminals {inst.K}")
    for s, r in zip(inst.terminal_sets, inst.roots):
        lines.append("set " + " ".join(str(v) for v in [r] + [v for v in s if v != r]))
    return "\n".join(lines) + "\n"


def parse(text: str, name: str | None = None) -> SfpInstance:
    n = None
    inst_name = name or "instance"
    coords: dict[int, tuple[float, float]] = {}
    edges = []
    sets, roots = [], []
    expected_sets = None

    def node(tok, lineno):
        try:
            v = int(tok)
        except ValueError:
            raise ParseError(lineno, f"bad node id {tok!r}") from None
        if n is None:
            raise ParseError(lineno, "'nodes' must come first")
        if not 0 <= v < n:
            raise ParseError(lineno, f"node {v} outside [0, {n})")
        return v

    def number(tok, lineno):
        try:
            return float(tok)
        except ValueError:
            raise ParseError(lineno, f"bad number {tok!r}") from None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        key, args = tok[0], tok[1:]
        if key == "name":
            if name is None:
                inst_name = " ".join(args)
        elif key == "nodes":
            if len(args) != 1 or n is not None:
                raise ParseError(lineno, "expected a single 'nodes <n>'")
            try:
                n = int(args[0])
            except ValueError:
                raise ParseError(lineno, f"bad node count {args[0]!r}") from None
            if n < 1:
                raise ParseError(lineno, "node count must be positive")
        elif key == "coord":
            if len(args) != 3:
                raise ParseError(lineno, "expected 'coord <v> <x> <y>'")
            coords[node(args[0], lineno)] = (number(args[1], lineno), number(args[2], lineno))
        elif key == "edge":
            if len(args) != 3:
                raise ParseError(lineno, "expected 'edge <u> <v> <cost>'")
            u, v, c = node(args[0], lineno), node(args[1], lineno), number(args[2], lineno)
            if u == v:
                raise ParseError(lineno, "self-loop")
            if c < 0:
                raise ParseError(lineno, "negative cost")
            edges.append((u, v, c))
        elif key == "terminals":
            if len(args) != 1:
                raise ParseError(lineno, "expected 'terminals <k>'")
            expected_sets = int(args[0])
        elif key == "set":
            if expected_sets is None:
                raise ParseError(lineno, "'set' before 'terminals'")
            if not args:
                raise ParseError(lineno, "empty terminal set")
            members = [node(a, lineno) for a in args]
            sets.append(members)
            roots.append(members[0])
        else:
            raise ParseError(lineno, f"unknown directive {key!r}")

    if n is None:
        raise ParseError(0, "missing 'nodes' line")
    if expected_sets is not None and expected_sets != len(sets):
        raise ParseError(0, f"declared {expected_sets} terminal sets, found {len(sets)}")
    try:
        graph = Graph(n, tuple(edges))
    except ValueError as exc:
        raise ParseError(0, str(exc)) from None
    pts = None
    if coords:
        if len(coords) != n:
            raise ParseError(0, "coordinates must be given for all nodes or none")
        pts = [coords[v] for v in range(n)]
    return canonicalize(graph, sets, roots, name=inst_name, coords=pts)


def read(path) -> SfpInstance:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def write(inst: SfpInstance, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize(inst))


FIXTURES = ("A", "B", "C")


def fixture_text(label: str) -> str:
    return resources.files("sfbound.data").joinpath(f"inst{label}.sfp").read_text(encoding="utf-8")


def fixture(label: str) -> SfpInstance:
    """One of the three unit-cost example instances ``"A"``, ``"B"``, ``"C"``."""
    return parse(fixture_text(label))
