"""Exact separation oracles for the lazily generated constraint families.

Every oracle works on plain value arrays (edge values indexed like
``graph.edges``, arc values indexed like ``graph.arcs()``) and returns
:class:`ViolatedCut` objects.  When a :class:`VarMap` is passed the cuts also
carry the LP row.  Cut families whose index is a (root, terminal) pair return
the two extreme minimum cuts of that pair, the source side closest to the
root and the one closest to the terminal; both are most violated, and adding
both speeds the cutting-plane loop up considerably.  Other families return
one most violated cut per index.  Rows are never duplicated within one call.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from .formulations.base import FormulationModel, LazyFamily, VarMap, ViolatedCut
from .graph import FlowNetwork, extreme_min_cuts, min_cut
from .instance import SfpInstance, TerminalPairs, shortest_distances
from .lp import GE

TOL = 1e-6


class _Collector:
    def __init__(self, varmap: VarMap | None):
        self.varmap = varmap
        self.cuts: list[ViolatedCut] = []
        self._seen: set = set()

    def offer(self, family, index, side, terms, rhs, value: Callable[[tuple], float]) -> ViolatedCut | None:
        """Keep the ``terms >= rhs`` row if ``value`` violates it by more than TOL."""
        terms = {k: float(a) for k, a in terms.items() if a != 0}
        lhs = sum(a * value(k) for k, a in terms.items())
        violation = rhs - lhs
        if violation <= TOL:
            return None
        key = (tuple(sorted(terms.items())), rhs)
        if key in self._seen:
            return None
        self._seen.add(key)
        row = self.varmap.row(terms, GE, rhs, f"{family}{list(index)}") if self.varmap is not None else None
        cut = ViolatedCut(family, tuple(index), frozenset(side), terms, GE, float(rhs), float(violation), row)
        self.cuts.append(cut)
        return cut


def _undirected_network(inst: SfpInstance, x) -> FlowNetwork:
    net = FlowNetwork(inst.n)
    for e, (u, v, _) in enumerate(inst.graph.edges):
        if x[e] > 0:
            net.add_arc(u, v, float(x[e]))
            net.add_arc(v, u, float(x[e]))
    return net


def _directed_network(inst: SfpInstance, y) -> FlowNetwork:
    net = FlowNetwork(inst.n)
    for a, (i, j, _) in enumerate(inst.graph.arcs()):
        if y[a] > 0:
            net.add_arc(i, j, float(y[a]))
    return net


def _multi_cut(
    net: FlowNetwork, sources, sinks, glue: Sequence[tuple[int, int]] = ()
) -> tuple[float, list[tuple[str, frozenset[int]]]] | None:
    """Min cut with ``sources`` on one side and ``sinks`` on the other.

    Each ``glue`` pair is kept on a common side.  Returns the value with the
    smallest and largest source sides, or None if the request is void.
    """
    sources, sinks = set(sources), set(sinks)
    if sources & sinks or not sources or not sinks:
        return None
    base = net.node_count
    big = FlowNetwork(base + 2)
    big.tails, big.heads, big.caps = list(net.tails), list(net.heads), list(net.caps)
    for u, v in glue:
        big.add_arc(u, v, math.inf)
        big.add_arc(v, u, math.inf)
    s, t = base, base + 1
    for a in sorted(sources):
        big.add_arc(s, a, math.inf)
    for b in sorted(sinks):
        big.add_arc(b, t, math.inf)
    value, sides = _extreme_sides(big, s, t)
    if math.isinf(value):
        return None
    return value, [(tag, frozenset(v for v in side if v < base)) for tag, side in sides]


def _extreme_sides(net: FlowNetwork, source: int, sink: int) -> tuple[float, list[tuple[str, frozenset[int]]]]:
    """Minimum cut value with its smallest and largest source sides (one if they coincide)."""
    value, small, large = extreme_min_cuts(net, source, sink)
    sides = [("near", small)]
    if large != small:
        sides.append(("far", large))
    return value, sides


def _edge_lookup(x) -> Callable[[tuple], float]:
    return lambda key: float(x[key[1]])


# -- undirected cut-set ------------------------------------------------------


def separate_uc(inst: SfpInstance, x, varmap: VarMap | None = None) -> list[ViolatedCut]:
    """``x(delta(S)) >= 1`` for every S holding a root but missing a member of its set."""
    x = np.asarray(x, dtype=float)
    net = _undirected_network(inst, x)
    out = _Collector(varmap)
    value = _edge_lookup(x)
    for k in range(inst.K):
        r = inst.roots[k]
        for t in inst.non_root(k):
            cut, sides = _extreme_sides(net, r, t)
            if cut < 1 - TOL:
                for tag, side in sides:
                    terms = {("x", e): 1.0 for e in inst.graph.cut_edges(side)}
                    out.offer("uc-cut", (k, t, tag), side, terms, 1.0, value)
    return out.cuts


# -- directed cut-set, one orientation per set ------------------------------


def separate_dc(inst: SfpInstance, y: Sequence, varmap: VarMap | None = None) -> list[ViolatedCut]:
    """``y^k(delta+(S)) >= 1`` for S holding r^k but missing a member of T^k."""
    arcs = inst.graph.arcs()
    out = _Collector(varmap)
    for k in range(inst.K):
        yk = np.asarray(y[k], dtype=float)
        net = _directed_network(inst, yk)
        pos = {(i, j): a for a, (i, j, _) in enumerate(arcs)}
        value = lambda key, yk=yk, pos=pos: float(yk[pos[(key[2], key[3])]])
        for t in inst.non_root(k):
            cut, sides = _extreme_sides(net, inst.roots[k], t)
            if cut < 1 - TOL:
                for tag, side in sides:
                    terms = {("y", k, i, j): 1.0 for i, j, _ in arcs if i in side and j not in side}
                    out.offer("dc-cut", (k, t, tag), side, terms, 1.0, value)
    return out.cuts


# -- lifted cuts with pair-connection variables -----------------------------


def separates(pairs: TerminalPairs, side) -> bool:
    """True if ``side`` holds exactly one end of some terminal pair."""
    return any((s in side) != (t in side) for s, t in pairs.pairs)


def separate_klsvz(
    inst: SfpInstance,
    pairs: TerminalPairs,
    x,
    y,
    ybar,
    varmap: VarMap | None = None,
) -> list[ViolatedCut]:
    """Both lifted cut families.

    A set that splits some terminal pair is charged to the highest such pair
    ``l`` and gets the row ``x(delta(S)) + y_l >= 1``; the search for pair
    ``l`` keeps every later pair on one side.  A set splitting no pair but
    holding terminals is charged to the highest pair ``l`` inside it and gets
    ``x(delta(S)) + y_l + ybar_l >= 1``; the search keeps every pair together
    and every terminal of a later pair outside, and when no such terminal
    exists tries each node that may be left out.
    """
    if not pairs.applicable:
        raise ValueError("lifted cut separation needs every terminal pair connected")
    x = np.asarray(x, dtype=float)
    net = _undirected_network(inst, x)
    out = _Collector(varmap)
    index = pairs.index_of_terminal()

    def value(key):
        if key[0] == "x":
            return float(x[key[1]])
        return float(y[key[1]] if key[0] == "yl" else ybar[key[1]])

    def emit(family, l, found, lifted):
        if found is None:
            return
        for tag, side in found[1]:
            terms = {("x", e): 1.0 for e in inst.graph.cut_edges(side)}
            terms[("yl", l)] = 1.0
            if lifted:
                terms[("ybar", l)] = 1.0
            out.offer(family, (l, tag), side, terms, 1.0, value)

    # connected groups of terminals when every pair is kept together
    group = {v: v for v in index}

    def find(v):
        while group[v] != v:
            group[v] = group[group[v]]
            v = group[v]
        return v

    for s, t in pairs.pairs:
        group[find(s)] = find(t)

    for l, (s, t) in enumerate(pairs.pairs):
        later = pairs.pairs[l + 1 :]
        if 1.0 - y[l] > TOL:
            found = _multi_cut(net, {s}, {t}, later)
            if found and found[0] < 1.0 - y[l] - TOL:
                emit("klsvz-1", l, found, False)
        if index[s] != l or index[t] != l or 1.0 - y[l] - ybar[l] <= TOL:
            continue
        outside = {v for v in index if index[v] > l}
        if outside:
            found = _multi_cut(net, {s, t}, outside, pairs.pairs)
        else:
            found = None
            for v in range(inst.n):
                if v in index and find(v) == find(s):
                    continue
                res = _multi_cut(net, {s, t}, {v}, pairs.pairs)
                if res and (found is None or res[0] < found[0] - 1e-12):
                    found = res
        if found and found[0] < 1.0 - y[l] - ybar[l] - TOL:
            emit("klsvz-2", l, found, True)
    return out.cuts


# -- subtour elimination ----------------------------------------------------


def separate_sec(
    inst: SfpInstance,
    x,
    y,
    layer: int | None = None,
    varmap: VarMap | None = None,
) -> list[ViolatedCut]:
    """``y(S) - x(E[S]) >= y_i`` for every S and anchor i in S.

    ``layer`` selects the variable names: ``("xk", k, e)`` and ``("yk", k, i)``
    for a layer of the per-set tree model, ``("x", e)`` and ``("y", i)`` for
    the single forest model (``layer=None``).  For each anchor a closure
    network finds the S maximising ``x(E[S]) - y(S - i)``.
    """
    g = inst.graph
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xkey = (lambda e: ("xk", layer, e)) if layer is not None else (lambda e: ("x", e))
    ykey = (lambda i: ("yk", layer, i)) if layer is not None else (lambda i: ("y", i))
    family = "lt-sec" if layer is not None else "et-sec"
    xs = {xkey(e): float(x[e]) for e in range(g.edge_count)}
    ys = {ykey(i): float(y[i]) for i in range(inst.n)}
    value = lambda key: xs[key] if key in xs else ys[key]
    support = [e for e in range(g.edge_count) if x[e] > 0]
    total = float(sum(x[e] for e in support))
    out = _Collector(varmap)
    if not support:
        return []
    for anchor in range(inst.n):
        # nodes: 0..n-1 graph nodes, then one per support edge, then source and sink
        net = FlowNetwork(inst.n + len(support) + 2)
        src, snk = inst.n + len(support), inst.n + len(support) + 1
        for pos, e in enumerate(support):
            u, v, _ = g.edges[e]
            net.add_arc(src, inst.n + pos, float(x[e]))
            net.add_arc(inst.n + pos, u, math.inf)
            net.add_arc(inst.n + pos, v, math.inf)
        for v in range(inst.n):
            if v != anchor and y[v] > 0:
                net.add_arc(v, snk, float(y[v]))
        net.add_arc(src, anchor, math.inf)
        cut, side = min_cut(net, src, snk)
        if total - cut > TOL:
            S = frozenset(v for v in side if v < inst.n)
            terms: dict[tuple, float] = {ykey(v): 1.0 for v in S if v != anchor}
            for e in g.induced_edges(S):
                terms[xkey(e)] = -1.0
            index = (layer, anchor) if layer is not None else (anchor,)
            out.offer(family, index, S, terms, 0.0, value)
    return out.cuts


# -- directed cuts with parent choice ---------------------------------------


def separate_edc(inst: SfpInstance, y, z: dict, varmap: VarMap | None = None) -> list[ViolatedCut]:
    """``y(delta+(S)) >= sum of z_lk over roots r^l in S (l <= k)`` for S missing part of T^k.

    ``z`` maps ``(l, k)`` to the value of ``z_lk``.
    """
    y = np.asarray(y, dtype=float)
    arcs = inst.graph.arcs()
    pos = {(i, j): a for a, (i, j, _) in enumerate(arcs)}
    base = _directed_network(inst, y)
    out = _Collector(varmap)

    def value(key):
        return float(y[pos[(key[1], key[2])]]) if key[0] == "y" else float(z[(key[1], key[2])])

    for k in range(inst.K):
        net = FlowNetwork(inst.n + 1)
        net.tails, net.heads, net.caps = list(base.tails), list(base.heads), list(base.caps)
        star = inst.n
        for l in range(k + 1):
            if z[(l, k)] > 0:
                net.add_arc(star, inst.roots[l], float(z[(l, k)]))
        for t in inst.terminal_sets[k]:
            cut, sides = _extreme_sides(net, star, t)
            if cut < 1 - TOL:
                for tag, side in sides:
                    S = frozenset(v for v in side if v != star)
                    terms: dict[tuple, float] = {("y", i, j): 1.0 for i, j, _ in arcs if i in S and j not in S}
                    for l in range(k + 1):
                        if inst.roots[l] in S:
                            terms[("z", l, k)] = -1.0
                    out.offer("edc-cut", (k, t, tag), S, terms, 0.0, value)
    return out.cuts


def separate_sedc(inst: SfpInstance, y: Sequence, z: dict, varmap: VarMap | None = None) -> list[ViolatedCut]:
    """``y^k(delta+(S)) >= z_kl`` for S holding r^k but missing part of T^l, l >= k."""
    arcs = inst.graph.arcs()
    pos = {(i, j): a for a, (i, j, _) in enumerate(arcs)}
    out = _Collector(varmap)
    for k in range(inst.K):
        yk = np.asarray(y[k], dtype=float)

        def value(key, yk=yk):
            return float(yk[pos[(key[2], key[3])]]) if key[0] == "y" else float(z[(key[1], key[2])])

        net = _directed_network(inst, yk)
        r = inst.roots[k]
        for l in range(k, inst.K):
            need = z[(k, l)]
            if need <= TOL:
                continue
            for t in inst.terminal_sets[l]:
                if t == r:
                    continue
                cut, sides = _extreme_sides(net, r, t)
                if cut < need - TOL:
                    for tag, side in sides:
                        terms: dict[tuple, float] = {("y", k, i, j): 1.0 for i, j, _ in arcs if i in side and j not in side}
                        terms[("z", k, l)] = -1.0
                        out.offer("sedc-cut", (k, l, t, tag), side, terms, 0.0, value)
    return out.cuts


# -- adapters from LP points -------------------------------------------------


def _z_values(model: FormulationModel, point) -> dict:
    return {(k, l): float(point[model.varmap[("z", k, l)]]) for k in range(model.inst.K) for l in range(k, model.inst.K)}


def _uc(model: FormulationModel, point) -> list[ViolatedCut]:
    return separate_uc(model.inst, model.x_values(point), model.varmap)


def _dc(model: FormulationModel, point) -> list[ViolatedCut]:
    y = [model.arc_values(point, ("y", k)) for k in range(model.inst.K)]
    return separate_dc(model.inst, y, model.varmap)


def _klsvz(model: FormulationModel, point) -> list[ViolatedCut]:
    pairs = model.info.get("pairs") or shortest_distances(model.inst)
    vm = model.varmap
    y = [float(point[vm[("yl", l)]]) for l in range(pairs.L)]
    ybar = [float(point[vm[("ybar", l)]]) for l in range(pairs.L)]
    return separate_klsvz(model.inst, pairs, model.x_values(point), y, ybar, vm)


def _lt(model: FormulationModel, point) -> list[ViolatedCut]:
    inst, vm = model.inst, model.varmap
    cuts = []
    for k in range(inst.K):
        xk = [point[vm[("xk", k, e)]] for e in range(inst.graph.edge_count)]
        yk = [point[vm[("yk", k, i)]] for i in range(inst.n)]
        cuts.extend(separate_sec(inst, xk, yk, k, vm))
    return cuts


def _et(model: FormulationModel, point) -> list[ViolatedCut]:
    inst, vm = model.inst, model.varmap
    y = [point[vm[("y", i)]] for i in range(inst.n)]
    return separate_sec(inst, model.x_values(point), y, None, vm)


def _edc(model: FormulationModel, point) -> list[ViolatedCut]:
    return separate_edc(model.inst, model.arc_values(point, ("y",)), _z_values(model, point), model.varmap)


def _sedc(model: FormulationModel, point) -> list[ViolatedCut]:
    y = [model.arc_values(point, ("y", k)) for k in range(model.inst.K)]
    return separate_sedc(model.inst, y, _z_values(model, point), model.varmap)


def uc_family() -> LazyFamily:
    return LazyFamily("uc-cut", _uc, "undirected cuts x(delta(S)) >= 1 over relevant S")


def dc_family() -> LazyFamily:
    return LazyFamily("dc-cut", _dc, "per-set directed cuts y^k(delta+(S)) >= 1")


def klsvz_family() -> LazyFamily:
    return LazyFamily("klsvz", _klsvz, "lifted cuts x(delta(S)) + y_l (+ ybar_l) >= 1")


def lt_family() -> LazyFamily:
    return LazyFamily("lt-sec", _lt, "per-layer subtour elimination y^k(S) - x^k(E[S]) >= y^k_i")


def et_family() -> LazyFamily:
    return LazyFamily("et-sec", _et, "forest subtour elimination y(S) - x(E[S]) >= y_i")


def edc_family() -> LazyFamily:
    return LazyFamily("edc-cut", _edc, "directed cuts y(delta+(S)) >= sum of z_lk over roots in S")


def sedc_family() -> LazyFamily:
    return LazyFamily("sedc-cut", _sedc, "per-parent directed cuts y^k(delta+(S)) >= z_kl")
