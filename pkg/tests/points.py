"""Random query points for the separation oracles, paired with brute-force verdicts.

Each family entry knows how to draw a point that satisfies the static rows
of its formulation (variable bounds, and the parent-choice equalities for
the extended cut model), how to call the package oracle on it, how to ask
the exhaustive reference, and how to evaluate a symbolic row term on it.
Half the points are scaled connecting edge sets so that both verdicts show
up often.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from sfbound import separation
from sfbound.instance import SfpInstance, generate, shortest_distances

import bruteforce as bf

GRID = np.array([0.0, 0.25, 0.5, 0.75, 1.0])


def small_instances() -> list[SfpInstance]:
    """Fixtures plus generated instances, all with at most 8 nodes."""
    from sfbound.instance import fixture

    out = [fixture("A"), fixture("B"), fixture("C")]
    for n, k, p, alpha, seed in [(6, 2, 1.0, 1.6, 1), (7, 2, 0.75, 2.0, 2), (8, 3, 0.75, 1.6, 3), (8, 2, 0.5, 2.0, 4), (8, 4, 1.0, 1.6, 5)]:
        out.append(generate(n, k, p, alpha, seed))
    return out


def _connecting_edges(inst, rng) -> list[int]:
    order = list(rng.permutation(inst.graph.edge_count))
    chosen: list[int] = []
    for e in order:
        if bf.connects_all(inst, chosen):
            break
        chosen.append(int(e))
    return chosen


def _edge_values(inst, rng) -> np.ndarray:
    m = inst.graph.edge_count
    if rng.random() < 0.5:
        return rng.choice(GRID, m)
    x = np.zeros(m)
    x[_connecting_edges(inst, rng)] = rng.choice([0.5, 0.75, 1.0])
    bump = rng.random(m) < 0.3
    x[bump] = np.minimum(1.0, x[bump] + rng.choice(GRID, int(bump.sum())))
    return x


def _oriented(inst, x, root) -> np.ndarray:
    """Arc values sending x away from ``root`` along a search over the support."""
    arcs = inst.graph.arcs()
    y = np.zeros(len(arcs))
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in range(inst.n)}
    for a, (i, j, e) in enumerate(arcs):
        if x[e] > 0:
            adj[i].append((j, a))
    seen = {root}
    queue = deque([root])
    while queue:
        i = queue.popleft()
        for j, a in adj[i]:
            if j not in seen:
                seen.add(j)
                y[a] = x[arcs[a][2]]
                queue.append(j)
    return y


def _arc_values(inst, rng, root) -> np.ndarray:
    if rng.random() < 0.5:
        return rng.choice(GRID, 2 * inst.graph.edge_count)
    y = _oriented(inst, _edge_values(inst, rng), root)
    extra = rng.random(len(y)) < 0.2
    y[extra] = rng.choice(GRID, int(extra.sum()))
    return y


def _lookup(point):
    """Symbolic term key -> value for every family's naming scheme."""

    def value(key):
        tag = key[0]
        if tag == "x":
            return point["x"][key[1]]
        if tag == "xk":
            return point["x"][key[2]]
        if tag == "yk":
            return point["ynode"][key[2]]
        if tag == "y" and len(key) == 2:
            return point["ynode"][key[1]]
        if tag == "y" and len(key) == 3:
            return point["arcs"][(key[1], key[2])]
        if tag == "y":
            return point["arcs"][key[1]][(key[2], key[3])]
        if tag == "z":
            return point["z"][(key[1], key[2])]
        if tag == "yl":
            return point["yl"][key[1]]
        if tag == "ybar":
            return point["ybar"][key[1]]
        raise KeyError(key)

    return value


def _arc_dict(inst, y) -> dict:
    return {(i, j): float(y[a]) for a, (i, j, _) in enumerate(inst.graph.arcs())}


# -- per-family draw / oracle / reference -------------------------------------


def draw_uc(inst, rng):
    return {"x": _edge_values(inst, rng)}


def draw_dc(inst, rng):
    ys = [_arc_values(inst, rng, inst.roots[k]) for k in range(inst.K)]
    return {"ys": ys, "arcs": [_arc_dict(inst, y) for y in ys]}


def draw_klsvz(inst, rng):
    L = shortest_distances(inst).L
    return {"x": _edge_values(inst, rng), "yl": rng.choice(GRID, L), "ybar": rng.choice(GRID, L)}


def draw_sec(inst, rng):
    x = _edge_values(inst, rng)
    if rng.random() < 0.5:
        ynode = rng.choice(GRID, inst.n)
    else:
        ynode = np.ones(inst.n)
        ynode[rng.random(inst.n) < 0.3] = rng.choice(GRID)
    return {"x": x, "ynode": ynode}


def draw_edc(inst, rng):
    y = _arc_values(inst, rng, inst.roots[0])
    z = {}
    for k in range(inst.K):
        w = rng.dirichlet(np.ones(k + 1)) if rng.random() < 0.5 else np.eye(k + 1)[rng.integers(k + 1)]
        for l in range(k + 1):
            z[(l, k)] = float(w[l])
    return {"y": y, "arcs": _arc_dict(inst, y), "z": z}


def draw_sedc(inst, rng):
    point = draw_dc(inst, rng)
    point["z"] = {(k, l): float(rng.choice(GRID)) if l > k else 1.0 for k in range(inst.K) for l in range(k, inst.K)}
    return point


FAMILIES = {
    "uc": (
        draw_uc,
        lambda inst, p: separation.separate_uc(inst, p["x"]),
        lambda inst, p: bf.uc_violated(inst, p["x"]),
    ),
    "dc": (
        draw_dc,
        lambda inst, p: separation.separate_dc(inst, p["ys"]),
        lambda inst, p: bf.dc_violated(inst, p["ys"]),
    ),
    "klsvz": (
        draw_klsvz,
        lambda inst, p: separation.separate_klsvz(inst, shortest_distances(inst), p["x"], p["yl"], p["ybar"]),
        lambda inst, p: bf.klsvz_violated(inst, shortest_distances(inst), p["x"], p["yl"], p["ybar"]),
    ),
    "sec": (
        draw_sec,
        lambda inst, p: separation.separate_sec(inst, p["x"], p["ynode"]),
        lambda inst, p: bf.sec_violated(inst, p["x"], p["ynode"]),
    ),
    "sec-layer": (
        draw_sec,
        lambda inst, p: separation.separate_sec(inst, p["x"], p["ynode"], layer=0),
        lambda inst, p: bf.sec_violated(inst, p["x"], p["ynode"]),
    ),
    "edc": (
        draw_edc,
        lambda inst, p: separation.separate_edc(inst, p["y"], p["z"]),
        lambda inst, p: bf.edc_violated(inst, p["y"], p["z"]),
    ),
    "sedc": (
        draw_sedc,
        lambda inst, p: separation.separate_sedc(inst, p["ys"], p["z"]),
        lambda inst, p: bf.sedc_violated(inst, p["ys"], p["z"]),
    ),
}


def row_violation(cut, point) -> float:
    value = _lookup(point)
    return cut.rhs - sum(a * value(k) for k, a in cut.terms.items())


def check_points(inst, family: str, count: int, seed: int):
    """Yield ``(point, cuts, reference_verdict)`` for ``count`` random points."""
    draw, oracle, reference = FAMILIES[family]
    rng = np.random.default_rng(seed)
    for _ in range(count):
        point = draw(inst, rng)
        yield point, oracle(inst, point), reference(inst, point)
