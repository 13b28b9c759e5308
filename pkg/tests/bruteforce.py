"""Exhaustive reference implementations used as test oracles.

Everything here enumerates subsets directly and shares no code with the
package beyond the instance model, so agreement with the package's min-cut
based routines is an independent check.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

from sfbound import lp
from sfbound.instance import SfpInstance, TerminalPairs

TOL = 1e-6


def subsets(n: int):
    """Every proper nonempty subset of range(n) as a frozenset."""
    for mask in range(1, (1 << n) - 1):
        yield frozenset(v for v in range(n) if mask >> v & 1)


def cut_value_undirected(inst: SfpInstance, x, S) -> float:
    return sum(x[e] for e, (u, v, _) in enumerate(inst.graph.edges) if (u in S) != (v in S))


def cut_value_directed(inst: SfpInstance, y, S) -> float:
    return sum(y[a] for a, (i, j, _) in enumerate(inst.graph.arcs()) if i in S and j not in S)


# -- min cut ---------------------------------------------------------------


def network_min_cut(n: int, arcs, s: int, t: int) -> float:
    best = math.inf
    for S in subsets(n):
        if s in S and t not in S:
            best = min(best, sum(c for a, b, c in arcs if a in S and b not in S))
    return best


# -- violated-constraint search per family -----------------------------------


def uc_violated(inst, x) -> bool:
    for S in subsets(inst.n):
        for k in range(inst.K):
            if inst.roots[k] in S and not set(inst.terminal_sets[k]) <= S:
                if cut_value_undirected(inst, x, S) < 1 - TOL:
                    return True
    return False


def dc_violated(inst, ys) -> bool:
    for S in subsets(inst.n):
        for k in range(inst.K):
            if inst.roots[k] in S and not set(inst.terminal_sets[k]) <= S:
                if cut_value_directed(inst, ys[k], S) < 1 - TOL:
                    return True
    return False


def klsvz_violated(inst, pairs: TerminalPairs, x, y, ybar) -> bool:
    index = {}
    for l, (s, t) in enumerate(pairs.pairs):
        index[s] = l
        index[t] = l
    for S in subsets(inst.n):
        split = [l for l, (s, t) in enumerate(pairs.pairs) if (s in S) != (t in S)]
        cut = cut_value_undirected(inst, x, S)
        if split:
            l = max(split)
            if cut + y[l] < 1 - TOL:
                return True
            continue
        inside = [index[v] for v in S if v in index]
        if not inside:
            continue
        l = max(inside)
        s, t = pairs.pairs[l]
        if s in S and t in S and cut + y[l] + ybar[l] < 1 - TOL:
            return True
    return False


def sec_violated(inst, x, y) -> bool:
    g = inst.graph
    for mask in range(1, 1 << inst.n):
        S = {v for v in range(inst.n) if mask >> v & 1}
        inner = sum(x[e] for e, (u, v, _) in enumerate(g.edges) if u in S and v in S)
        ys = sum(y[v] for v in S)
        for i in S:
            if inner - (ys - y[i]) > TOL:
                return True
    return False


def edc_violated(inst, y, z) -> bool:
    for S in subsets(inst.n):
        out = cut_value_directed(inst, y, S)
        for k in range(inst.K):
            if set(inst.terminal_sets[k]) <= S:
                continue
            need = sum(z[(l, k)] for l in range(k + 1) if inst.roots[l] in S)
            if out - need < -TOL:
                return True
    return False


def sedc_violated(inst, ys, z) -> bool:
    for S in subsets(inst.n):
        for k in range(inst.K):
            if inst.roots[k] not in S:
                continue
            out = cut_value_directed(inst, ys[k], S)
            for l in range(k, inst.K):
                if not set(inst.terminal_sets[l]) <= S and out - z[(k, l)] < -TOL:
                    return True
    return False


# -- Steiner forests ---------------------------------------------------------


def connects_all(inst, edge_ids) -> bool:
    parent = list(range(inst.n))

    def find(v):
        while parent[v] != v:
            v = parent[v]
        return v

    for e in edge_ids:
        u, v, _ = inst.graph.edges[e]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    return all(len({find(v) for v in s}) == 1 for s in inst.terminal_sets)


def acyclic(inst, edge_ids) -> bool:
    parent = list(range(inst.n))

    def find(v):
        while parent[v] != v:
            v = parent[v]
        return v

    for e in edge_ids:
        u, v, _ = inst.graph.edges[e]
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


def optimum(inst) -> float:
    """Cheapest acyclic edge subset connecting every terminal set."""
    best = math.inf
    m = inst.graph.edge_count
    for r in range(m + 1):
        for combo in itertools.combinations(range(m), r):
            if acyclic(inst, combo) and connects_all(inst, combo):
                best = min(best, sum(inst.graph.edges[e][2] for e in combo))
    return best


# -- LP / MIP references ---------------------------------------------------


def vertex_enumeration(prog: lp.LpProgram):
    """Optimum of a small LP by enumerating basic solutions.

    Returns ``("optimal", value)``, ``("infeasible", None)`` or
    ``("unbounded", None)``.  Unboundedness is detected with a HiGHS-free
    check: the LP is unbounded iff it is feasible and some feasible ray
    improves the objective, which is tested by re-solving with a large box.
    """
    n = prog.num_columns
    A = prog.matrix().toarray() if prog.num_rows else np.zeros((0, n))
    b = np.array([r.rhs for r in prog.rows])
    senses = [r.sense for r in prog.rows]
    lo = np.array(prog.lower, dtype=float)
    hi = np.array(prog.upper, dtype=float)
    c = np.array(prog.objective, dtype=float)

    def solve_box(box):
        lo_b = np.where(np.isfinite(lo), lo, -box)
        hi_b = np.where(np.isfinite(hi), hi, box)
        # candidate tight constraints: rows (as equalities) and variable bounds
        H = [A[i] for i in range(len(b))] + [np.eye(n)[j] for j in range(n) for _ in (0, 1)]
        h = list(b) + [v for j in range(n) for v in (lo_b[j], hi_b[j])]
        H, h = np.array(H), np.array(h)
        combos = np.array(list(itertools.combinations(range(len(h)), n)))
        M = H[combos]
        ok = np.abs(np.linalg.det(M)) > 1e-9
        if not ok.any():
            return None
        V = np.linalg.solve(M[ok], h[combos[ok]][..., None])[..., 0]
        feas = np.all(V >= lo_b - 1e-7, axis=1) & np.all(V <= hi_b + 1e-7, axis=1)
        if len(b):
            act = V @ A.T
            for i, s in enumerate(senses):
                if s == lp.LE:
                    feas &= act[:, i] <= b[i] + 1e-7
                elif s == lp.GE:
                    feas &= act[:, i] >= b[i] - 1e-7
                else:
                    feas &= np.abs(act[:, i] - b[i]) <= 1e-7
        if not feas.any():
            return None
        return float((V[feas] @ c).min())

    small = solve_box(1e3)
    if small is None:
        return "infeasible", None
    big = solve_box(1e4)
    if big is not None and big < small - 1e-6:
        return "unbounded", None
    return "optimal", small


def integer_feasible_with_x(model, x_fixed, max_rounds: int = 200) -> bool:
    """Whether some all-integer point of the full model has edge values ``x_fixed``.

    Solves the static rows as a MIP with scipy's HiGHS interface, then
    repeatedly adds the rows the model's own separation finds violated at
    the MIP optimum, until none remain or the MIP turns infeasible.
    """
    prog = model.program.copy()
    cols = [model.varmap[("x", e)] for e in range(model.inst.graph.edge_count)]
    for j, v in zip(cols, x_fixed):
        prog.set_bounds(j, float(v), float(v))
    for _ in range(max_rounds):
        n = prog.num_columns
        cons = []
        if prog.num_rows:
            A = prog.matrix()
            lo = np.array([r.rhs if r.sense in (lp.GE, lp.EQ) else -np.inf for r in prog.rows])
            hi = np.array([r.rhs if r.sense in (lp.LE, lp.EQ) else np.inf for r in prog.rows])
            cons.append(LinearConstraint(A, lo, hi))
        res = milp(
            np.zeros(n),
            constraints=cons,
            integrality=np.ones(n),
            bounds=Bounds(np.array(prog.lower, dtype=float), np.array(prog.upper, dtype=float)),
        )
        if res.status != 0:
            return False
        point = np.round(res.x)
        rows = []
        for fam in model.lazy:
            rows.extend(c.row for c in fam.separate(model, point))
        if not rows:
            return True
        prog.add_rows(rows)
    raise RuntimeError("lazy rows did not settle")
