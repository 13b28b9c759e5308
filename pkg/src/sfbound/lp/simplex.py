"""Bounded-variable revised primal simplex.

Every row ``a x (<=|>=|=) b`` receives a slack ``s`` so that ``a x + s = b``
with ``s >= 0``, ``s <= 0`` or ``s = 0``.  Rows whose slack would start out of
bounds get an artificial column; phase one drives the artificials to zero,
phase two optimises the true objective.  Rows appended after an optimal
solve extend the basis by their slacks even when those start out of bounds;
the basis stays dual feasible, so a bounded dual simplex restores primal
feasibility in a few pivots and a short primal pass polishes the result.
Changed column bounds are absorbed the same way: nonbasic columns move to
the bound their reduced cost favours and the dual simplex takes over.

The basis is held as a sparse LU factorisation with product-form eta updates
between refactorisations.  Pricing is Dantzig's rule, switched to Bland's
rule after a streak of degenerate pivots.  The ratio test is Harris'
two-pass test.
"""

from __future__ import annotations

import numpy as np
from scipy.sparse import csc_matrix, vstack
from scipy.sparse.linalg import splu

from .program import (
    EQ,
    GE,
    INFEASIBLE,
    ITERATION_LIMIT,
    LE,
    OPTIMAL,
    UNBOUNDED,
    LpProgram,
    LpSolution,
    Tolerances,
)


class _Breakdown(Exception):
    pass


class BoundedSimplex:
    def __init__(self, prog: LpProgram, tol: Tolerances):
        self.prog = prog
        self.tol = tol
        n = prog.num_columns
        self.n = n
        self.m = 0
        self.A = csc_matrix((0, n))
        self.b = np.empty(0)
        self.senses: list[str] = []
        self.lb = np.asarray(prog.lower, dtype=float).copy()
        self.ub = np.asarray(prog.upper, dtype=float).copy()
        self.cost = np.asarray(prog.objective, dtype=float).copy()
        self.x = np.where(np.isfinite(self.lb), self.lb, np.where(np.isfinite(self.ub), self.ub, 0.0))
        self.art_row = np.empty(0, dtype=np.int64)
        self.art_sign = np.empty(0)
        self.basis = np.empty(0, dtype=np.int64)
        self.is_basic = np.zeros(n, dtype=bool)
        self.lu = None
        self.etas: list[tuple[int, np.ndarray]] = []
        self.iterations = 0
        self.rows_seen = 0
        # set while the basis is dual feasible: new rows or bounds can then go through the dual simplex
        self.dual_ready = False
        self.dual_infeasible = False
        self.pending_dual = False
        self._bounds_snapshot = (tuple(prog.lower), tuple(prog.upper))
        self.append_rows()

    # -- bookkeeping -------------------------------------------------------

    @property
    def na(self) -> int:
        return len(self.art_row)

    def _art_base(self) -> int:
        return self.n + self.m

    def compatible(self, prog: LpProgram, rows_before: int) -> bool:
        return (
            prog is self.prog
            and rows_before == self.rows_seen
            and prog.num_columns == self.n
            and self._bounds_snapshot == (tuple(prog.lower), tuple(prog.upper))
        )

    def append_rows(self) -> None:
        """Absorb rows added to the program since the last call."""
        new = self.prog.rows[self.rows_seen :]
        self.rows_seen = self.prog.num_rows
        if not new:
            return
        n, m_old, k = self.n, self.m, len(new)
        A_new = self.prog.matrix(m_old)
        b_new = np.array([r.rhs for r in new])
        senses = [r.sense for r in new]

        slo = np.array([0.0 if s in (LE, EQ) else -np.inf for s in senses])
        shi = np.array([np.inf if s == LE else 0.0 for s in senses])
        resid = b_new - A_new @ self.x[:n]
        inside = (resid >= slo - self.tol.feasibility) & (resid <= shi + self.tol.feasibility)
        if self.dual_ready:
            self.pending_dual = self.pending_dual or not inside.all()
            inside[:] = True
        s_val = np.where(inside, resid, np.clip(resid, slo, shi))

        art_base_old = n + m_old
        arts_old = self.na
        # new artificials for rows whose slack cannot absorb the residual
        new_art_rows = np.flatnonzero(~inside)
        new_art_sign = np.sign(resid[new_art_rows] - s_val[new_art_rows])
        new_art_val = np.abs(resid[new_art_rows] - s_val[new_art_rows])

        # variable layout: [structural | slacks old | slacks new | arts old | arts new]
        def splice(arr, slack_part, art_part):
            return np.concatenate([arr[: n + m_old], slack_part, arr[art_base_old:], art_part])

        self.lb = splice(self.lb, slo, np.zeros(len(new_art_rows)))
        self.ub = splice(self.ub, shi, np.full(len(new_art_rows), np.inf))
        self.cost = splice(self.cost, np.zeros(k), np.zeros(len(new_art_rows)))
        self.x = splice(self.x, s_val, new_art_val)
        self.is_basic = splice(self.is_basic, inside.copy(), np.ones(len(new_art_rows), dtype=bool))
        self.art_row = np.concatenate([self.art_row, new_art_rows + m_old]).astype(np.int64)
        self.art_sign = np.concatenate([self.art_sign, new_art_sign])

        basis = self.basis.copy()
        basis[basis >= art_base_old] += k
        art_id = {int(r): n + m_old + k + arts_old + i for i, r in enumerate(new_art_rows)}
        new_basic = np.array([art_id.get(i, n + m_old + i) for i in range(k)], dtype=np.int64)
        self.basis = np.concatenate([basis, new_basic])
        self.A = vstack([self.A, A_new]).tocsc() if m_old else A_new.tocsc()
        self.b = np.concatenate([self.b, b_new])
        self.senses += senses
        self.m = m_old + k

    def take_bounds(self) -> bool:
        """Adopt the program's current column bounds, keeping the basis.

        Returns False when some nonbasic column would have to sit at an
        infinite bound, in which case the state should be discarded.
        """
        n, tol = self.n, self.tol
        lo = np.asarray(self.prog.lower, dtype=float)
        hi = np.asarray(self.prog.upper, dtype=float)
        try:
            self._refactor()
        except _Breakdown:
            return False
        y = self._btran(self.cost[self.basis])
        d = (self.cost - self._price(y))[:n]
        nb = ~self.is_basic[:n]
        target = np.where(d > tol.optimality, lo, np.where(d < -tol.optimality, hi, np.clip(self.x[:n], lo, hi)))
        if not np.all(np.isfinite(target[nb])):
            return False
        self.lb[:n], self.ub[:n] = lo, hi
        self.x[:n] = np.where(nb, target, self.x[:n])
        self._bounds_snapshot = (tuple(self.prog.lower), tuple(self.prog.upper))
        self.pending_dual = True
        return True

    def _purge_artificials(self) -> None:
        base = self._art_base()
        keep = [a for a in range(self.na) if self.is_basic[base + a]]
        if len(keep) == self.na:
            return
        remap = {base + a: base + i for i, a in enumerate(keep)}
        sel = np.r_[np.arange(base), base + np.asarray(keep, dtype=np.int64)]
        self.lb, self.ub, self.cost, self.x, self.is_basic = (
            self.lb[sel], self.ub[sel], self.cost[sel], self.x[sel], self.is_basic[sel]
        )
        self.art_row = self.art_row[keep]
        self.art_sign = self.art_sign[keep]
        self.basis = np.array([remap.get(int(j), int(j)) for j in self.basis], dtype=np.int64)

    # -- linear algebra ----------------------------------------------------

    def _column(self, j: int):
        n, m = self.n, self.m
        if j < n:
            lo, hi = self.A.indptr[j], self.A.indptr[j + 1]
            return self.A.indices[lo:hi], self.A.data[lo:hi]
        if j < n + m:
            return np.array([j - n]), np.array([1.0])
        a = j - n - m
        return np.array([self.art_row[a]]), np.array([self.art_sign[a]])

    def _ftran(self, j: int) -> np.ndarray:
        rows, vals = self._column(j)
        v = np.zeros(self.m)
        np.add.at(v, rows, vals)
        return self._solve_B(v)

    def _solve_B(self, v: np.ndarray) -> np.ndarray:
        v = self.lu.solve(v)
        for r, a in self.etas:
            vr = v[r] / a[r]
            v -= vr * a
            v[r] = vr
        return v

    def _btran(self, c: np.ndarray) -> np.ndarray:
        w = np.array(c, dtype=float)
        for r, a in reversed(self.etas):
            wr = w[r]
            w[r] = (wr - (a @ w - a[r] * wr)) / a[r]
        return self.lu.solve(w, trans="T")

    def _price(self, y: np.ndarray) -> np.ndarray:
        """``y . a_j`` for every column."""
        return np.concatenate([self.A.T @ y, y, self.art_sign * y[self.art_row]])

    def _refactor(self) -> None:
        m, n = self.m, self.n
        rows, cols, vals = [], [], []
        for p, j in enumerate(self.basis):
            r, v = self._column(int(j))
            rows.append(r)
            cols.append(np.full(len(r), p))
            vals.append(v)
        B = csc_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(m, m))
        try:
            self.lu = splu(B)
        except RuntimeError:
            raise _Breakdown("singular basis") from None
        self.etas = []
        xn = np.where(self.is_basic, 0.0, self.x)
        act = self.A @ xn[:n] + xn[n : n + m]
        np.add.at(act, self.art_row, self.art_sign * xn[n + m :])
        xb = self.lu.solve(self.b - act)
        if not np.all(np.isfinite(xb)):
            raise _Breakdown("non-finite basic solution")
        self.x[self.basis] = xb

    # -- main loop ---------------------------------------------------------

    def _run_phase(self, cost: np.ndarray, allow_unbounded: bool) -> str:
        tol = self.tol
        m = self.m
        limit = self.iterations + (tol.max_iterations or max(20000, 20 * (m + self.n)))
        if m == 0:
            return self._trivial(cost)
        refactor_every = tol.refactor_every
        self._refactor()
        since = 0
        streak = 0
        bland = False
        verified = True
        while True:
            if self.iterations >= limit:
                return ITERATION_LIMIT
            if since >= refactor_every:
                self._refactor()
                since = 0
            y = self._btran(cost[self.basis])
            d = cost - self._price(y)
            nb = ~self.is_basic
            inc = nb & (self.x < self.ub - tol.bound) & (d < -tol.optimality)
            dec = nb & (self.x > self.lb + tol.bound) & (d > tol.optimality)
            elig = inc | dec
            if not elig.any():
                if since == 0 and verified:
                    return OPTIMAL
                self._refactor()
                since = 0
                verified = True
                continue
            verified = False
            if bland:
                q = int(np.flatnonzero(elig)[0])
            else:
                q = int(np.argmax(np.where(elig, np.abs(d), -1.0)))
            dirn = 1.0 if inc[q] else -1.0
            alpha = self._ftran(q)
            delta = dirn * alpha
            r, theta = self._ratio(delta, bland)
            span = self.ub[q] - self.lb[q]
            if r < 0 and not np.isfinite(span):
                if allow_unbounded:
                    return UNBOUNDED
                raise _Breakdown("unbounded phase-one direction")
            self.iterations += 1
            since += 1
            if r < 0 or span <= theta:
                # bound flip, basis unchanged
                step = span
                self.x[q] = self.ub[q] if dirn > 0 else self.lb[q]
                self.x[self.basis] -= step * delta
                streak = 0
                bland = False
                continue
            self.x[q] += dirn * theta
            self.x[self.basis] -= theta * delta
            leave = int(self.basis[r])
            self.x[leave] = self.lb[leave] if delta[r] > 0 else self.ub[leave]
            self.basis[r] = q
            self.is_basic[leave] = False
            self.is_basic[q] = True
            self.etas.append((r, alpha))
            if theta <= 1e-12:
                streak += 1
                if streak >= tol.degenerate_streak:
                    bland = True
            else:
                streak = 0
                bland = False

    def _dual_phase(self) -> str:
        """Bounded dual simplex from a dual feasible basis until primal feasible."""
        tol = self.tol
        m = self.m
        limit = self.iterations + max(1000, 2 * (m + self.n))
        self._refactor()
        since = 0
        while True:
            if self.iterations >= limit:
                return ITERATION_LIMIT
            if since >= tol.refactor_every:
                self._refactor()
                since = 0
            xb = self.x[self.basis]
            below = self.lb[self.basis] - xb
            above = xb - self.ub[self.basis]
            worst = np.maximum(below, above)
            r = int(np.argmax(worst))
            if worst[r] <= tol.feasibility:
                return OPTIMAL
            to_lower = below[r] > above[r]
            y = self._btran(self.cost[self.basis])
            d = self.cost - self._price(y)
            e = np.zeros(m)
            e[r] = 1.0
            row = self._price(self._btran(e))
            nb = ~self.is_basic
            at_lb = nb & (self.x <= self.lb + tol.bound)
            at_ub = nb & (self.x >= self.ub - tol.bound)
            free = nb & ~at_lb & ~at_ub
            movable = nb & (self.ub > self.lb)
            sgn = -1.0 if to_lower else 1.0
            elig = movable & (
                (at_lb & ~at_ub & (sgn * row > tol.pivot))
                | (at_ub & ~at_lb & (sgn * row < -tol.pivot))
                | (free & (np.abs(row) > tol.pivot))
            )
            if not elig.any():
                return INFEASIBLE
            slack = np.where(at_lb, d, np.where(at_ub, -d, np.abs(d)))
            slack = np.maximum(slack, 0.0)
            mag = np.abs(row)
            cand = np.flatnonzero(elig)
            exact = slack[cand] / mag[cand]
            cap = ((slack[cand] + tol.optimality) / mag[cand]).min()
            pick = np.flatnonzero(exact <= cap)
            q = int(cand[pick[np.argmax(mag[cand][pick])]])
            alpha = self._ftran(q)
            if abs(alpha[r]) <= tol.pivot:
                if since == 0:
                    raise _Breakdown("tiny dual pivot")
                self._refactor()
                since = 0
                continue
            bound = self.lb[self.basis[r]] if to_lower else self.ub[self.basis[r]]
            step = (xb[r] - bound) / alpha[r]
            self.x[q] += step
            self.x[self.basis] -= step * alpha
            leave = int(self.basis[r])
            self.x[leave] = bound
            self.basis[r] = q
            self.is_basic[leave] = False
            self.is_basic[q] = True
            self.etas.append((r, alpha))
            self.iterations += 1
            since += 1

    def _ratio(self, delta: np.ndarray, bland: bool) -> tuple[int, float]:
        """Leaving row and step length; ``(-1, inf)`` when no basic variable blocks."""
        tol = self.tol
        xb = self.x[self.basis]
        lb = self.lb[self.basis]
        ub = self.ub[self.basis]
        down = (delta > tol.pivot) & np.isfinite(lb)
        up = (delta < -tol.pivot) & np.isfinite(ub)
        if not (down.any() or up.any()):
            return -1, np.inf
        exact = np.full(len(delta), np.inf)
        exact[down] = (xb[down] - lb[down]) / delta[down]
        exact[up] = (ub[up] - xb[up]) / -delta[up]
        exact = np.maximum(exact, 0.0)
        if bland:
            best = exact.min()
            ties = np.flatnonzero(exact <= best + 1e-12)
            r = int(ties[np.argmin(self.basis[ties])])
            return r, float(exact[r])
        relaxed = np.full(len(delta), np.inf)
        relaxed[down] = (xb[down] - lb[down] + tol.feasibility) / delta[down]
        relaxed[up] = (ub[up] - xb[up] + tol.feasibility) / -delta[up]
        cap = relaxed.min()
        cand = np.flatnonzero(exact <= cap)
        r = int(cand[np.argmax(np.abs(delta[cand]))])
        return r, float(exact[r])

    def _trivial(self, cost: np.ndarray) -> str:
        # no rows: every column sits at its cheapest bound
        for j in range(len(cost)):
            if cost[j] > 0:
                if not np.isfinite(self.lb[j]):
                    return UNBOUNDED
                self.x[j] = self.lb[j]
            elif cost[j] < 0:
                if not np.isfinite(self.ub[j]):
                    return UNBOUNDED
                self.x[j] = self.ub[j]
        return OPTIMAL

    def solve(self) -> LpSolution:
        self.append_rows()
        try:
            status = self._solve()
        except _Breakdown:
            status = ITERATION_LIMIT
        x = np.clip(self.x[: self.n], self.lb[: self.n], self.ub[: self.n])
        if status == OPTIMAL and not self._certify(x):
            # one clean restart from a fresh factorisation before giving up
            try:
                self._refactor()
                status = self._solve()
            except _Breakdown:
                status = ITERATION_LIMIT
            x = np.clip(self.x[: self.n], self.lb[: self.n], self.ub[: self.n])
            if status == OPTIMAL and not self._certify(x):
                status = ITERATION_LIMIT
        obj = float(np.dot(self.cost[: self.n], x)) if status == OPTIMAL else float("nan")
        self.dual_ready = status == OPTIMAL or (status == INFEASIBLE and self.dual_infeasible)
        self._purge_artificials()
        return LpSolution(status, obj, x, self.iterations, "simplex", state=self)

    def _solve(self) -> str:
        self.dual_infeasible = False
        if self.pending_dual:
            self.pending_dual = False
            status = self._dual_phase()
            if status != OPTIMAL:
                self.dual_infeasible = status == INFEASIBLE
                return status
        base = self._art_base()
        arts = np.arange(base, base + self.na)
        if self.na and np.any(self.ub[arts] > 0):
            phase1 = np.zeros_like(self.cost)
            phase1[arts] = 1.0
            status = self._run_phase(phase1, allow_unbounded=False)
            if status != OPTIMAL:
                return status
            scale = 1.0 + (np.abs(self.b).max() if self.m else 0.0)
            if self.x[arts].sum() > 10 * self.tol.feasibility * scale:
                return INFEASIBLE
            self.ub[arts] = 0.0
            self.x[arts] = np.where(self.is_basic[arts], self.x[arts], 0.0)
        return self._run_phase(self.cost, allow_unbounded=True)

    def _certify(self, x: np.ndarray) -> bool:
        tol = self.tol
        if np.any(x < self.lb[: self.n] - tol.bound) or np.any(x > self.ub[: self.n] + tol.bound):
            return False
        if self.m == 0:
            return True
        act = self.A @ x
        slackness = tol.feasibility * (1.0 + np.abs(self.b))
        s = np.array(self.senses)
        bad = ((s == GE) & (act < self.b - slackness)) | ((s == LE) & (act > self.b + slackness)) | (
            (s == EQ) & (np.abs(act - self.b) > slackness)
        )
        return not bad.any()


def solve(prog: LpProgram, tol: Tolerances) -> LpSolution:
    return BoundedSimplex(prog, tol).solve()


def resolve(prog: LpProgram, prior: LpSolution | None, rows_before: int, tol: Tolerances) -> LpSolution:
    state = prior.state if prior is not None else None
    if isinstance(state, BoundedSimplex) and prior.optimal and state.compatible(prog, rows_before):
        warm = state.solve()
        if warm.optimal or warm.status == UNBOUNDED:
            return warm
    return solve(prog, tol)


def rebound(prog: LpProgram, prior: LpSolution | None, tol: Tolerances) -> LpSolution:
    """Re-optimise after column bounds changed, from ``prior``'s basis when it is still usable.

    A warm verdict of infeasibility is confirmed by a cold solve, which also
    supplies a fresh state.
    """
    state = prior.state if prior is not None else None
    if (
        isinstance(state, BoundedSimplex)
        and state.dual_ready
        and state.prog is prog
        and state.rows_seen == prog.num_rows
        and state.n == prog.num_columns
        and state.take_bounds()
    ):
        warm = state.solve()
        if warm.optimal or warm.status == UNBOUNDED:
            return warm
    return solve(prog, tol)

