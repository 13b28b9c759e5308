"""Adapter that hands an :class:`LpProgram` to scipy's HiGHS solver."""

from __future__ import annotations

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csr_matrix, vstack

from .program import EQ, GE, INFEASIBLE, ITERATION_LIMIT, LE, OPTIMAL, UNBOUNDED, LpProgram, LpSolution, Tolerances

_STATUS = {0: OPTIMAL, 1: ITERATION_LIMIT, 2: INFEASIBLE, 3: UNBOUNDED}


def solve(prog: LpProgram, tol: Tolerances) -> LpSolution:
    n = prog.num_columns
    c = np.asarray(prog.objective, dtype=float)
    bounds = np.column_stack([prog.lower, prog.upper])
    A = prog.matrix()
    senses = np.array([r.sense for r in prog.rows])
    b = np.array([r.rhs for r in prog.rows])
    le, ge, eq = senses == LE, senses == GE, senses == EQ
    A_ub = b_ub = A_eq = b_eq = None
    if le.any() or ge.any():
        A_ub = vstack([A[np.flatnonzero(le)], -A[np.flatnonzero(ge)]]).tocsr()
        b_ub = np.concatenate([b[le], -b[ge]])
    if eq.any():
        A_eq = A[np.flatnonzero(eq)]
        b_eq = b[eq]
    if A_ub is None and A_eq is None:
        A_ub, b_ub = csr_matrix((1, n)), np.zeros(1)
    res = linprog(
        c,
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=A_eq,
        b_eq=b_eq,
        bounds=bounds,
        method="highs",
        options={"presolve": True, "primal_feasibility_tolerance": tol.feasibility, "dual_feasibility_tolerance": tol.feasibility},
    )
    status = _STATUS.get(res.status, ITERATION_LIMIT)
    if status == OPTIMAL:
        x = np.clip(res.x, prog.lower, prog.upper)
        obj = float(c @ x)
    else:
        x = np.full(n, np.nan)
        obj = float("nan")
    return LpSolution(status, obj, x, int(getattr(res, "nit", 0) or 0), "highs")
