"""Linear programming layer: model, built-in simplex and an optional HiGHS backend.

``backend`` selects the solver:

``"simplex"``
    the built-in bounded primal simplex (reference implementation);
``"highs"``
    scipy's HiGHS bindings, for large static programs;
``"auto"``
    the built-in simplex while the program stays below :data:`AUTO_LIMIT`
    rows times columns, HiGHS beyond.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from . import highs, simplex
from .program import (
    DEFAULT_TOLERANCES,
    EQ,
    GE,
    INFEASIBLE,
    ITERATION_LIMIT,
    LE,
    OPTIMAL,
    UNBOUNDED,
    LpProgram,
    LpSolution,
    Row,
    Tolerances,
)

BACKENDS = ("simplex", "highs", "auto")

#: rows x columns above which ``"auto"`` hands the program to HiGHS
AUTO_LIMIT = 400_000


def _pick(prog: LpProgram, backend: str) -> str:
    if backend not in BACKENDS:
        raise ValueError(f"unknown LP backend {backend!r}; choose from {BACKENDS}")
    if backend == "auto":
        size = max(prog.num_rows, 1) * max(prog.num_columns, 1)
        return "simplex" if size <= AUTO_LIMIT else "highs"
    return backend


def solve(prog: LpProgram, backend: str = "simplex", tol: Tolerances = DEFAULT_TOLERANCES) -> LpSolution:
    if prog.num_columns == 0:
        raise ValueError("program has no columns")
    if _pick(prog, backend) == "highs":
        return highs.solve(prog, tol)
    return simplex.solve(prog, tol)


def add_rows_and_resolve(
    prog: LpProgram,
    prior: LpSolution | None,
    rows: Iterable[Row],
    backend: str = "simplex",
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> LpSolution:
    """Append ``rows`` to ``prog`` and re-optimise.

    With the built-in simplex the previous basis is reused; the result is the
    same optimum a solve from scratch would give.
    """
    before = prog.num_rows
    prog.add_rows(rows)
    if _pick(prog, backend) == "highs":
        return highs.solve(prog, tol)
    return simplex.resolve(prog, prior, before, tol)


def rebound_and_resolve(
    prog: LpProgram,
    prior: LpSolution | None,
    backend: str = "simplex",
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> LpSolution:
    """Re-optimise after column bounds of ``prog`` were changed in place.

    With the built-in simplex the previous basis is reused.
    """
    if _pick(prog, backend) == "highs":
        return highs.solve(prog, tol)
    return simplex.rebound(prog, prior, tol)


def evaluate(prog: LpProgram, x) -> float:
    return float(np.dot(prog.objective, x))


__all__ = [
    "BACKENDS",
    "EQ",
    "GE",
    "INFEASIBLE",
    "ITERATION_LIMIT",
    "LE",
    "OPTIMAL",
    "UNBOUNDED",
    "LpProgram",
    "LpSolution",
    "Row",
    "Tolerances",
    "add_rows_and_resolve",
    "rebound_and_resolve",
    "evaluate",
    "solve",
]
