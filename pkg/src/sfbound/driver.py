"""Cutting-plane loop and relaxation comparison."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import lp
from .formulations import BuildRefused, FormulationModel, Kind, build
from .instance import SfpInstance

OPTIMAL = "optimal"
TIME_LIMIT = "time-limit"
ITERATION_LIMIT = "iteration-limit"
BUILD_REFUSED = "build-refused"
STATUSES = (OPTIMAL, TIME_LIMIT, ITERATION_LIMIT, BUILD_REFUSED)

AUDIT_TOL = 1e-6


class SolverFailure(RuntimeError):
    """The LP solver returned something other than an optimum."""


@dataclass(frozen=True)
class Limits:
    time: float = 60.0
    rounds: int = 200


@dataclass
class BoundReport:
    instance: str
    kind: Kind
    bound: float | None
    status: str
    rounds: int
    cuts_added: int
    wall_time: float
    detail: str = ""
    point: np.ndarray | None = field(default=None, repr=False, compare=False)
    model: FormulationModel | None = field(default=None, repr=False, compare=False)

    def same_result(self, other: "BoundReport") -> bool:
        """Equal in everything but timing."""
        return (self.instance, self.kind, self.bound, self.status, self.rounds, self.cuts_added) == (
            other.instance,
            other.kind,
            other.bound,
            other.status,
            other.rounds,
            other.cuts_added,
        )


def _solve(prog, backend, prior=None, rows=None):
    sol = lp.solve(prog, backend) if rows is None else lp.add_rows_and_resolve(prog, prior, rows, backend)
    if sol.status == lp.ITERATION_LIMIT:
        return sol
    if not sol.optimal:
        raise SolverFailure(f"LP {prog.name} ended {sol.status}")
    return sol


def solve_relaxation(
    inst: SfpInstance,
    kind: Kind | str,
    limits: Limits = Limits(),
    backend: str = "auto",
    keep: bool = False,
) -> BoundReport:
    """Optimise the relaxation of ``kind``, separating lazy families until none is violated.

    Each round solves the LP, queries every lazy family at the optimum and
    appends all returned rows.  Limits are checked between rounds; when one
    is hit the last LP value is reported, which is still a lower bound.
    With ``keep`` the final model and LP point are attached to the report.
    """
    kind = Kind.parse(kind) if isinstance(kind, str) else kind
    start = time.perf_counter()
    try:
        model = build(inst, kind)
    except BuildRefused as exc:
        return BoundReport(inst.name, kind, None, BUILD_REFUSED, 0, 0, time.perf_counter() - start, str(exc))
    prog = model.program
    sol = _solve(prog, backend)
    rounds = cuts_added = 0
    status = OPTIMAL
    while True:
        if sol.status == lp.ITERATION_LIMIT:
            status = ITERATION_LIMIT
            break
        rows = []
        for fam in model.lazy:
            rows.extend(c.row for c in fam.separate(model, sol.x))
        if not rows:
            break
        if rounds >= limits.rounds:
            status = ITERATION_LIMIT
            break
        if time.perf_counter() - start > limits.time:
            status = TIME_LIMIT
            break
        sol = _solve(prog, backend, sol, rows)
        rounds += 1
        cuts_added += len(rows)
    bound = float(sol.objective) if sol.optimal else None
    report = BoundReport(inst.name, kind, bound, status, rounds, cuts_added, time.perf_counter() - start)
    if keep:
        report.point = sol.x
        report.model = model
    return report


# stronger relaxation on the right; "=" edges are equalities
LATTICE = (
    (Kind.UC, "<=", Kind.DC),
    (Kind.DC, "<=", Kind.EDC),
    (Kind.EDC, "<=", Kind.SEDC),
    (Kind.UC, "<=", Kind.KLSVZ),
    (Kind.UC, "<=", Kind.MR),
    (Kind.UF, "=", Kind.UC),
    (Kind.DF, "=", Kind.DC),
    (Kind.EDF, "=", Kind.SEDC),
)


@dataclass(frozen=True)
class AuditLine:
    weaker: Kind
    relation: str
    stronger: Kind
    lhs: float
    rhs: float
    holds: bool

    def __str__(self) -> str:
        verdict = "ok" if self.holds else "FAIL"
        return f"{self.weaker.value} {self.relation} {self.stronger.value}: {self.lhs:.6f} vs {self.rhs:.6f} {verdict}"


def audit(reports: list[BoundReport], tol: float = AUDIT_TOL) -> list[AuditLine]:
    """Check every lattice edge whose two ends both finished optimal."""
    best = {r.kind: r.bound for r in reports if r.status == OPTIMAL and r.bound is not None}
    lines = []
    for a, rel, b in LATTICE:
        if a in best and b in best:
            lhs, rhs = best[a], best[b]
            ok = abs(lhs - rhs) <= tol if rel == "=" else lhs <= rhs + tol
            lines.append(AuditLine(a, rel, b, lhs, rhs, ok))
    return lines


def compare(
    inst: SfpInstance,
    kinds,
    limits: Limits = Limits(),
    backend: str = "auto",
) -> tuple[list[BoundReport], list[AuditLine]]:
    kinds = [Kind.parse(k) if isinstance(k, str) else k for k in kinds]
    if len(kinds) < 2:
        raise ValueError("compare needs at least two formulations")
    reports = [solve_relaxation(inst, k, limits, backend) for k in kinds]
    return reports, audit(reports)
