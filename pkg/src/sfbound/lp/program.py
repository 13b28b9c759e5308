"""Linear program model shared by every backend."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np
from scipy.sparse import csr_matrix

LE, GE, EQ = "<=", ">=", "="
SENSES = (LE, GE, EQ)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration-limit"


@dataclass(frozen=True)
class Tolerances:
    """All numerical tolerances of the LP layer in one place."""

    pivot: float = 1e-9
    feasibility: float = 1e-7
    optimality: float = 1e-9
    bound: float = 1e-9
    degenerate_streak: int = 50
    refactor_every: int = 100
    max_iterations: int | None = None


DEFAULT_TOLERANCES = Tolerances()


@dataclass(frozen=True)
class Row:
    """Sparse row ``sum(coefs[i] * x[cols[i]]) <sense> rhs``."""

    cols: tuple[int, ...]
    coefs: tuple[float, ...]
    sense: str
    rhs: float
    name: str = ""

    def __post_init__(self):
        if self.sense not in SENSES:
            raise ValueError(f"unknown row sense {self.sense!r}")
        if len(self.cols) != len(self.coefs):
            raise ValueError("cols and coefs differ in length")
        if not math.isfinite(self.rhs) or not all(math.isfinite(c) for c in self.coefs):
            raise ValueError("row coefficients must be finite")

    @classmethod
    def build(cls, terms: Mapping[int, float] | Iterable[tuple[int, float]], sense: str, rhs: float, name: str = "") -> "Row":
        """Row from ``{col: coef}`` or ``(col, coef)`` pairs; repeated columns are summed."""
        acc: dict[int, float] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for j, a in items:
            acc[int(j)] = acc.get(int(j), 0.0) + float(a)
        cols = tuple(sorted(j for j, a in acc.items() if a != 0.0))
        return cls(cols, tuple(acc[j] for j in cols), sense, float(rhs), name)

    def activity(self, x) -> float:
        return float(sum(a * x[j] for j, a in zip(self.cols, self.coefs)))

    def violation(self, x) -> float:
        """How far ``x`` is from satisfying the row (0 when satisfied)."""
        lhs = self.activity(x)
        if self.sense == GE:
            return max(0.0, self.rhs - lhs)
        if self.sense == LE:
            return max(0.0, lhs - self.rhs)
        return abs(lhs - self.rhs)

    def key(self) -> tuple:
        """Hashable identity used to spot duplicate rows."""
        return (self.cols, tuple(round(a, 12) for a in self.coefs), self.sense, round(self.rhs, 12))


class LpProgram:
    """Minimisation LP with bounded columns and rows that can be appended."""

    def __init__(self, name: str = "lp"):
        self.name = name
        self.col_names: list[str] = []
        self.lower: list[float] = []
        self.upper: list[float] = []
        self.objective: list[float] = []
        self.rows: list[Row] = []
        self._names: dict[str, int] = {}

    @property
    def num_columns(self) -> int:
        return len(self.col_names)

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    def add_column(self, name: str, lower: float = 0.0, upper: float = 1.0, obj: float = 0.0) -> int:
        if name in self._names:
            raise ValueError(f"duplicate column name {name!r}")
        if not lower <= upper or math.isnan(obj) or math.isinf(obj):
            raise ValueError(f"column {name!r}: invalid bounds [{lower}, {upper}] or objective {obj}")
        self._names[name] = len(self.col_names)
        self.col_names.append(name)
        self.lower.append(float(lower))
        self.upper.append(float(upper))
        self.objective.append(float(obj))
        return len(self.col_names) - 1

    def column(self, name: str) -> int:
        return self._names[name]

    def set_bounds(self, j: int, lower: float, upper: float) -> None:
        if not lower <= upper:
            raise ValueError(f"invalid bounds [{lower}, {upper}]")
        self.lower[j] = float(lower)
        self.upper[j] = float(upper)

    def add_row(self, row: Row) -> int:
        for j in row.cols:
            if not 0 <= j < self.num_columns:
                raise ValueError(f"row references unknown column {j}")
        self.rows.append(row)
        return len(self.rows) - 1

    def add_rows(self, rows: Iterable[Row]) -> None:
        for r in rows:
            self.add_row(r)

    def copy(self) -> "LpProgram":
        p = LpProgram(self.name)
        p.col_names = list(self.col_names)
        p.lower = list(self.lower)
        p.upper = list(self.upper)
        p.objective = list(self.objective)
        p.rows = list(self.rows)
        p._names = dict(self._names)
        return p

    def matrix(self, start: int = 0) -> csr_matrix:
        """Constraint matrix of rows ``start:`` as CSR."""
        rows = self.rows[start:]
        indptr = [0]
        idx: list[int] = []
        val: list[float] = []
        for r in rows:
            idx.extend(r.cols)
            val.extend(r.coefs)
            indptr.append(len(idx))
        return csr_matrix(
            (np.asarray(val, dtype=float), np.asarray(idx, dtype=np.int64), np.asarray(indptr, dtype=np.int64)),
            shape=(len(rows), self.num_columns),
        )

    def max_violation(self, x) -> float:
        worst = 0.0
        for r in self.rows:
            worst = max(worst, r.violation(x) / (1.0 + abs(r.rhs)))
        return worst

    def export_text(self) -> str:
        """Plain-text dump: objective, one line per column, one line per row.

        ::

            lp <name>
            min <c_0> <c_1> ...
            col <j> <name> <lower> <upper>
            row <i> <sense> <rhs> <j>:<coef> <j>:<coef> ...
        """
        out = [f"lp {self.name}", "min " + " ".join(repr(c) for c in self.objective)]
        for j, (nm, lo, up) in enumerate(zip(self.col_names, self.lower, self.upper)):
            out.append(f"col {j} {nm} {lo!r} {up!r}")
        for i, r in enumerate(self.rows):
            terms = " ".join(f"{j}:{a!r}" for j, a in zip(r.cols, r.coefs))
            out.append(f"row {i} {r.sense} {r.rhs!r} {terms}".rstrip())
        return "\n".join(out) + "\n"


@dataclass
class LpSolution:
    status: str
    objective: float
    x: np.ndarray
    iterations: int = 0
    backend: str = ""
    # backend-private warm-start handle
    state: object = field(default=None, repr=False, compare=False)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL
