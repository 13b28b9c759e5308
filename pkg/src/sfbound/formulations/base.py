"""Shared pieces of every formulation: kinds, variable maps, lazy families."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..instance import SfpInstance
from ..lp import LpProgram, Row


class Kind(str, enum.Enum):
    UF = "uf"
    UC = "uc"
    DF = "df"
    DC = "dc"
    KLSVZ = "klsvz"
    LT = "lt"
    ET = "et"
    EDF = "edf"
    EDC = "edc"
    SEDC = "sedc"
    MR = "mr"

    @classmethod
    def parse(cls, text: str) -> "Kind":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown formulation {text!r}; choose from {[k.value for k in cls]}") from None


class BuildRefused(RuntimeError):
    """The static model would be too large to build."""


class VarMap:
    """Two-way map between symbolic variables and LP columns.

    A symbol is a tuple whose first element names the variable family, for
    instance ``("x", e)`` for an edge or ``("y", k, i, j)`` for an arc of
    layer ``k``.
    """

    def __init__(self, prog: LpProgram):
        self.prog = prog
        self._col: dict[tuple, int] = {}
        self._sym: list[tuple] = []

    def add(self, key: tuple, lower: float = 0.0, upper: float = 1.0, obj: float = 0.0) -> int:
        if key in self._col:
            raise ValueError(f"variable {key} declared twice")
        name = key[0] + "[" + ",".join(str(p) for p in key[1:]) + "]"
        col = self.prog.add_column(name, lower, upper, obj)
        self._col[key] = col
        self._sym.append(key)
        return col

    def __getitem__(self, key: tuple) -> int:
        return self._col[key]

    def __contains__(self, key: tuple) -> bool:
        return key in self._col

    def __len__(self) -> int:
        return len(self._sym)

    def get(self, key: tuple, default=None):
        return self._col.get(key, default)

    def symbol(self, col: int) -> tuple:
        return self._sym[col]

    def symbols(self, family: str | None = None) -> list[tuple]:
        return [k for k in self._sym if family is None or k[0] == family]

    def families(self) -> set[str]:
        return {k[0] for k in self._sym}

    def row(self, terms: dict[tuple, float], sense: str, rhs: float, name: str = "") -> Row:
        return Row.build({self._col[k]: a for k, a in terms.items()}, sense, rhs, name)

    def value(self, point, key: tuple, default: float = 0.0) -> float:
        col = self._col.get(key)
        return default if col is None else float(point[col])


@dataclass(frozen=True)
class ViolatedCut:
    """A violated member of a lazily generated constraint family.

    ``terms`` is symbolic (variable key -> coefficient); ``row`` is the same
    constraint on LP columns when a :class:`VarMap` was available.
    """

    family: str
    index: tuple
    side: frozenset
    terms: dict
    sense: str
    rhs: float
    violation: float
    row: Row | None = None


Separator = Callable[["FormulationModel", np.ndarray], list[ViolatedCut]]


@dataclass(frozen=True)
class LazyFamily:
    id: str
    separate: Separator
    description: str


@dataclass
class FormulationModel:
    kind: Kind
    inst: SfpInstance
    program: LpProgram
    varmap: VarMap
    lazy: list[LazyFamily] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def x_values(self, point) -> np.ndarray:
        """Undirected edge values ``x_e`` of an LP point."""
        return np.array([point[self.varmap[("x", e)]] for e in range(self.inst.graph.edge_count)])

    def arc_values(self, point, prefix: tuple) -> np.ndarray:
        """Values of ``prefix + (tail, head)`` per arc, in :meth:`Graph.arcs` order."""
        return np.array([point[self.varmap[prefix + (i, j)]] for i, j, _ in self.inst.graph.arcs()])


def add_edge_vars(vm: VarMap, inst: SfpInstance) -> list[int]:
    return [vm.add(("x", e), 0.0, 1.0, c) for e, (_, _, c) in enumerate(inst.graph.edges)]


def add_arc_vars(vm: VarMap, inst: SfpInstance, prefix: tuple) -> None:
    for i, j, _ in inst.graph.arcs():
        vm.add(prefix + (i, j))


def flow_conservation(vm: VarMap, inst: SfpInstance, prefix: tuple, node: int) -> dict[tuple, float]:
    """Terms of ``f(delta+(node)) - f(delta-(node))`` for commodity ``prefix``."""
    terms: dict[tuple, float] = {}
    for nb, _ in inst.graph.adjacency()[node]:
        terms[prefix + (node, nb)] = terms.get(prefix + (node, nb), 0.0) + 1.0
        terms[prefix + (nb, node)] = terms.get(prefix + (nb, node), 0.0) - 1.0
    return terms
