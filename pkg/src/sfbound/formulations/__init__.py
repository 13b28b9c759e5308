"""LP relaxations of the Steiner Forest problem.

:func:`build` turns an instance into a :class:`FormulationModel`: the static
part as an :class:`~sfbound.lp.LpProgram`, a :class:`VarMap` naming every
column, and the lazily separated constraint families.  All columns lie in
``[0, 1]`` except the component count ``R`` of the forest model, which lies
in ``[1, K]``.  The objective is ``c^T x`` (plus the pair-connection terms of
the lifted cut model).
"""

from __future__ import annotations

from ..instance import SfpInstance
from .base import BuildRefused, FormulationModel, Kind, LazyFamily, VarMap, ViolatedCut
from .basic import build_dc, build_df, build_klsvz, build_uc, build_uf
from .extended import build_edc, build_edf, build_sedc
from .mr import build_mr
from .trees import build_et, build_lt

BUILDERS = {
    Kind.UF: build_uf,
    Kind.UC: build_uc,
    Kind.DF: build_df,
    Kind.DC: build_dc,
    Kind.KLSVZ: build_klsvz,
    Kind.LT: build_lt,
    Kind.ET: build_et,
    Kind.EDF: build_edf,
    Kind.EDC: build_edc,
    Kind.SEDC: build_sedc,
    Kind.MR: build_mr,
}


def build(inst: SfpInstance, kind: Kind | str) -> FormulationModel:
    kind = Kind.parse(kind) if isinstance(kind, str) else kind
    return BUILDERS[kind](inst)


__all__ = [
    "BUILDERS",
    "BuildRefused",
    "FormulationModel",
    "Kind",
    "LazyFamily",
    "VarMap",
    "ViolatedCut",
    "build",
]
