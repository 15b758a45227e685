"""The shipped analyses, as DSL sources plus the properties they must have."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cache
from importlib import resources

from ..cfg import Cfg
from ..dsl import DslProgram, parse_program
from ..dsl.ast import Direction
from .reference import SOLVERS

ITER, FWD, BWD = Direction.ITERATIVE, Direction.FORWARD, Direction.BACKWARD

# code -> (file, description, expected (flw, lp, dir) per traverse statement)
_TABLE = {
    "PDOM": ("pdom.trav", "post-dominators", [(False, False, ITER), (True, False, BWD)]),
    "DOM": ("dom.trav", "dominators", [(False, False, ITER), (True, False, FWD)]),
    "RD": ("rd.trav", "reaching definitions", [(False, False, ITER), (True, True, FWD)]),
    "LV": ("lv.trav", "live variables", [(False, False, ITER), (True, True, BWD)]),
    "AE": ("ae.trav", "available expressions", [(False, False, ITER), (True, True, FWD)]),
    "VBE": ("vbe.trav", "very busy expressions", [(False, False, ITER), (True, True, BWD)]),
    "UDV": ("udv.trav", "used and defined variables", [(False, False, ITER)]),
    "COL": ("col.trav", "expression pair collector", [(False, False, FWD)]),
}
CODES = tuple(_TABLE)


@dataclass(frozen=True)
class AnalysisAsset:
    code: str
    description: str
    source: str = field(repr=False)
    expected_props: tuple[tuple[bool, bool, Direction], ...]

    @property
    def program(self) -> DslProgram:
        return _parse(self.source)

    @property
    def loop_sensitive(self) -> bool:
        return any(lp for _, lp, _ in self.expected_props)


@cache
def _parse(source: str) -> DslProgram:
    return parse_program(source)


def asset_source(filename: str) -> str:
    return resources.files(__package__).joinpath("assets", filename).read_text(encoding="utf-8")


@cache
def load_asset(code: str) -> AnalysisAsset:
    try:
        filename, description, props = _TABLE[code.upper()]
    except KeyError:
        raise KeyError(f"unknown analysis {code!r}; known: {', '.join(CODES)}") from None
    return AnalysisAsset(code.upper(), description, asset_source(filename), tuple(props))


def load_corpus() -> list[AnalysisAsset]:
    return [load_asset(code) for code in CODES]


def reference_solution(asset: AnalysisAsset, g: Cfg) -> dict[str, dict[int, object]]:
    """Outputs of every traversal of ``asset`` on ``g``, computed without the DSL.

    Collector traversals return nothing, so their output maps are empty.
    """
    traversal, solver = SOLVERS[asset.code]
    outputs = {t.name: {} for t in asset.program.traversals}
    outputs[traversal] = solver(g)
    return outputs


__all__ = ["AnalysisAsset", "CODES", "asset_source", "load_asset", "load_corpus", "reference_solution"]
