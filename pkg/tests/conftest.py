from pathlib import Path

import pytest

from travsel.analyses import asset_source
from travsel.cfg import Stmt, StmtKind, build_cfg, parse_cfg

ROOT = Path(__file__).resolve().parent.parent
RUNNING_EXAMPLE = ROOT / "examples" / "running_example.cfg"


def entry():
    return Stmt(StmtKind.ENTRY)


def exit_():
    return Stmt(StmtKind.EXIT)


def normal(defs=(), uses=(), exprs=(), label=None):
    return Stmt(StmtKind.NORMAL, frozenset(defs), frozenset(uses), frozenset(exprs), label)


def graph(n, edges, name="g", exits=None, stmts=None):
    """Graph on ``n`` nodes with entry 0 and exits ``exits`` (default: the last node)."""
    exits = {n - 1} if exits is None else set(exits)
    if stmts is None:
        stmts = [entry() if i == 0 else exit_() if i in exits else normal() for i in range(n)]
    return build_cfg(name, stmts, edges)


def chain(n):
    return graph(n, [(i, i + 1) for i in range(n - 1)], name=f"chain{n}")


@pytest.fixture
def running_example():
    return parse_cfg(RUNNING_EXAMPLE.read_text())


@pytest.fixture
def pdom_source():
    return asset_source("pdom.trav")


@pytest.fixture
def diamond():
    return graph(4, [(0, 1), (0, 2), (1, 3), (2, 3)], name="diamond")
