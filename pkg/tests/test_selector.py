import itertools
import re

import pytest

from travsel.cfg import Cyclicity
from travsel.dsl import Direction
from travsel.engine import Strategy
from travsel.props import AnalysisProperties
from travsel.selector import SelectorError, explain_line, select

FWD, BWD, ITER = Direction.FORWARD, Direction.BACKWARD, Direction.ITERATIVE
SEQ, BR = Cyclicity.SEQUENTIAL, Cyclicity.BRANCH_ONLY
LNB, LWB = Cyclicity.LOOP_NO_BRANCH, Cyclicity.LOOP_WITH_BRANCH

# written out by hand from the decision table, one line per leaf
EXPECTED = {
    (SEQ, FWD): ("P1", "INC"), (SEQ, BWD): ("P2", "DEC"),
    (BR, FWD): ("P3", "RPO"), (BR, BWD): ("P4", "PO"),
    (LWB, FWD): ("P5", "RPO"), (LWB, BWD): ("P6", "PO"),
    (LNB, FWD): ("P7", "INC"), (LNB, BWD): ("P8", "DEC"),
}
LOOP_SENSITIVE = {FWD: ("P9", "WRPO"), BWD: ("P10", "WPO")}


def all_combinations():
    for flw, lp, d, c in itertools.product((False, True), (False, True), Direction, Cyclicity):
        if lp and not flw:
            continue
        yield flw, lp, d, c


def expected(flw, lp, d, c):
    if not flw:
        return "P11", "ANY", True
    if d is ITER:
        return None
    if c.has_loop and lp:
        return (*LOOP_SENSITIVE[d], False)
    return (*EXPECTED[c, d], True)


@pytest.mark.parametrize("flw, lp, d, c", list(all_combinations()))
def test_every_combination(flw, lp, d, c):
    want = expected(flw, lp, d, c)
    props = AnalysisProperties(flw, lp, d)
    if want is None:
        with pytest.raises(SelectorError):
            select(props, c)
        return
    out = select(props, c)
    assert (out.path, out.plan.strategy.value, out.plan.single_pass) == want
    assert out.plan.direction is d


def test_enumeration_covers_all_eleven_paths():
    paths = set()
    for combo in all_combinations():
        try:
            paths.add(select(AnalysisProperties(*combo[:3]), combo[3]).path)
        except SelectorError:
            pass
    assert paths == {f"P{k}" for k in range(1, 12)}


def test_invariants():
    for flw, lp, d, c in all_combinations():
        try:
            out = select(AnalysisProperties(flw, lp, d), c)
        except SelectorError:
            assert flw and d is ITER
            continue
        worklist = out.plan.strategy.is_worklist
        if not lp:
            assert not worklist
        if flw and lp and c.has_loop:
            assert worklist
        assert out.plan.single_pass is (out.path not in ("P9", "P10"))
        assert out.plan.strategy is not Strategy.DFS


def test_named_examples():
    assert select(AnalysisProperties(True, False, BWD), LWB).path == "P6"
    assert select(AnalysisProperties(True, False, BWD), LWB).plan.strategy is Strategy.PO
    for c in Cyclicity:
        assert select(AnalysisProperties(False, False, ITER), c).plan.strategy is Strategy.ANY
    rd = select(AnalysisProperties(True, True, FWD), LNB)
    assert (rd.path, rd.plan.strategy, rd.plan.single_pass) == ("P9", Strategy.WRPO, False)


def test_loop_sensitivity_ignored_on_acyclic_graphs():
    for c in (SEQ, BR):
        for d in (FWD, BWD):
            a = select(AnalysisProperties(True, True, d), c)
            b = select(AnalysisProperties(True, False, d), c)
            assert a == b


def test_explain_line_format():
    props = AnalysisProperties(True, False, BWD)
    line = explain_line("domT", props, LWB, select(props, LWB))
    assert line == (
        "traversal=domT flw=true lp=false dir=BWD cyclicity=loop_with_branch "
        "path=P6 strategy=PO single_pass=true"
    )
    assert re.search(r"path=P6 strategy=PO", line)
