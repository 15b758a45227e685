"""Decision tree from (traversal properties, graph cyclicity) to an execution plan."""

from __future__ import annotations

from dataclasses import dataclass

from .cfg import Cyclicity
from .dsl.ast import Direction
from .engine import ExecutionPlan, Strategy
from .props import AnalysisProperties


class SelectorError(ValueError):
    pass


@dataclass(frozen=True)
class DecisionOutcome:
    plan: ExecutionPlan
    path: str  # "P1" .. "P11"


# (cyclicity group, direction) -> (path, strategy) for data-flow sensitive traversals
_SENSITIVE = {
    ("seq", Direction.FORWARD): ("P1", Strategy.INC),
    ("seq", Direction.BACKWARD): ("P2", Strategy.DEC),
    ("branch", Direction.FORWARD): ("P3", Strategy.RPO),
    ("branch", Direction.BACKWARD): ("P4", Strategy.PO),
    ("loop_branch", Direction.FORWARD): ("P5", Strategy.RPO),
    ("loop_branch", Direction.BACKWARD): ("P6", Strategy.PO),
    ("loop", Direction.FORWARD): ("P7", Strategy.INC),
    ("loop", Direction.BACKWARD): ("P8", Strategy.DEC),
    ("loop_sensitive", Direction.FORWARD): ("P9", Strategy.WRPO),
    ("loop_sensitive", Direction.BACKWARD): ("P10", Strategy.WPO),
}

_GROUP = {
    Cyclicity.SEQUENTIAL: "seq",
    Cyclicity.BRANCH_ONLY: "branch",
    Cyclicity.LOOP_WITH_BRANCH: "loop_branch",
    Cyclicity.LOOP_NO_BRANCH: "loop",
}


def select(props: AnalysisProperties, c: Cyclicity) -> DecisionOutcome:
    d = props.direction
    if not props.data_flow_sensitive:
        return DecisionOutcome(ExecutionPlan(Strategy.ANY, True, d), "P11")
    if d is Direction.ITERATIVE:
        raise SelectorError("an ITERATIVE traversal cannot be data-flow sensitive")
    # loop sensitivity only matters when the graph has a cycle
    group = "loop_sensitive" if c.has_loop and props.loop_sensitive else _GROUP[c]
    path, strategy = _SENSITIVE[group, d]
    single = strategy not in (Strategy.WPO, Strategy.WRPO)
    return DecisionOutcome(ExecutionPlan(strategy, single, d), path)


def explain_line(traversal: str, props: AnalysisProperties, c: Cyclicity, outcome: DecisionOutcome) -> str:
    return (
        f"traversal={traversal} flw={str(props.data_flow_sensitive).lower()} "
        f"lp={str(props.loop_sensitive).lower()} dir={props.direction.short} "
        f"cyclicity={c.value} path={outcome.path} strategy={outcome.plan.strategy.value} "
        f"single_pass={str(outcome.plan.single_pass).lower()}"
    )
