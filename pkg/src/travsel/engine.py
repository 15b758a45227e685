"""Running traversals over a CFG under a given strategy, with instrumentation.

Two execution styles exist.  Ordering strategies sweep a fixed node order
pass after pass until a pass changes nothing (or stop after one pass when
the plan is single-pass).  Worklist strategies start from a post-order or
reverse post-order queue and re-enqueue a node only when an output it read
has changed.
"""

from __future__ import annotations

import enum
import functools
import os
import time
from collections import deque
from dataclasses import asdict, dataclass

from .cfg import Cfg, dfs_preorder, post_order, predecessors_first_order, reverse_post_order, successors_first_order
from .dsl.ast import Direction, DslProgram
from .dsl.interp import CompiledProgram, Session

MAX_PASSES_ENV = "BCFA_MAX_PASSES"


class Strategy(enum.Enum):
    ANY = "ANY"
    INC = "INC"
    DEC = "DEC"
    PO = "PO"
    RPO = "RPO"
    WPO = "WPO"
    WRPO = "WRPO"
    DFS = "DFS"

    @property
    def is_worklist(self) -> bool:
        return self in (Strategy.WPO, Strategy.WRPO)


class DivergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExecutionPlan:
    strategy: Strategy
    single_pass: bool = False
    direction: Direction = Direction.FORWARD

    def __post_init__(self):
        if self.single_pass and self.strategy.is_worklist:
            raise ValueError("worklist strategies cannot run single-pass")


@dataclass
class RunMetrics:
    visits: int = 0
    passes: int = 0
    fixpoint_checks: int = 0
    worklist_pushes: int = 0
    wall_time: float = 0.0

    def __iadd__(self, other: "RunMetrics"):
        self.visits += other.visits
        self.passes += other.passes
        self.fixpoint_checks += other.fixpoint_checks
        self.worklist_pushes += other.worklist_pushes
        self.wall_time += other.wall_time
        return self

    def counters(self) -> tuple[int, int, int, int]:
        """Everything except wall time, which is never reproducible."""
        return (self.visits, self.passes, self.fixpoint_checks, self.worklist_pushes)

    def to_dict(self) -> dict:
        return asdict(self)


def max_passes(n: int) -> int:
    """Divergence ceiling: ``BCFA_MAX_PASSES`` if set, else ``10 * n``."""
    raw = os.environ.get(MAX_PASSES_ENV)
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"{MAX_PASSES_ENV} must be an integer, got {raw!r}") from None
        if value < 1:
            raise ValueError(f"{MAX_PASSES_ENV} must be at least 1")
        return value
    return 10 * max(n, 1)


def make_ordering(g: Cfg, s: Strategy, direction: Direction = Direction.FORWARD) -> list[int]:
    """Visit order of an ordering strategy.

    PO and RPO follow the traversal direction: for a backward traversal they
    are taken on the reversed graph, so RPO still means "dependencies first".
    """
    n = len(g)
    if s in (Strategy.ANY, Strategy.INC):
        return list(range(n))
    if s is Strategy.DEC:
        return list(range(n - 1, -1, -1))
    if s is Strategy.DFS:
        return dfs_preorder(g)
    if s is Strategy.PO:
        return successors_first_order(g) if direction is Direction.BACKWARD else post_order(g)
    if s is Strategy.RPO:
        return predecessors_first_order(g) if direction is Direction.BACKWARD else reverse_post_order(g)
    raise ValueError(f"{s.value} is a worklist strategy and has no fixed ordering")


def _store(out: dict, v: int, value):
    if value is None:
        out.pop(v, None)
    else:
        out[v] = value


def run_passes(session: Session, traversal: str, plan: ExecutionPlan, fixpoint: str | None = None):
    """Sweep an ordering until a whole pass leaves every output unchanged."""
    g = session.cfg
    n = len(g)
    m = RunMetrics()
    start = time.perf_counter()
    out = session.outputs[traversal]

    if plan.direction is Direction.ITERATIVE:
        for v in range(n):
            _store(out, v, session.visit(traversal, v))
        m.visits, m.passes = n, 1
        m.wall_time = time.perf_counter() - start
        return out, m

    order = make_ordering(g, plan.strategy, plan.direction)
    ceiling = max_passes(n)
    seen: set[int] = set()
    while True:
        m.passes += 1
        changed = False
        for v in order:
            new = session.visit(traversal, v)
            m.visits += 1
            if v not in seen:
                seen.add(v)
                changed = True
            elif not plan.single_pass:
                m.fixpoint_checks += 1
                if not session.converged(fixpoint, new, out.get(v)):
                    changed = True
            _store(out, v, new)
        if plan.single_pass or not changed:
            break
        if m.passes >= ceiling:
            raise DivergenceError(
                f"traversal {traversal!r} did not converge within {ceiling} passes "
                f"({plan.strategy.value} on {g.name!r})"
            )
    m.wall_time = time.perf_counter() - start
    return out, m


def run_worklist(session: Session, traversal: str, strategy: Strategy, direction: Direction, fixpoint: str | None = None):
    """Change-driven worklist seeded with PO (WPO) or RPO (WRPO)."""
    if not strategy.is_worklist:
        raise ValueError(f"{strategy.value} is not a worklist strategy")
    if direction is Direction.ITERATIVE:
        return run_passes(session, traversal, ExecutionPlan(Strategy.ANY, True, direction), fixpoint)

    g = session.cfg
    n = len(g)
    m = RunMetrics(passes=1)
    start = time.perf_counter()
    out = session.outputs[traversal]
    seed = make_ordering(g, Strategy.PO if strategy is Strategy.WPO else Strategy.RPO, direction)
    queue = deque(seed)
    queued = set(seed)
    seen: set[int] = set()
    # readers[v]: nodes whose latest evaluation read v's output
    readers: list[set[int]] = [set() for _ in range(n)]
    last_reads: list[set[int]] = [set() for _ in range(n)]
    forward = direction is Direction.FORWARD
    ceiling = max_passes(n) * n

    while queue:
        u = queue.popleft()
        queued.discard(u)
        new = session.visit(traversal, u)
        m.visits += 1
        for r in last_reads[u]:
            readers[r].discard(u)
        last_reads[u] = session.reads
        for r in session.reads:
            readers[r].add(u)

        if u in seen:
            m.fixpoint_checks += 1
            converged = session.converged(fixpoint, new, out.get(u))
        else:
            seen.add(u)
            converged = False
        _store(out, u, new)
        if converged:
            continue

        waiting = readers[u]
        if not waiting:
            continue
        neighbours = g.nodes[u].succs if forward else g.nodes[u].preds
        pending = [w for w in neighbours if w in waiting]
        # a node re-reading its own output is an accumulator, not a dependency
        pending += sorted(waiting.difference(neighbours).difference((u,)))
        for w in pending:
            if w not in queued:
                queue.append(w)
                queued.add(w)
                m.worklist_pushes += 1
        if m.visits > ceiling:
            raise DivergenceError(
                f"traversal {traversal!r} did not converge within {ceiling} visits "
                f"({strategy.value} on {g.name!r})"
            )
    m.wall_time = time.perf_counter() - start
    return out, m


def run_traversal(session: Session, traversal: str, plan: ExecutionPlan, fixpoint: str | None = None):
    if plan.strategy.is_worklist:
        return run_worklist(session, traversal, plan.strategy, plan.direction, fixpoint)
    return run_passes(session, traversal, plan, fixpoint)


@functools.lru_cache(maxsize=64)
def compile_program(p: DslProgram) -> CompiledProgram:
    return CompiledProgram(p)


def execute_analysis(p: DslProgram | CompiledProgram, g: Cfg, plans, detail: list | None = None):
    """Run every ``traverse`` statement of ``p`` on ``g`` in program order.

    ``plans`` holds one :class:`ExecutionPlan` per traverse statement.
    Returns ``(outputs, metrics)`` where ``outputs`` maps traversal name to
    ``{node id: value}`` and ``metrics`` sums all invocations.  When
    ``detail`` is a list it receives the metrics of each invocation.
    """
    compiled = p if isinstance(p, CompiledProgram) else compile_program(p)
    invocations = compiled.program.invocations
    plans = list(plans)
    if len(plans) != len(invocations):
        raise ValueError(f"{len(invocations)} traverse statements but {len(plans)} plans")
    session = Session(compiled, g)
    total = RunMetrics()
    for inv, plan in zip(invocations, plans):
        if plan.direction is not inv.direction:
            raise ValueError(
                f"plan direction {plan.direction.value} does not match "
                f"traverse({inv.traversal}, {inv.direction.value})"
            )
        _, m = run_traversal(session, inv.traversal, plan, inv.fixpoint)
        total += m
        if detail is not None:
            detail.append(m)
    return session.outputs, total


def fixed_plans(p: DslProgram, strategy: Strategy, single_pass: bool = False) -> list[ExecutionPlan]:
    """The same strategy for every traverse statement."""
    return [ExecutionPlan(strategy, single_pass, inv.direction) for inv in p.invocations]
