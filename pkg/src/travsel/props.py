"""Static properties of traversals: data-flow and loop sensitivity.

Both detectors are syntactic scans over a traversal body in three-address
form (see :func:`travsel.dsl.normalize_three_address`).  Control statements
are looked through: a call inside an ``if`` or ``foreach`` counts the same as
one at top level.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .dsl import ast as A
from .dsl.ast import Direction
from .dsl.normalize import normalize_three_address


@dataclass(frozen=True)
class AliasEnv:
    names: frozenset[str]

    def __contains__(self, name: str) -> bool:
        return name in self.names


@dataclass(frozen=True)
class OutputVarSets:
    related: frozenset[str]    # v = output(n', t) with n' aliasing the visited node
    unrelated: frozenset[str]  # v = output(n', t) with n' some other node


@dataclass(frozen=True)
class AnalysisProperties:
    data_flow_sensitive: bool
    loop_sensitive: bool
    direction: Direction

    def __post_init__(self):
        if self.loop_sensitive and not self.data_flow_sensitive:
            raise ValueError("loop sensitivity implies data-flow sensitivity")

    def as_tuple(self) -> tuple[bool, bool, Direction]:
        return (self.data_flow_sensitive, self.loop_sensitive, self.direction)


@dataclass(frozen=True)
class TraversalProps:
    traversal: str
    props: AnalysisProperties


@dataclass(frozen=True)
class PropsReport:
    entries: tuple[TraversalProps, ...]
    static_seconds: float = field(default=0.0, compare=False)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def rows(self) -> list[tuple[bool, bool, Direction]]:
        return [e.props.as_tuple() for e in self.entries]

    def lines(self) -> list[str]:
        us = round(self.static_seconds * 1e6)
        return [
            f"{e.traversal} flw={int(e.props.data_flow_sensitive)} lp={int(e.props.loop_sensitive)} "
            f"dir={e.props.direction.short} static_us={us}"
            for e in self.entries
        ]


def _assignments(t: A.TraversalDecl):
    """(target, rhs) for every binding in the body.  ``rhs`` is None for a
    binding whose value is not an expression (uninitialised declarations,
    foreach variables)."""
    for s in A.walk_stmts(t.body):
        if isinstance(s, A.Assign):
            yield s.name, s.value
        elif isinstance(s, A.VarDecl):
            yield s.name, s.init
        elif isinstance(s, A.Foreach):
            yield s.var, None


def compute_aliases(t: A.TraversalDecl, globals_: frozenset[str] = frozenset()) -> AliasEnv:
    """Names that are bound to the visited node on every path.

    A local qualifies when every assignment to it copies a name that
    already qualifies.  Names in ``globals_`` never qualify since they carry
    values over from earlier visits.  Names assigned from each other in a
    cycle stay out, which only errs towards "sensitive".
    """
    by_target: dict[str, list] = {}
    for target, rhs in _assignments(t):
        by_target.setdefault(target, []).append(rhs)
    for name in globals_:
        by_target.pop(name, None)
    names = {t.param}
    if "node" not in by_target:
        names.add("node")
    changed = True
    while changed:
        changed = False
        for target, rhss in by_target.items():
            if target in names:
                continue
            if all(isinstance(r, A.Name) and r.id in names for r in rhss):
                names.add(target)
                changed = True
    # a parameter that is itself reassigned from something else stops aliasing
    for target, rhss in by_target.items():
        if target in (t.param, "node") and not all(isinstance(r, A.Name) and r.id in names for r in rhss):
            names.discard(target)
    return AliasEnv(frozenset(names))


def _reads_other_node(call: A.Call, t: A.TraversalDecl, aliases: AliasEnv) -> bool:
    target, ref = call.args
    return (
        isinstance(ref, A.Name) and ref.id == t.name
        and not (isinstance(target, A.Name) and target.id in aliases)
    )


def detect_data_flow_sensitivity(t: A.TraversalDecl, aliases: AliasEnv) -> bool:
    return any(_reads_other_node(c, t, aliases) for c in A.calls_in(t.body, "output"))


def output_variables(t: A.TraversalDecl, aliases: AliasEnv) -> OutputVarSets:
    related, unrelated = set(), set()
    for target, rhs in _assignments(t):
        if not (isinstance(rhs, A.Call) and rhs.func == "output"):
            continue
        node_arg, ref = rhs.args
        if not (isinstance(ref, A.Name) and ref.id == t.name):
            continue
        if isinstance(node_arg, A.Name) and node_arg.id in aliases:
            related.add(target)
        else:
            unrelated.add(target)
    return OutputVarSets(frozenset(related), frozenset(unrelated))


def detect_loop_sensitivity(t: A.TraversalDecl, aliases: AliasEnv) -> bool:
    v = output_variables(t, aliases)

    def name(e):
        return e.id if isinstance(e, A.Name) else None

    def mixes(c1, c2):
        a, b = name(c1), name(c2)
        return (a in v.related and b in v.unrelated) or (a in v.unrelated and b in v.related)

    expand = shrink = gen = kill = False
    for call in A.calls_in(t.body):
        if call.func == "union":
            expand = expand or mixes(*call.args)
        elif call.func == "intersection":
            shrink = shrink or mixes(*call.args)
        elif call.func in ("add", "addAll"):
            gen = gen or name(call.args[0]) in v.related
        elif call.func in ("remove", "removeAll"):
            kill = kill or name(call.args[0]) in v.related
    return (expand and gen) or (shrink and kill)


def traversal_properties(
    t: A.TraversalDecl, direction: Direction, globals_: frozenset[str] = frozenset()
) -> AnalysisProperties:
    t = normalize_three_address(t)
    aliases = compute_aliases(t, globals_)
    flw = detect_data_flow_sensitivity(t, aliases)
    lp = flw and detect_loop_sensitivity(t, aliases)
    return AnalysisProperties(flw, lp, direction)


def extract_properties(p: A.DslProgram) -> PropsReport:
    start = time.perf_counter()
    globals_ = frozenset(d.name for d in p.globals)
    entries = tuple(
        TraversalProps(inv.traversal, traversal_properties(p.traversal(inv.traversal), inv.direction, globals_))
        for inv in p.invocations
    )
    return PropsReport(entries, time.perf_counter() - start)
