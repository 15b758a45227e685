"""Control-flow-graph data model.

A :class:`Cfg` is immutable once built.  Node ids are dense (``0..N-1``) and
follow the order in which nodes were created, which for generated and
hand-written graphs is the control-flow order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class CfgError(ValueError):
    """Raised for structurally invalid graphs or malformed graph files."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"line {line}, col {col or 1}: {message}"
        super().__init__(message)


class StmtKind(enum.Enum):
    ENTRY = "entry"
    EXIT = "exit"
    NORMAL = "normal"


class Cyclicity(enum.Enum):
    SEQUENTIAL = "sequential"
    BRANCH_ONLY = "branch"
    LOOP_NO_BRANCH = "loop_no_branch"
    LOOP_WITH_BRANCH = "loop_with_branch"

    @property
    def has_loop(self) -> bool:
        return self in (Cyclicity.LOOP_NO_BRANCH, Cyclicity.LOOP_WITH_BRANCH)

    @property
    def has_branch(self) -> bool:
        return self in (Cyclicity.BRANCH_ONLY, Cyclicity.LOOP_WITH_BRANCH)

    @classmethod
    def from_flags(cls, loop: bool, branch: bool) -> "Cyclicity":
        if loop:
            return cls.LOOP_WITH_BRANCH if branch else cls.LOOP_NO_BRANCH
        return cls.BRANCH_ONLY if branch else cls.SEQUENTIAL


@dataclass(frozen=True)
class Stmt:
    kind: StmtKind = StmtKind.NORMAL
    defs: frozenset[str] = frozenset()
    uses: frozenset[str] = frozenset()
    exprs: frozenset[str] = frozenset()
    label: str | None = None

    def __post_init__(self):
        for attr in ("defs", "uses", "exprs"):
            value = getattr(self, attr)
            if not isinstance(value, frozenset):
                object.__setattr__(self, attr, frozenset(value))
        if self.kind is not StmtKind.NORMAL and (self.defs or self.uses or self.exprs):
            raise CfgError(f"{self.kind.value} statement cannot carry defs/uses/exprs")
        for name in (*self.defs, *self.uses, *self.exprs):
            if not isinstance(name, str) or not name:
                raise CfgError(f"invalid name {name!r}")


@dataclass(frozen=True, eq=False)
class Node:
    """A CFG node.  Nodes compare and hash by id so they can live in DSL sets."""

    id: int
    stmt: Stmt
    preds: tuple[int, ...] = ()
    succs: tuple[int, ...] = ()

    @property
    def defs(self) -> frozenset[str]:
        return self.stmt.defs

    @property
    def uses(self) -> frozenset[str]:
        return self.stmt.uses

    @property
    def exprs(self) -> frozenset[str]:
        return self.stmt.exprs

    @property
    def kind(self) -> StmtKind:
        return self.stmt.kind

    def __eq__(self, other):
        if isinstance(other, Node):
            return self.id == other.id
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, Node):
            return self.id < other.id
        return NotImplemented

    def __hash__(self):
        return hash(("node", self.id))

    def __repr__(self):
        return f"Node({self.id})"


@dataclass(frozen=True, eq=False)
class Cfg:
    name: str
    nodes: tuple[Node, ...]
    entry: int
    exits: frozenset[int]
    cyclicity: Cyclicity
    # insertion order; together with it both preds and succs keep their order
    edge_list: tuple[tuple[int, int], ...] = field(default=(), repr=False)

    def __len__(self):
        return len(self.nodes)

    @property
    def edges(self) -> list[tuple[int, int]]:
        if self.edge_list:
            return list(self.edge_list)
        return [(n.id, s) for n in self.nodes for s in n.succs]

    def structurally_equal(self, other: "Cfg") -> bool:
        return (
            self.name == other.name
            and self.entry == other.entry
            and self.exits == other.exits
            and self.cyclicity == other.cyclicity
            and len(self.nodes) == len(other.nodes)
            and all(
                a.stmt == b.stmt and a.preds == b.preds and a.succs == b.succs
                for a, b in zip(self.nodes, other.nodes)
            )
        )

    def reversed(self) -> "Cfg":
        """Edge-reversed copy with ids relabelled ``i -> N-1-i``.

        Only defined for single-exit graphs; the old exit becomes the entry.
        """
        if len(self.exits) != 1:
            raise CfgError("cannot reverse a graph with several exits")
        (old_exit,) = self.exits
        last = len(self.nodes) - 1
        stmts = []
        for n in reversed(self.nodes):
            kind = StmtKind.NORMAL
            if n.id == old_exit:
                kind = StmtKind.ENTRY
            elif n.id == self.entry:
                kind = StmtKind.EXIT
            stmts.append(Stmt(kind, n.defs, n.uses, n.exprs, n.stmt.label))
        edges = [(last - v, last - u) for u, v in self.edges]
        return build_cfg(self.name + "_rev", stmts, edges)


def build_cfg(
    name: str,
    stmts: Sequence[Stmt],
    edges: Iterable[tuple[int, int]],
    cyclicity: Cyclicity | None = None,
    declared: tuple[bool, bool] | None = None,
) -> Cfg:
    """Validate and assemble a graph.

    ``stmts[i]`` becomes node ``i``.  Edge order is preserved in ``preds`` and
    ``succs``.  When ``declared`` holds ``(loop, branch)`` flags they fix the
    cyclicity after the loop flag is checked against the structure; otherwise
    ``cyclicity`` is used verbatim, or computed when that is ``None`` too.
    """
    from .order import classify_cyclicity, find_back_edges

    n = len(stmts)
    if n == 0:
        raise CfgError("graph has no nodes")
    preds: list[list[int]] = [[] for _ in range(n)]
    succs: list[list[int]] = [[] for _ in range(n)]
    edges = tuple(edges)
    for u, v in edges:
        for end in (u, v):
            if not (0 <= end < n):
                raise CfgError(f"edge {u}->{v}: dangling endpoint {end}")
        if v in succs[u]:
            raise CfgError(f"duplicate edge {u}->{v}")
        succs[u].append(v)
        preds[v].append(u)

    entries = [i for i, s in enumerate(stmts) if s.kind is StmtKind.ENTRY]
    if len(entries) != 1:
        raise CfgError(f"expected exactly one entry node, found {len(entries)}")
    entry = entries[0]
    if preds[entry]:
        raise CfgError(f"entry node {entry} has predecessors {preds[entry]}")
    exits = frozenset(i for i, s in enumerate(stmts) if s.kind is StmtKind.EXIT)
    if not exits:
        raise CfgError("graph has no exit node")
    for x in exits:
        if succs[x]:
            raise CfgError(f"exit node {x} has successors {succs[x]}")

    seen = {entry}
    stack = [entry]
    while stack:
        u = stack.pop()
        for v in succs[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    if len(seen) != n:
        missing = sorted(set(range(n)) - seen)
        raise CfgError(f"unreachable nodes {missing}")

    nodes = tuple(
        Node(i, stmts[i], tuple(preds[i]), tuple(succs[i])) for i in range(n)
    )
    g = Cfg(name, nodes, entry, exits, Cyclicity.SEQUENTIAL, edges)

    if declared is not None:
        loop, branch = declared
        has_back = bool(find_back_edges(g))
        if has_back and not loop:
            raise CfgError(f"graph {name!r} declares no loop but has a back edge")
        if loop and not has_back:
            raise CfgError(f"graph {name!r} declares a loop but has no back edge")
        cyclicity = Cyclicity.from_flags(loop, branch)
    elif cyclicity is None:
        cyclicity = classify_cyclicity(g)

    if cyclicity is Cyclicity.SEQUENTIAL:
        for u, v in g.edges:
            if not u < v:
                raise CfgError(f"sequential graph {name!r} has non-increasing edge {u}->{v}")
    object.__setattr__(g, "cyclicity", cyclicity)
    return g
