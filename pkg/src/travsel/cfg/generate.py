"""Seeded generator of structured control-flow graphs.

Graphs are lowered from a random structured program (statements, if/else,
header-tested and bottom-tested loops), so ids follow control-flow order,
every node reaches the single exit, and every loop is reducible in both
directions.  Candidates are drawn until one classifies as the requested
class.

``LOOP_NO_BRANCH`` graphs use bottom-tested loops only.  A header-tested
loop also classifies as loop-without-branch, but its body cannot be swept
in descending id order in one pass (see ``tests/test_known_limits.py``).

A normal node evaluates at most one expression.  When it does, its uses are
exactly that expression's variables, so the expression analyses can read
an expression's operands off the node that computes it.
"""

from __future__ import annotations

import random

from .model import Cfg, Cyclicity, Stmt, StmtKind, build_cfg

VARIABLES = ("a", "b", "c", "d", "e", "f")
EXPRESSIONS = {
    "a+b": ("a", "b"),
    "b*c": ("b", "c"),
    "c-d": ("c", "d"),
    "a*d": ("a", "d"),
    "e+f": ("e", "f"),
    "b+e": ("b", "e"),
    "f*a": ("f", "a"),
    "d-e": ("d", "e"),
}

MIN_SIZE = {
    Cyclicity.SEQUENTIAL: 2,
    Cyclicity.LOOP_NO_BRANCH: 3,
    Cyclicity.BRANCH_ONLY: 4,
    Cyclicity.LOOP_WITH_BRANCH: 5,
}

# default corpus mix: sequential / branch / loop-with-branch / loop-no-branch
DEFAULT_MIX = (
    (Cyclicity.SEQUENTIAL, 0.65),
    (Cyclicity.BRANCH_ONLY, 0.25),
    (Cyclicity.LOOP_WITH_BRANCH, 0.07),
    (Cyclicity.LOOP_NO_BRANCH, 0.03),
)

_MAX_ATTEMPTS = 5000


class InfeasibleGraph(ValueError):
    pass


def _kinds_for(cls: Cyclicity) -> tuple[str, ...]:
    return {
        Cyclicity.SEQUENTIAL: ("stmt",),
        Cyclicity.BRANCH_ONLY: ("stmt", "if", "ifelse"),
        Cyclicity.LOOP_NO_BRANCH: ("stmt", "do"),
        Cyclicity.LOOP_WITH_BRANCH: ("stmt", "if", "ifelse", "while", "do"),
    }[cls]


def _cost_min(kind: str) -> int:
    return {"stmt": 1, "if": 2, "ifelse": 3, "while": 2, "do": 1}[kind]


def _gen_block(rng: random.Random, budget: int, kinds, depth: int) -> list:
    """Random statement list consuming exactly ``budget`` nodes."""
    items = []
    while budget > 0:
        choices = [k for k in kinds if _cost_min(k) <= budget]
        if depth > 3:
            choices = ["stmt"]
        weights = [3.0 if k == "stmt" else 1.0 for k in choices]
        kind = rng.choices(choices, weights)[0]
        if kind == "stmt":
            items.append(("stmt",))
            budget -= 1
            continue
        cap = budget - 1
        if kind == "ifelse":
            then_n = rng.randint(1, cap - 1)
            else_n = rng.randint(1, cap - then_n)
            items.append((
                "ifelse",
                _gen_block(rng, then_n, kinds, depth + 1),
                _gen_block(rng, else_n, kinds, depth + 1),
            ))
            budget -= 1 + then_n + else_n
        else:
            low = 0 if kind == "do" else 1
            body_n = rng.randint(low, cap)
            items.append((kind, _gen_block(rng, body_n, kinds, depth + 1)))
            budget -= 1 + body_n
    return items


class _Lowering:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self.stmts: list[Stmt] = []
        self.edges: list[tuple[int, int]] = []

    def new_node(self, preds, kind=StmtKind.NORMAL, role="s") -> int:
        nid = len(self.stmts)
        if kind is StmtKind.NORMAL:
            self.stmts.append(self._random_stmt(f"{role}{nid}"))
        else:
            self.stmts.append(Stmt(kind))
        for p in preds:
            self.edges.append((p, nid))
        return nid

    def _random_stmt(self, label: str) -> Stmt:
        rng = self.rng
        defs = {rng.choice(VARIABLES)} if rng.random() < 0.6 else set()
        # at most one expression, whose variables are then exactly the uses
        exprs = {rng.choice(sorted(EXPRESSIONS))} if rng.random() < 0.5 else set()
        uses = {v for e in exprs for v in EXPRESSIONS[e]}
        if not exprs and rng.random() < 0.4:
            uses.add(rng.choice(VARIABLES))
        return Stmt(StmtKind.NORMAL, frozenset(defs), frozenset(uses), frozenset(exprs), label)

    def block(self, items, preds: list[int]) -> list[int]:
        for item in items:
            preds = self.item(item, preds)
        return preds

    def item(self, item, preds: list[int]) -> list[int]:
        kind = item[0]
        if kind == "stmt":
            return [self.new_node(preds)]
        if kind == "if":
            c = self.new_node(preds, role="if")
            return self.block(item[1], [c]) + [c]
        if kind == "ifelse":
            c = self.new_node(preds, role="if")
            return self.block(item[1], [c]) + self.block(item[2], [c])
        if kind == "while":
            h = self.new_node(preds, role="while")
            for u in self.block(item[1], [h]):
                self.edges.append((u, h))
            return [h]
        if kind == "do":
            start = len(self.stmts)
            ends = self.block(item[1], preds)
            latch = self.new_node(ends, role="until")
            self.edges.append((latch, start))
            return [latch]
        raise AssertionError(kind)


def _lower(rng: random.Random, items, name: str) -> Cfg:
    low = _Lowering(rng)
    entry = low.new_node([], StmtKind.ENTRY)
    ends = low.block(items, [entry])
    low.new_node(ends, StmtKind.EXIT)
    return build_cfg(name, low.stmts, low.edges)


def generate_random_cfg(seed: int, size: int, cls: Cyclicity, name: str | None = None) -> Cfg:
    """Deterministic structured CFG with exactly ``size`` nodes of class ``cls``."""
    if size < 2:
        raise InfeasibleGraph(f"size must be at least 2, got {size}")
    if size < MIN_SIZE[cls]:
        raise InfeasibleGraph(f"{cls.value} graphs need at least {MIN_SIZE[cls]} nodes, got {size}")
    rng = random.Random(f"{seed}:{size}:{cls.value}")
    name = name or f"g{seed}_{cls.value}_{size}"
    kinds = _kinds_for(cls)
    for _ in range(_MAX_ATTEMPTS):
        items = _gen_block(rng, size - 2, kinds, 0)
        g = _lower(rng, items, name)
        if g.cyclicity is cls:
            return g
    raise InfeasibleGraph(f"no {cls.value} graph of size {size} found for seed {seed}")


def generate_corpus(seed: int, count: int, size_range: tuple[int, int] = (2, 24), mix=DEFAULT_MIX) -> list[Cfg]:
    """``count`` graphs drawn with the given class mix; sizes are clipped up
    to the class minimum."""
    rng = random.Random(seed)
    classes = [c for c, _ in mix]
    weights = [w for _, w in mix]
    graphs = []
    for i in range(count):
        cls = rng.choices(classes, weights)[0]
        size = max(rng.randint(*size_range), MIN_SIZE[cls])
        graphs.append(generate_random_cfg(rng.randrange(2**31), size, cls, name=f"g{i:05d}"))
    return graphs
