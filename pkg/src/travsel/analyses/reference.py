"""Textbook solvers for the shipped analyses, written directly in Python.

They share nothing with the DSL interpreter or the engine, so agreement
between the two is evidence that both are right.  Every solver is a
round-robin iteration over node ids until nothing changes.
"""

from __future__ import annotations

from ..cfg import Cfg


def _round_robin(g: Cfg, init: dict, step) -> dict:
    values = dict(init)
    changed = True
    while changed:
        changed = False
        for n in g.nodes:
            new = step(n, values)
            if new != values[n.id]:
                values[n.id] = new
                changed = True
    return values


def _meet(values, ids, op, empty):
    ids = list(ids)
    if not ids:
        return set(empty)
    out = set(values[ids[0]])
    for i in ids[1:]:
        out = op(out, values[i])
    return out


def dominator_sets(g: Cfg) -> dict[int, set[int]]:
    everything = set(range(len(g)))
    init = {n.id: ({n.id} if n.id == g.entry else set(everything)) for n in g.nodes}

    def step(n, v):
        if n.id == g.entry:
            return {n.id}
        return _meet(v, n.preds, set.intersection, ()) | {n.id}

    return _round_robin(g, init, step)


def postdominator_sets(g: Cfg) -> dict[int, set[int]]:
    everything = set(range(len(g)))
    init = {n.id: ({n.id} if n.id in g.exits else set(everything)) for n in g.nodes}

    def step(n, v):
        if n.id in g.exits:
            return {n.id}
        return _meet(v, n.succs, set.intersection, ()) | {n.id}

    return _round_robin(g, init, step)


def reaching_definitions(g: Cfg) -> dict[int, set[int]]:
    """Definitions (by node id) reaching the point just after each node."""
    defining = [n for n in g.nodes if n.defs]

    def step(n, v):
        reach_in = _meet(v, n.preds, set.union, ())
        killed = {d.id for d in defining if d.id != n.id and d.defs & n.defs}
        gen = {n.id} if n.defs else set()
        return gen | (reach_in - killed)

    return _round_robin(g, {n.id: set() for n in g.nodes}, step)


def live_variables(g: Cfg) -> dict[int, set[str]]:
    """Variables live on entry to each node."""

    def step(n, v):
        live_out = _meet(v, n.succs, set.union, ())
        return set(n.uses) | (live_out - n.defs)

    return _round_robin(g, {n.id: set() for n in g.nodes}, step)


def _kill_sets(g: Cfg) -> dict[int, set[str]]:
    # expression x dies at n when n defines one of x's operands
    operands: dict[str, set[str]] = {}
    for n in g.nodes:
        for x in n.exprs:
            operands.setdefault(x, set()).update(n.uses)
    return {n.id: {x for x, ops in operands.items() if ops & n.defs} for n in g.nodes}


def available_expressions(g: Cfg) -> dict[int, set[str]]:
    """Expressions available just after each node."""
    universe = {x for n in g.nodes for x in n.exprs}
    kill = _kill_sets(g)
    init = {n.id: (set() if n.id == g.entry else set(universe)) for n in g.nodes}

    def step(n, v):
        avail_in = _meet(v, n.preds, set.intersection, ())
        return (avail_in | n.exprs) - kill[n.id]

    return _round_robin(g, init, step)


def very_busy_expressions(g: Cfg) -> dict[int, set[str]]:
    """Expressions very busy on entry to each node."""
    universe = {x for n in g.nodes for x in n.exprs}
    kill = _kill_sets(g)
    init = {n.id: (set() if n.id in g.exits else set(universe)) for n in g.nodes}

    def step(n, v):
        busy_out = _meet(v, n.succs, set.intersection, ())
        return set(n.exprs) | (busy_out - kill[n.id])

    return _round_robin(g, init, step)


def used_and_defined(g: Cfg) -> dict[int, set[str]]:
    return {n.id: set(n.defs | n.uses) for n in g.nodes}


def expression_pairs(g: Cfg) -> dict[int, set[str]]:
    return {
        n.id: {f"{a}>{b}" for s in n.succs for a in n.exprs for b in g.nodes[s].exprs}
        for n in g.nodes
    }


# analysis code -> (traversal name, solver); collector traversals have no output
SOLVERS = {
    "PDOM": ("domT", postdominator_sets),
    "DOM": ("domT", dominator_sets),
    "RD": ("rdT", reaching_definitions),
    "LV": ("liveT", live_variables),
    "AE": ("availT", available_expressions),
    "VBE": ("busyT", very_busy_expressions),
    "UDV": ("udT", used_and_defined),
    "COL": ("pairsT", expression_pairs),
}
