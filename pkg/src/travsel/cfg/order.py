"""Depth-first orderings, dominators and cyclicity classification.

Every DFS here descends into successors in ascending id order, so all
orderings are deterministic.
"""

from __future__ import annotations

from typing import Callable, Iterable

from .model import Cfg, Cyclicity


def _dfs(
    roots: Iterable[int],
    neighbours: Callable[[int], Iterable[int]],
    n: int,
) -> tuple[list[int], list[int], list[tuple[int, int]]]:
    """Iterative DFS.  Returns (preorder, postorder, back edges)."""
    state = [0] * n  # 0 unseen, 1 on stack, 2 finished
    pre: list[int] = []
    post: list[int] = []
    back: list[tuple[int, int]] = []
    for root in roots:
        if state[root]:
            continue
        state[root] = 1
        pre.append(root)
        stack = [(root, iter(sorted(neighbours(root))))]
        while stack:
            u, it = stack[-1]
            for v in it:
                if state[v] == 0:
                    state[v] = 1
                    pre.append(v)
                    stack.append((v, iter(sorted(neighbours(v)))))
                    break
                if state[v] == 1:
                    back.append((u, v))
            else:
                stack.pop()
                state[u] = 2
                post.append(u)
    return pre, post, back


def _forward(g: Cfg):
    return _dfs([g.entry], lambda u: g.nodes[u].succs, len(g.nodes))


def _backward(g: Cfg):
    # nodes that cannot reach an exit are picked up as extra roots, lowest id first
    roots = [*sorted(g.exits), *range(len(g.nodes))]
    return _dfs(roots, lambda u: g.nodes[u].preds, len(g.nodes))


def post_order(g: Cfg) -> list[int]:
    return _forward(g)[1]


def reverse_post_order(g: Cfg) -> list[int]:
    return post_order(g)[::-1]


def dfs_preorder(g: Cfg) -> list[int]:
    return _forward(g)[0]


def successors_first_order(g: Cfg) -> list[int]:
    """Reverse post-order of the edge-reversed graph, rooted at the exits.

    On acyclic graphs every node follows all of its successors.  On
    reducible loops a node's successors are visited first except across
    loop-closing edges, which is what a backward single sweep needs.
    """
    return _backward(g)[1][::-1]


def predecessors_first_order(g: Cfg) -> list[int]:
    return successors_first_order(g)[::-1]


def find_back_edges(g: Cfg) -> list[tuple[int, int]]:
    return _forward(g)[2]


def dominators(g: Cfg) -> list[frozenset[int]]:
    """Iterative set-intersection dominators over RPO."""
    n = len(g.nodes)
    everything = frozenset(range(n))
    dom = [everything] * n
    dom[g.entry] = frozenset([g.entry])
    order = [u for u in reverse_post_order(g) if u != g.entry]
    changed = True
    while changed:
        changed = False
        for u in order:
            new = everything
            for p in g.nodes[u].preds:
                new = new & dom[p]
            new = new | {u}
            if new != dom[u]:
                dom[u] = new
                changed = True
    return dom


def natural_loops(g: Cfg) -> dict[int, frozenset[int]] | None:
    """Map loop header -> loop body (header included).

    Back edges sharing a header are merged.  Returns ``None`` when some back
    edge targets a node that does not dominate its source (irreducible).
    """
    dom = dominators(g)
    loops: dict[int, set[int]] = {}
    for u, h in find_back_edges(g):
        if h not in dom[u]:
            return None
        body = loops.setdefault(h, {h})
        stack = [u]
        while stack:
            x = stack.pop()
            if x not in body:
                body.add(x)
                stack.extend(g.nodes[x].preds)
    return {h: frozenset(b) for h, b in loops.items()}


def classify_cyclicity(g: Cfg) -> Cyclicity:
    """Four-way structural class of ``g``.

    Acyclic graphs are sequential when every node has at most one successor
    and one predecessor.  For graphs with loops, back edges are dropped and
    each loop's own exit test is discounted: a loop with exactly one exit
    edge loses that edge.  Any remaining node with two or more successors
    makes the graph ``LOOP_WITH_BRANCH``.  Irreducible graphs are always
    ``LOOP_WITH_BRANCH``.
    """
    back = find_back_edges(g)
    if not back:
        for node in g.nodes:
            if len(node.succs) > 1 or len(node.preds) > 1:
                return Cyclicity.BRANCH_ONLY
        return Cyclicity.SEQUENTIAL

    loops = natural_loops(g)
    if loops is None:
        return Cyclicity.LOOP_WITH_BRANCH
    dropped = set(back)
    for body in loops.values():
        exits = [(u, v) for u in sorted(body) for v in g.nodes[u].succs if v not in body]
        if len(exits) == 1:
            dropped.add(exits[0])
    for node in g.nodes:
        kept = [v for v in node.succs if (node.id, v) not in dropped]
        if len(kept) > 1:
            return Cyclicity.LOOP_WITH_BRANCH
    return Cyclicity.LOOP_NO_BRANCH
