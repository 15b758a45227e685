import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import chain, entry, exit_, graph, normal
from travsel.cfg import (
    CfgError,
    Cyclicity,
    InfeasibleGraph,
    Stmt,
    StmtKind,
    build_cfg,
    classify_cyclicity,
    dfs_preorder,
    dominators,
    find_back_edges,
    format_cfg,
    generate_corpus,
    generate_random_cfg,
    natural_loops,
    parse_cfg,
    post_order,
    predecessors_first_order,
    reverse_post_order,
    successors_first_order,
)
from travsel.cfg.generate import MIN_SIZE

CLASSES = list(Cyclicity)


# -- independent oracles -----------------------------------------------------

def reachable(g, start, removed=None):
    seen, stack = set(), [start]
    while stack:
        u = stack.pop()
        if u in seen or u == removed:
            continue
        seen.add(u)
        stack.extend(g.nodes[u].succs)
    return seen


def brute_dominators(g):
    """d dominates v iff v cannot be reached from the entry once d is removed."""
    ids = range(len(g))
    return [
        frozenset(d for d in ids if d == v or v not in reachable(g, g.entry, removed=d))
        for v in ids
    ]


def recursive_post_order(g):
    out, seen = [], set()

    def visit(u):
        seen.add(u)
        for v in sorted(g.nodes[u].succs):
            if v not in seen:
                visit(v)
        out.append(u)

    visit(g.entry)
    return out


def oracle_cyclicity(g):
    """Cyclicity from dominance-defined back edges, with no DFS involved."""
    dom = brute_dominators(g)
    back = {(u, v) for u, v in g.edges if v in dom[u]}
    rest = nx.DiGraph()
    rest.add_nodes_from(range(len(g)))
    rest.add_edges_from(e for e in g.edges if e not in back)
    if not nx.is_directed_acyclic_graph(rest):
        return Cyclicity.LOOP_WITH_BRANCH  # irreducible
    if not back:
        if any(len(n.succs) > 1 or len(n.preds) > 1 for n in g.nodes):
            return Cyclicity.BRANCH_ONLY
        return Cyclicity.SEQUENTIAL
    bodies = {}
    for u, h in back:
        body = bodies.setdefault(h, {h})
        # nodes reaching u without passing through h
        rev = nx.DiGraph()
        rev.add_edges_from((b, a) for a, b in g.edges if b != h)
        rev.add_node(u)
        body |= {u} | nx.descendants(rev, u)
    dropped = set(back)
    for body in bodies.values():
        leaving = [(u, v) for u, v in g.edges if u in body and v not in body]
        if len(leaving) == 1:
            dropped |= set(leaving)
    for n in g.nodes:
        if len([v for v in n.succs if (n.id, v) not in dropped]) > 1:
            return Cyclicity.LOOP_WITH_BRANCH
    return Cyclicity.LOOP_NO_BRANCH


@st.composite
def arbitrary_cfgs(draw, max_nodes=9):
    """Reachable graphs with entry 0 and exit n-1, not necessarily structured."""
    n = draw(st.integers(2, max_nodes))
    edges = set()
    for v in range(1, n):
        edges.add((draw(st.integers(0, min(v - 1, n - 2))), v))
    extra = draw(st.lists(st.tuples(st.integers(0, n - 2), st.integers(1, n - 1)), max_size=2 * n))
    edges |= {(u, v) for u, v in extra if u != v}
    return graph(n, sorted(edges), name="arb")


# -- model -------------------------------------------------------------------

def test_edge_symmetry_and_edge_order(running_example):
    g = running_example
    for n in g.nodes:
        for s in n.succs:
            assert n.id in g.nodes[s].preds
        for p in n.preds:
            assert n.id in g.nodes[p].succs
        assert len(set(n.succs)) == len(n.succs)
    assert g.nodes[1].succs == (2, 6)
    assert g.nodes[1].preds == (0, 5)


@pytest.mark.parametrize(
    "stmts, edges, message",
    [
        ([entry(), exit_()], [(0, 2)], "dangling"),
        ([entry(), exit_()], [(0, 1), (0, 1)], "duplicate edge"),
        ([entry(), normal(), exit_()], [(0, 2)], "unreachable"),
        ([entry(), normal(), exit_()], [(0, 1), (1, 0), (1, 2)], "entry node 0 has predecessors"),
        ([entry(), entry(), exit_()], [(0, 2), (1, 2)], "exactly one entry"),
        ([entry(), normal()], [(0, 1)], "no exit"),
        ([entry(), exit_(), normal()], [(0, 1), (1, 2)], "exit node 1 has successors"),
        ([], [], "no nodes"),
    ],
)
def test_build_rejects_malformed_graphs(stmts, edges, message):
    with pytest.raises(CfgError, match=message):
        build_cfg("bad", stmts, edges)


def test_entry_and_exit_statements_carry_nothing():
    with pytest.raises(CfgError):
        Stmt(StmtKind.ENTRY, defs=frozenset({"x"}))
    with pytest.raises(CfgError):
        normal(defs=[""])


def test_sequential_graph_needs_increasing_ids():
    stmts = [entry(), exit_(), normal()]
    with pytest.raises(CfgError, match="non-increasing"):
        build_cfg("seq", stmts, [(0, 2), (2, 1)])


def test_reversed_swaps_entry_and_exit(running_example):
    r = running_example.reversed()
    last = len(r) - 1
    assert r.entry == last - 7 and r.exits == {last - 0}
    assert sorted(r.edges) == sorted((last - v, last - u) for u, v in running_example.edges)


# -- text format ---------------------------------------------------------------

def test_parse_two_node_chain_is_sequential():
    g = parse_cfg("graph c\nnode 0 entry\nnode 1 exit\nedge 0 1\n")
    assert g.cyclicity is Cyclicity.SEQUENTIAL
    assert (g.entry, g.exits, len(g)) == (0, {1}, 2)


def test_parse_diamond_is_branch_only():
    text = "graph d\n" + "".join(
        f"node {i} {k}\n" for i, k in enumerate(["entry", "normal", "normal", "exit"])
    ) + "edge 0 1\nedge 0 2\nedge 1 3\nedge 2 3\n"
    assert parse_cfg(text).cyclicity is Cyclicity.BRANCH_ONLY


def test_running_example_is_loop_with_branch(running_example):
    assert len(running_example) == 8
    assert running_example.cyclicity is Cyclicity.LOOP_WITH_BRANCH
    assert classify_cyclicity(running_example) is Cyclicity.LOOP_WITH_BRANCH


def test_parse_attributes_comments_and_labels():
    g = parse_cfg(
        '# header comment\n'
        'graph x  # trailing\n'
        'node 1 normal def=a,b use=c expr=a+b label="say \\"#hi\\""\n'
        'node 0 entry\n'
        'node 2 exit\n'
        'edge 0 1\nedge 1 2\n'
    )
    n = g.nodes[1]
    assert n.defs == {"a", "b"} and n.uses == {"c"} and n.exprs == {"a+b"}
    assert n.stmt.label == 'say "#hi"'


@pytest.mark.parametrize(
    "text, line",
    [
        ("graph g\nnode 0 entry\nnode 0 exit\n", 3),
        ("graph g\nnode 0 start\n", 2),
        ("graph g\nnode 0 entry\nnode 1 exit\nedge 0 x\n", 4),
        ("graph g\nnode 0 entry\n  bogus 1\n", 3),
        ("graph g wobbly\n", 1),
        ("graph g\nnode 0 normal def=\n", 2),
        ('graph g\nnode 0 normal label="open\n', 2),
    ],
)
def test_parse_errors_carry_line_and_column(text, line):
    with pytest.raises(CfgError) as info:
        parse_cfg(text)
    assert info.value.line == line
    assert info.value.col >= 1
    assert str(info.value).startswith(f"line {line}, col ")


@pytest.mark.parametrize(
    "text, message",
    [
        ("node 0 entry\n", "missing graph header"),
        ("graph g\nnode 0 entry\nnode 2 exit\nedge 0 2\n", "without gaps"),
        ("graph g\nnode 0 entry\nnode 1 exit\nedge 0 5\n", "dangling"),
        ("graph g\nnode 0 entry\nnode 1 normal\nnode 2 exit\nedge 0 2\n", "unreachable"),
        ("graph g\nnode 0 entry\nnode 1 exit\nedge 0 1\nedge 1 0\n", "has predecessors"),
    ],
)
def test_parse_structural_errors(text, message):
    with pytest.raises(CfgError, match=message):
        parse_cfg(text)


def test_declared_flags_override_and_are_validated():
    body = "node 0 entry\nnode 1 normal\nnode 2 normal\nnode 3 exit\nedge 0 1\nedge 1 2\nedge 2 1\nedge 1 3\n"
    assert parse_cfg("graph g loop branch\n" + body).cyclicity is Cyclicity.LOOP_WITH_BRANCH
    assert parse_cfg("graph g loop\n" + body).cyclicity is Cyclicity.LOOP_NO_BRANCH
    with pytest.raises(CfgError, match="declares no loop"):
        parse_cfg("graph g branch\n" + body)
    acyclic = "node 0 entry\nnode 1 exit\nedge 0 1\n"
    assert parse_cfg("graph g branch\n" + acyclic).cyclicity is Cyclicity.BRANCH_ONLY
    with pytest.raises(CfgError, match="declares a loop"):
        parse_cfg("graph g loop\n" + acyclic)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(CLASSES), st.integers(5, 20), st.booleans())
def test_format_parse_round_trip(seed, cls, size, flags):
    g = generate_random_cfg(seed, size, cls)
    assert parse_cfg(format_cfg(g, declare_flags=flags)).structurally_equal(g)


def test_round_trip_keeps_awkward_labels():
    stmts = [entry(), normal(label='a "quoted" \\ back # hash'), exit_()]
    g = build_cfg("lbl", stmts, [(0, 1), (1, 2)])
    assert parse_cfg(format_cfg(g)).structurally_equal(g)


# -- orderings -----------------------------------------------------------------

def test_chain_orders():
    g = chain(3)
    assert post_order(g) == [2, 1, 0]
    assert reverse_post_order(g) == [0, 1, 2]
    assert dfs_preorder(g) == [0, 1, 2]


def test_diamond_orders(diamond):
    # DFS: 0 -> 1 -> 3 (finish 3, 1), then 2 (finish 2), then 0
    assert post_order(diamond) == [3, 1, 2, 0]
    assert reverse_post_order(diamond) == [0, 2, 1, 3]
    assert dfs_preorder(diamond) == [0, 1, 3, 2]


def test_cycle_post_order_finishes_entry_last():
    g = graph(5, [(0, 1), (1, 2), (2, 3), (3, 1), (3, 4)])
    po = post_order(g)
    assert sorted(po) == list(range(5)) and po[-1] == 0
    assert find_back_edges(g) == [(3, 1)]


@settings(max_examples=200, deadline=None)
@given(arbitrary_cfgs())
def test_orders_match_recursive_dfs(g):
    po = post_order(g)
    assert po == recursive_post_order(g)
    assert reverse_post_order(g) == po[::-1]
    assert sorted(dfs_preorder(g)) == list(range(len(g)))
    assert predecessors_first_order(g) == successors_first_order(g)[::-1]
    assert sorted(successors_first_order(g)) == list(range(len(g)))


@settings(max_examples=200, deadline=None)
@given(arbitrary_cfgs())
def test_acyclic_orders_are_topological(g):
    nxg = nx.DiGraph(g.edges)
    if not nx.is_directed_acyclic_graph(nxg):
        assert find_back_edges(g)
        return
    assert not find_back_edges(g)
    rpo = {v: i for i, v in enumerate(reverse_post_order(g))}
    sfo = {v: i for i, v in enumerate(successors_first_order(g))}
    for u, v in g.edges:
        assert rpo[u] < rpo[v]
        assert sfo[v] < sfo[u]  # successors come first


@settings(max_examples=200, deadline=None)
@given(arbitrary_cfgs())
def test_dominators_match_removal_oracle_and_networkx(g):
    dom = dominators(g)
    assert dom == brute_dominators(g)
    idom = nx.immediate_dominators(nx.DiGraph(g.edges), g.entry)
    for v in range(len(g)):
        chain_, x = {v}, v
        while x != g.entry:
            x = idom[x]
            chain_.add(x)
        assert dom[v] == chain_


def test_natural_loops_of_running_example(running_example):
    assert natural_loops(running_example) == {1: frozenset({1, 2, 3, 4, 5})}


def test_irreducible_graph_has_no_natural_loops():
    # two entries into the 1 <-> 2 cycle
    g = graph(4, [(0, 1), (0, 2), (1, 2), (2, 1), (2, 3)])
    assert natural_loops(g) is None
    assert classify_cyclicity(g) is Cyclicity.LOOP_WITH_BRANCH


# -- cyclicity -----------------------------------------------------------------

def test_straight_line_is_sequential():
    assert classify_cyclicity(chain(5)) is Cyclicity.SEQUENTIAL


def test_bare_while_loop_has_no_branch():
    # entry -> header 1 -> body 2 -> header; header -> exit 3
    g = graph(4, [(0, 1), (1, 2), (2, 1), (1, 3)])
    assert classify_cyclicity(g) is oracle_cyclicity(g) is Cyclicity.LOOP_NO_BRANCH


def test_while_with_if_else_has_branch():
    g = graph(7, [(0, 1), (1, 2), (2, 3), (2, 4), (3, 5), (4, 5), (5, 1), (1, 6)])
    assert classify_cyclicity(g) is oracle_cyclicity(g) is Cyclicity.LOOP_WITH_BRANCH


def test_loop_with_two_exits_has_branch():
    # a break out of the body adds a second way out of the loop
    g = graph(5, [(0, 1), (1, 2), (2, 1), (2, 4), (1, 3), (3, 4)])
    assert classify_cyclicity(g) is oracle_cyclicity(g) is Cyclicity.LOOP_WITH_BRANCH


def test_branch_before_loop_has_branch():
    g = graph(6, [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4), (4, 3), (4, 5)])
    assert classify_cyclicity(g) is oracle_cyclicity(g) is Cyclicity.LOOP_WITH_BRANCH


@settings(max_examples=400, deadline=None)
@given(arbitrary_cfgs())
def test_cyclicity_matches_oracle_on_arbitrary_graphs(g):
    assert classify_cyclicity(g) is oracle_cyclicity(g)
    assert classify_cyclicity(g) is classify_cyclicity(g)


# -- generator -----------------------------------------------------------------

def test_minimal_sequential_graph():
    g = generate_random_cfg(1, 2, Cyclicity.SEQUENTIAL)
    assert g.edges == [(0, 1)]
    assert g.nodes[0].kind is StmtKind.ENTRY and g.nodes[1].kind is StmtKind.EXIT


@pytest.mark.parametrize("cls", CLASSES)
def test_generator_is_deterministic(cls):
    a = generate_random_cfg(42, 12, cls)
    b = generate_random_cfg(42, 12, cls)
    assert a.structurally_equal(b)
    assert format_cfg(a) == format_cfg(b)


@pytest.mark.parametrize("cls", CLASSES)
def test_generator_rejects_sizes_below_class_minimum(cls):
    with pytest.raises(InfeasibleGraph):
        generate_random_cfg(0, MIN_SIZE[cls] - 1, cls)
    assert len(generate_random_cfg(0, MIN_SIZE[cls], cls)) == MIN_SIZE[cls]


def test_loop_with_branch_needs_five_nodes():
    assert MIN_SIZE[Cyclicity.LOOP_WITH_BRANCH] == 5
    with pytest.raises(InfeasibleGraph):
        generate_random_cfg(3, 4, Cyclicity.LOOP_WITH_BRANCH)


@pytest.mark.parametrize("cls", CLASSES)
def test_thousand_samples_classify_as_requested(cls):
    lo = MIN_SIZE[cls]
    for seed in range(1000):
        size = lo + seed % (24 - lo + 1)
        g = generate_random_cfg(seed, size, cls)
        assert len(g) == size
        assert classify_cyclicity(g) is cls, (seed, size)
        if seed % 10 == 0:
            assert oracle_cyclicity(g) is cls, (seed, size)


def test_generated_statements_are_non_degenerate():
    graphs = generate_corpus(7, 200)
    nodes = [n for g in graphs for n in g.nodes if n.kind is StmtKind.NORMAL]
    assert sum(bool(n.defs) for n in nodes) > len(nodes) // 4
    assert sum(bool(n.uses) for n in nodes) > len(nodes) // 4
    assert sum(bool(n.exprs) for n in nodes) > len(nodes) // 4


def test_corpus_follows_the_class_mix():
    graphs = generate_corpus(3, 2000)
    share = {c: sum(g.cyclicity is c for g in graphs) / len(graphs) for c in CLASSES}
    assert share[Cyclicity.SEQUENTIAL] == pytest.approx(0.65, abs=0.04)
    assert share[Cyclicity.BRANCH_ONLY] == pytest.approx(0.25, abs=0.04)
    assert share[Cyclicity.LOOP_WITH_BRANCH] + share[Cyclicity.LOOP_NO_BRANCH] == pytest.approx(0.10, abs=0.03)
    assert [format_cfg(g) for g in graphs[:20]] == [format_cfg(g) for g in generate_corpus(3, 20)]
