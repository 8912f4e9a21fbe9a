from __future__ import annotations

import random

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperfin.graphs import (
    EdgeSubset,
    FramedGraph,
    FunctionalGraph,
    SimpleGraph,
    components,
    cycle_graph,
    path_graph,
    random_bounded_degree_graph,
    random_functional_graph,
)
from hyperfin.witness import (
    WitnessSequence,
    degree_two_witness,
    extend_witness,
    extension_parts,
    functional_witness,
    functional_witness_traced,
    h_prime_check,
    lexleast_path,
    spanning_tree_witness,
    validate_witness,
)


def level_classes(w: WitnessSequence, i: int) -> set[frozenset[int]]:
    return {frozenset(c) for c in components(w.host, w.levels[i]).classes()}


def connected_sample(g: SimpleGraph, rng: random.Random) -> set[int]:
    chosen: set[int] = set()
    for members in components(g).classes():
        piece = {rng.choice(members)}
        target = rng.randint(1, len(members))
        while len(piece) < target:
            boundary = sorted({u for v in piece for u in g.adjacency[v]} - piece)
            if not boundary:
                break
            piece.add(rng.choice(boundary))
        chosen |= piece
    return chosen


def test_validator_examples():
    g = path_graph(2)
    ok = WitnessSequence(g, [EdgeSubset.empty(g), EdgeSubset.full(g)])
    assert validate_witness(ok).valid
    bad = WitnessSequence(g, [EdgeSubset.full(g), EdgeSubset.empty(g)])
    rep = validate_witness(bad)
    assert not rep.valid and rep.clause == "monotonicity" and rep.first_bad_level == 1


def test_validator_size_and_coverage_clauses():
    g = path_graph(4)
    # level 2 needs components of size >= 2 under the linear bound; singletons remain
    w = WitnessSequence(g, [EdgeSubset.empty(g)] * 3 + [EdgeSubset.full(g)])
    rep = validate_witness(w)
    assert (rep.valid, rep.clause, rep.first_bad_level) == (False, "size", 2)
    partial = WitnessSequence(g, [EdgeSubset.from_edges(g, [(0, 1)])])
    rep = validate_witness(partial)
    assert rep.clause == "coverage"
    with pytest.raises(ValueError):
        validate_witness(partial, bound="cubic")


def test_witness_json_round_trip_and_hash_check():
    w = functional_witness(FunctionalGraph.from_succ([1, 2, 3, 0]))
    data = w.to_json()
    back = WitnessSequence.from_json(data)
    assert [lvl.edges() for lvl in back.levels] == [lvl.edges() for lvl in w.levels]
    data["host_hash"] = "0" * 64
    with pytest.raises(ValueError):
        WitnessSequence.from_json(data)


def test_functional_witness_two_cycle():
    w = functional_witness(FunctionalGraph.from_succ([1, 0]))
    assert [lvl.edges() for lvl in w.levels] == [[(0, 1)], [(0, 1)]]
    assert validate_witness(w, "exponential").valid


def test_functional_witness_four_cycle():
    w = functional_witness(FunctionalGraph.from_succ([1, 2, 3, 0]))
    assert level_classes(w, 0) == {frozenset({1, 2}), frozenset({0, 3})}
    assert level_classes(w, len(w) - 1) == {frozenset(range(4))}


@given(seed=st.integers(0, 10**6), n=st.integers(2, 300), d=st.integers(1, 4))
def test_functional_witness_property(seed, n, d):
    fg = random_functional_graph(n, d, random.Random(seed))
    w, steps = functional_witness_traced(fg)
    rep = validate_witness(w, "exponential")
    assert rep.valid, rep.detail
    assert all(step.within_bounds() for step in steps)
    assert steps[0].fanin <= d


@pytest.mark.parametrize("n", range(2, 65))
def test_degree_two_paths(n):
    assert validate_witness(degree_two_witness(path_graph(n)), "exponential").valid


@pytest.mark.parametrize("n", range(3, 65))
def test_degree_two_cycles(n):
    w = degree_two_witness(cycle_graph(n))
    rep = validate_witness(w, "exponential")
    assert rep.valid
    if n == 9:
        assert rep.levels[0].min_size == 2


def test_degree_two_examples():
    assert validate_witness(degree_two_witness(path_graph(2))).valid
    rep = validate_witness(degree_two_witness(path_graph(17)), "exponential")
    assert rep.valid
    assert all(s.min_size >= min(2**s.index, 17) for s in rep.levels)


@given(seed=st.integers(0, 10**6))
def test_degree_two_random_unions(seed):
    rng = random.Random(seed)
    edges, base = [], 0
    for _ in range(rng.randint(1, 5)):
        k = rng.randint(2, 20)
        closed = k >= 3 and rng.random() < 0.5
        edges += [(base + i, base + i + 1) for i in range(k - 1)]
        if closed:
            edges.append((base, base + k - 1))
        base += k
    g = SimpleGraph.from_edges(base, edges)
    assert validate_witness(degree_two_witness(g), "exponential").valid


def test_degree_two_rejects_high_degree():
    star = SimpleGraph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    with pytest.raises(ValueError):
        degree_two_witness(star)


@given(seed=st.integers(0, 10**6))
def test_spanning_tree_witness_valid(seed):
    rng = random.Random(seed)
    g = random_bounded_degree_graph(rng.randint(1, 60), 4, 0.15, rng)
    assert validate_witness(spanning_tree_witness(g), "exponential").valid


def test_lexleast_examples():
    tree = path_graph(5)
    assert lexleast_path(tree, 0, {4}) == [0, 1, 2, 3, 4]
    assert lexleast_path(cycle_graph(4), 0, {2}) == [0, 1, 2]
    assert lexleast_path(cycle_graph(4), 2, {2}) == [2]


@given(seed=st.integers(0, 10**6))
def test_lexleast_against_all_shortest_paths(seed):
    rng = random.Random(seed)
    g = random_bounded_degree_graph(rng.randint(2, 25), 4, 0.3, rng)
    a = set(rng.sample(range(g.n), rng.randint(1, min(3, g.n))))
    x = rng.randrange(g.n)
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    reach = [t for t in a if nx.has_path(h, x, t)]
    if not reach:
        with pytest.raises(ValueError):
            lexleast_path(g, x, a)
        return
    best = min(nx.shortest_path_length(h, x, t) for t in reach)
    candidates = [p for t in reach if nx.shortest_path_length(h, x, t) == best for p in nx.all_shortest_paths(h, x, t)]
    assert lexleast_path(g, x, a) == min(candidates)


def test_extension_path_of_three():
    fg = FramedGraph(path_graph(3))
    parts = extension_parts(fg, {1})
    assert parts.h_prime == [(0, 1), (1, 2)]
    assert parts.h_double == parts.h_prime
    sub, _ = fg.graph.induced({1})
    w = extend_witness(fg, {1}, spanning_tree_witness(sub))
    assert all(level_classes(w, i) == {frozenset({0, 1, 2})} for i in range(len(w)))


def test_extension_framed_path_divisibility():
    fg = FramedGraph(path_graph(21), frontier=frozenset({0, 20}))
    parts = extension_parts(fg, {10})
    assert parts.h_double == []
    assert parts.m[(2, 3)] == 8
    sub, _ = fg.graph.induced({10})
    w = extend_witness(fg, {10}, spanning_tree_witness(sub))
    # at level 3 the m = 8 edge fails clause (ii); no other clause supplies it
    idx = fg.graph.edge_index[(2, 3)]
    assert not w.levels[3].mask[idx]
    # 2^i divides 8 for i <= 3, so the edge first appears at level 4
    assert [bool(lvl.mask[idx]) for lvl in w.levels[:5]] == [False, False, False, False, True]


def test_extension_never_joins_host_components():
    g = SimpleGraph.from_edges(6, [(0, 1), (1, 2), (3, 4), (4, 5)])
    a = {1, 4}
    sub, _ = g.induced(a)
    w = extend_witness(FramedGraph(g), a, spanning_tree_witness(sub))
    host = {frozenset(c) for c in components(g).classes()}
    for i in range(len(w)):
        assert all(any(c <= h for h in host) for c in level_classes(w, i))
    assert validate_witness(w).valid


def test_extension_errors():
    g = path_graph(4)
    fg = FramedGraph(g)
    sub, _ = g.induced({0, 3})
    with pytest.raises(ValueError):
        extend_witness(fg, {0, 3}, spanning_tree_witness(sub))
    with pytest.raises(ValueError):
        extend_witness(fg, set(), spanning_tree_witness(sub))
    wrong = spanning_tree_witness(path_graph(3))
    with pytest.raises(ValueError):
        extend_witness(fg, {0, 1}, wrong)


@given(seed=st.integers(0, 10**6))
def test_extension_property(seed):
    rng = random.Random(seed)
    g = random_bounded_degree_graph(rng.randint(1, 60), 4, 0.12, rng)
    a = connected_sample(g, rng)
    sub, _ = g.induced(a)
    fg = FramedGraph(g)
    parts = extension_parts(fg, a)
    assert h_prime_check(g, a, parts) == (True, True)
    w = extend_witness(fg, a, spanning_tree_witness(sub))
    assert validate_witness(w).valid
