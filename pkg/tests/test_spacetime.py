"""Sites, curves, and curve-set primitives against independent oracles."""

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CHAIN2, CHAIN4, EDGELESS3, GENERATOR_LIST, TRI, build
from slicecat.spacetime import (
    CapExceeded,
    CausalGraph,
    ParseError,
    bits,
    enumerate_curves,
    format_spacetime,
    minkowski_lattice,
    parse_spacetime,
)


def oracle_paths(graph):
    """Every simple directed path, via networkx plus the singletons."""
    g = nx.DiGraph()
    g.add_nodes_from(range(graph.n_events))
    g.add_edges_from(graph.edges)
    paths = {(v,) for v in range(graph.n_events)}
    for s in range(graph.n_events):
        for t in range(graph.n_events):
            if s != t:
                for p in nx.all_simple_paths(g, s, t):
                    paths.add(tuple(p))
    return paths


def oracle_through(path, a, b):
    """Literal two-quantifier reading of `through a then b`."""
    b_hits = [q for q, e in enumerate(path) if b >> e & 1]
    if not b_hits:
        return False
    return all(any(a >> path[p] & 1 for p in range(q + 1)) for q in b_hits)


# -- parsing ------------------------------------------------------------------

def test_parse_chain2():
    graph, named = parse_spacetime("event a\nevent b\nedge a b")
    assert graph.labels == ("a", "b")
    assert graph.edges == frozenset({(0, 1)})
    assert named == {}


def test_parse_rejects_self_edge():
    with pytest.raises(ParseError, match="line 2.*self-edge"):
        parse_spacetime("event a\nedge a a")


def test_parse_rejects_unknown_event():
    with pytest.raises(ParseError, match="line 1.*unknown event"):
        parse_spacetime("edge a b")


def test_parse_rejects_duplicate_label():
    with pytest.raises(ParseError, match="duplicate"):
        parse_spacetime("event a\nevent a")


def test_parse_slices_and_comments():
    graph, named = parse_spacetime(
        "# a comment\nevent a\nevent b  # trailing\nedge a b\n"
        "slice S = a b\nslice E =\n")
    assert named["S"] == graph.region(["a", "b"])
    assert named["E"] == 0


def test_parse_reports_line_numbers():
    with pytest.raises(ParseError, match="line 3"):
        parse_spacetime("event a\nevent b\nslice S = a q\n")


def test_format_roundtrip():
    graph, named = parse_spacetime("event a t=0 x=1\nevent b t=1 x=1\n"
                                   "edge a b\nslice S = b\n")
    text = format_spacetime(graph, named)
    graph2, named2 = parse_spacetime(text)
    assert graph2 == graph
    assert named2 == named


# -- lattices -----------------------------------------------------------------

@pytest.mark.parametrize("t,w", [(2, 3), (1, 4), (2, 1), (3, 3)])
def test_lattice_counts_match_rule(t, w):
    graph = minkowski_lattice(t, w)
    assert graph.n_events == t * w
    expected = sum(1 for tt in range(t - 1) for x in range(w)
                   for d in (-1, 0, 1) if 0 <= x + d < w)
    assert len(graph.edges) == expected


def test_lattice_small_cases():
    assert len(minkowski_lattice(2, 3).edges) == 7
    assert len(minkowski_lattice(1, 4).edges) == 0
    assert minkowski_lattice(2, 1).edges == frozenset({(0, 1)})


def test_lattice_cap():
    with pytest.raises(CapExceeded):
        minkowski_lattice(100, 100, cap=1024)


# -- precedence ---------------------------------------------------------------

def test_precedes_chain2():
    graph, _, _, _ = build(CHAIN2)
    assert graph.precedes(0, 1) and not graph.precedes(1, 0)
    assert graph.precedes(0, 0)


def test_precedes_around_cycle():
    graph, _, _, _ = build(TRI)
    b, a = graph.label_index["b"], graph.label_index["a"]
    assert graph.precedes(b, a)


# -- curve universes -----------------------------------------------------------

def test_chain2_universe():
    _, _, universe, _ = build(CHAIN2)
    assert [universe.curve_str(i) for i in range(3)] == ["[a]", "[a,b]", "[b]"]


def test_tri_universe_counts():
    _, _, universe, _ = build(TRI)
    lengths = sorted(len(c) for c in universe.curves)
    assert universe.width == 9
    assert lengths == [1, 1, 1, 2, 2, 2, 3, 3, 3]


def test_edgeless_universe_is_singletons():
    graph, _, universe, _ = build(EDGELESS3)
    assert universe.width == graph.n_events
    assert all(len(c) == 1 for c in universe.curves)


@pytest.mark.parametrize("name", sorted(GENERATOR_LIST))
def test_universe_matches_oracle(name):
    graph, _, universe, _ = build(GENERATOR_LIST[name])
    assert set(universe.curves) == oracle_paths(graph)
    assert list(universe.curves) == sorted(universe.curves)
    for curve in universe.curves:
        assert len(set(curve)) == len(curve)
        for src, dst in zip(curve, curve[1:]):
            assert (src, dst) in graph.edges


def test_curve_cap():
    graph, _ = parse_spacetime(TRI)
    with pytest.raises(CapExceeded):
        enumerate_curves(graph, cap=5)


# -- through-sets ---------------------------------------------------------------

def test_through_chain2_examples():
    graph, _, universe, _ = build(CHAIN2)
    a, b = graph.region(["a"]), graph.region(["b"])
    assert universe.set_str(universe.through(a, b)) == "{[a,b]}"
    assert universe.set_str(universe.visits(a)) == "{[a],[a,b]}"
    assert universe.through(0, b) == 0
    assert universe.through(a, 0) == 0


def test_through_tri_closed_curve_is_in_both_directions():
    graph, _, universe, _ = build(TRI)
    a, b = graph.region(["a"]), graph.region(["b"])
    ab = universe.index[(0, 1)]
    bca = universe.index[(1, 2, 0)]
    assert universe.through(a, b) >> ab & 1
    assert universe.through(b, a) >> bca & 1


@pytest.mark.parametrize("name", sorted(GENERATOR_LIST))
def test_through_matches_definition(name):
    graph, _, universe, _ = build(GENERATOR_LIST[name])
    regions = [0, 1, graph.all_events]
    regions += [graph.reach[0] if graph.n_events else 0]
    regions += [1 << (graph.n_events - 1), 0b101 & graph.all_events]
    for a in regions:
        for b in regions:
            got = universe.through(a, b)
            for i, path in enumerate(universe.curves):
                assert bool(got >> i & 1) == oracle_through(path, a, b)


def test_through_contained_in_visits():
    for text in GENERATOR_LIST.values():
        graph, _, universe, _ = build(text)
        for a in (1, graph.all_events, 0b11 & graph.all_events):
            for b in (1, graph.all_events, 0b110 & graph.all_events):
                cab = universe.through(a, b)
                assert cab & ~universe.visits(a) == 0
                assert cab & ~universe.visits(b) == 0


# -- spacelike sets and slices ---------------------------------------------------

def test_spacelike_examples():
    chain2, _, _, _ = build(CHAIN2)
    assert not chain2.is_spacelike(chain2.region(["a", "b"]))
    ml23, _, _, _ = build(GENERATOR_LIST["ml23"])
    assert ml23.is_spacelike(ml23.region(["t0x0", "t0x2"]))
    tri, _, _, _ = build(TRI)
    assert tri.is_spacelike(tri.region(["a"]))


def test_slices_examples():
    chain2, _, _, _ = build(CHAIN2)
    assert list(chain2.antichains()) == [0, 1, 2]
    tri, _, _, _ = build(TRI)
    assert list(tri.antichains()) == [0, 1, 2, 4]
    edgeless, _, _, _ = build(EDGELESS3)
    assert list(edgeless.antichains()) == list(range(8))


@pytest.mark.parametrize("name", sorted(GENERATOR_LIST))
def test_slices_match_bruteforce(name):
    graph, _, _, _ = build(GENERATOR_LIST[name])
    expected = []
    for mask in range(1 << graph.n_events):
        events = list(bits(mask))
        if all(not graph.precedes(x, y) for x in events for y in events
               if x != y):
            expected.append(mask)
    assert list(graph.antichains()) == expected


def test_antichain_single_visit():
    # a curve meets a spacelike set in at most one position
    for text in GENERATOR_LIST.values():
        graph, _, universe, _ = build(text)
        for region in graph.antichains():
            for curve in universe.curves:
                assert sum(1 for e in curve if region >> e & 1) <= 1


def test_tiny_curves():
    # for any event outside a region, its singleton curve avoids the region
    for text in GENERATOR_LIST.values():
        graph, _, universe, _ = build(text)
        for x in range(graph.n_events):
            for region in (0, 1, graph.all_events & ~(1 << x)):
                if region >> x & 1:
                    continue
                singleton = 1 << universe.index[(x,)]
                assert universe.visits(1 << x) & singleton
                assert not universe.visits(region) & singleton


# -- randomized invariants --------------------------------------------------------

@st.composite
def graphs(draw):
    n = draw(st.integers(min_value=1, max_value=5))
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    chosen = draw(st.lists(st.sampled_from(pairs), max_size=8, unique=True)) \
        if pairs else []
    return CausalGraph(tuple(f"e{i}" for i in range(n)), frozenset(chosen))


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_precedes_is_reflexive_and_transitive(graph):
    n = graph.n_events
    for x in range(n):
        assert graph.precedes(x, x)
    for x in range(n):
        for y in range(n):
            for z in range(n):
                if graph.precedes(x, y) and graph.precedes(y, z):
                    assert graph.precedes(x, z)


@settings(max_examples=60, deadline=None)
@given(graphs(), st.integers(min_value=0), st.integers(min_value=0))
def test_through_subset_invariants(graph, a_seed, b_seed):
    universe = enumerate_curves(graph)
    a = a_seed & graph.all_events
    b = b_seed & graph.all_events
    cab = universe.through(a, b)
    assert cab & ~universe.visits(a) == 0
    assert cab & ~universe.visits(b) == 0
    for i, path in enumerate(universe.curves):
        assert bool(cab >> i & 1) == oracle_through(path, a, b)


@settings(max_examples=60, deadline=None)
@given(graphs(), st.integers(min_value=0), st.integers(min_value=0))
def test_jointly_spacelike_is_union_antichain(graph, x_seed, y_seed):
    x = x_seed & graph.all_events
    y = y_seed & graph.all_events
    union = x | y
    expected = all(not graph.precedes(p, q)
                   for p in bits(union) for q in bits(union) if p != q)
    assert graph.jointly_spacelike(x, y) == expected
