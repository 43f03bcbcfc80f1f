"""Composition, (co)limits, law sweeps, and the two non-monoidality gaps."""

import pytest

from conftest import CHAIN2, CHAIN4, EDGELESS2, EDGELESS3, GENERATOR_LIST, ML23, TRI, build
from slicecat.category import (
    CategoryView,
    Morphism,
    check_category_laws,
    check_equalizer_universality,
    check_product_universality,
    intersection_unit_gap,
    union_bifunctoriality_gap,
)
from slicecat.spacetime import bits, submasks


def region(graph, *labels):
    return graph.region(labels)


def curves(universe, *paths):
    return universe.set_of(paths)


# -- composition and identities ---------------------------------------------------

def test_compose_with_identity(chain2):
    graph, _, universe, view = chain2
    a, b = region(graph, "a"), region(graph, "b")
    s = Morphism(a, b, curves(universe, "ab"))
    assert view.compose(view.identity(b), s) == s
    assert view.compose(s, view.identity(a)) == s


def test_compose_chain4_example(chain4):
    graph, _, universe, view = chain4
    a, b, c = region(graph, "a"), region(graph, "b"), region(graph, "c")
    s = Morphism(a, b, curves(universe, "abcd"))
    t = Morphism(b, c, curves(universe, "bc", "abcd"))
    out = view.compose(t, s)
    assert out == Morphism(a, c, curves(universe, "abcd"))


def test_compose_empty_absorbs(chain4):
    graph, _, universe, view = chain4
    a, b, c = region(graph, "a"), region(graph, "b"), region(graph, "c")
    s = Morphism(a, b, view.hom(a, b))
    assert view.compose(Morphism(b, c, 0), s).curves == 0


def test_compose_rejects_mismatch(chain2):
    graph, _, _, view = chain2
    a, b = region(graph, "a"), region(graph, "b")
    with pytest.raises(ValueError):
        view.compose(Morphism(a, a, 0), Morphism(a, b, 0))


def test_identity_examples(chain2, tri):
    graph, _, universe, view = chain2
    assert view.identity(region(graph, "a")).curves == curves(universe, "a", "ab")
    assert view.identity(0).curves == 0
    tgraph, _, tuniverse, tview = tri
    ident = tview.identity(region(tgraph, "a"))
    assert ident.curves == tuniverse.set_of(
        [["a"], ["a", "b"], ["a", "b", "c"], ["b", "c", "a"], ["c", "a"],
         ["c", "a", "b"]])


def _label_paths(s):
    # "ab" -> ["a","b"]; lattice labels are comma separated
    return [list(p) for p in s]


# helpers let tests write curves(universe, "abcd") for single-letter labels
def _expand(path):
    return [ch for ch in path]


def set_of(universe, *paths):
    return universe.set_of([_expand(p) for p in paths])


# -- (co)equalizers ----------------------------------------------------------------

def test_equalizer_chain2_empty(chain2):
    graph, _, universe, view = chain2
    a, b = region(graph, "a"), region(graph, "b")
    f = Morphism(a, b, set_of(universe, "ab"))
    g = Morphism(a, b, 0)
    eq = view.equalizer(f, g)
    assert eq == Morphism(a, a, 0)


def test_equalizer_equal_pair_is_carrier(chain2):
    graph, _, universe, view = chain2
    a, b = region(graph, "a"), region(graph, "b")
    f = Morphism(a, b, set_of(universe, "ab"))
    assert view.equalizer(f, f).curves == view.hom(a, b)


def test_equalizer_chain4_example(chain4):
    graph, _, universe, view = chain4
    a, b = region(graph, "a"), region(graph, "b")
    f = Morphism(a, b, set_of(universe, "ab", "abc"))
    g = Morphism(a, b, set_of(universe, "ab"))
    assert view.hom(a, b) == set_of(universe, "ab", "abc", "abcd")
    assert view.equalizer(f, g).curves == set_of(universe, "ab", "abcd")
    assert view.coequalizer(f, g) == Morphism(b, b, set_of(universe, "ab", "abcd"))


def oracle_equalizer(universe, carrier, f, g):
    # complement of the symmetric difference, in path-set terms
    paths = {universe.curves[i] for i in bits(carrier)}
    fset = {universe.curves[i] for i in bits(f)}
    gset = {universe.curves[i] for i in bits(g)}
    keep = (paths - (fset | gset)) | (fset & gset)
    mask = 0
    for path in keep:
        mask |= 1 << universe.index[path]
    return mask


def test_equalizer_matches_set_oracle(chain4):
    graph, _, universe, view = chain4
    a, b = region(graph, "a"), region(graph, "b")
    carrier = view.hom(a, b)
    for f in submasks(carrier):
        for g in submasks(carrier):
            got = view.equalizer(Morphism(a, b, f), Morphism(a, b, g))
            assert got.curves == oracle_equalizer(universe, carrier, f, g)


@pytest.mark.parametrize("text", [CHAIN2, CHAIN4])
def test_equalizer_universality_exhaustive(text):
    graph, _, universe, view = build(text)
    for a in view.objects:
        for b in view.objects:
            carrier = view.hom(a, b)
            for f in submasks(carrier):
                for g in submasks(carrier):
                    rep = check_equalizer_universality(
                        view, Morphism(a, b, f), Morphism(a, b, g))
                    assert rep.passed, rep.witness


def test_mediators_not_unique_without_carrier_restriction(chain2):
    # h = {} equalizes f = {[a,b]}, g = {}; both m = {} and m = {[a,b]}
    # satisfy e & m = h, so mediating arrows are only unique among arrows
    # valued inside the equalizer
    graph, _, universe, view = chain2
    a, b = region(graph, "a"), region(graph, "b")
    f = Morphism(a, b, set_of(universe, "ab"))
    g = Morphism(a, b, 0)
    eq = view.equalizer(f, g)
    h = 0
    mediators = [m for m in submasks(view.hom(a, a)) if eq.curves & m == h]
    assert len(mediators) > 1


# -- (co)products --------------------------------------------------------------------

def test_product_requires_hypotheses(chain2, ml23):
    graph, _, _, view = chain2
    with pytest.raises(ValueError, match="jointly spacelike"):
        view.product(region(graph, "a"), region(graph, "b"))
    mgraph, _, _, mview = ml23
    with pytest.raises(ValueError, match="disjoint"):
        mview.product(region(mgraph, "t0x0"), region(mgraph, "t0x0"))


def test_product_ml23_structure(ml23):
    graph, _, universe, view = ml23
    x, y = region(graph, "t0x0"), region(graph, "t0x2")
    cone = view.product(x, y)
    assert cone.apex == x | y
    assert cone.proj0.curves == universe.visits(x)
    assert cone.proj1.curves == universe.visits(y)
    # mediating arrow of the empty cone
    med = view.tuple_arrow(Morphism(0, x, 0), Morphism(0, y, 0))
    assert med.curves == 0


def test_product_universality_ml23_exhaustive(ml23):
    graph, _, _, view = ml23
    checked = 0
    for i, x in enumerate(view.objects):
        for y in view.objects[i + 1:]:
            if x & y or not graph.jointly_spacelike(x, y) or not (x and y):
                continue
            rep = check_product_universality(view, x, y)
            assert rep.passed, rep.witness
            checked += 1
    assert checked > 10


# -- law sweeps -----------------------------------------------------------------------

@pytest.mark.parametrize("name", ["chain2", "chain4", "tri", "ml23"])
def test_category_laws(name):
    _, _, _, view = build(GENERATOR_LIST[name])
    report = check_category_laws(view)
    assert report.passed and report.checked > 0


def test_category_laws_catch_mutation(chain2):
    _, _, _, view = chain2
    report = check_category_laws(view, compose_masks=lambda a, b: a | b)
    assert not report.passed
    assert report.witness is not None


def test_endomorphisms_commute(chain4):
    graph, _, _, view = chain4
    for x in view.objects:
        hom = view.hom(x, x)
        for f in submasks(hom):
            for g in submasks(hom):
                left = view.compose(Morphism(x, x, f), Morphism(x, x, g))
                right = view.compose(Morphism(x, x, g), Morphism(x, x, f))
                assert left == right


# -- non-monoidality witnesses ----------------------------------------------------------

def test_union_gap_found_on_chain4():
    graph, _, universe, _ = build(CHAIN4)
    space = CategoryView.space_view(graph, universe)
    report = union_bifunctoriality_gap(space)
    wit = report.witness
    assert report.passed and wit is not None
    # replay: strictness of the inclusion
    lhs = universe.set_of([p.strip("[]").split(",") for p in
                           wit["lhs"].strip("{}").split("],[")]) \
        if wit["lhs"] != "{}" else 0
    assert wit["rhs"] == "{}"
    assert lhs != 0


def test_union_gap_example_values(chain4):
    graph, _, universe, view = chain4
    b, c, d = region(graph, "b"), region(graph, "c"), region(graph, "d")
    sp = view.hom(b, c)
    t = view.hom(c, d)
    lhs = (sp | 0) & (0 | t)
    rhs = (sp & 0) | (0 & t)
    assert lhs & set_of(universe, "bcd") and rhs == 0


def test_union_gap_none_on_edgeless():
    graph, _, universe, _ = build(EDGELESS3)
    space = CategoryView.space_view(graph, universe)
    report = union_bifunctoriality_gap(space)
    assert report.passed and report.witness is None
    assert report.notes == {"witness_expected": False, "found": False}


def test_intersection_gap_chain2(chain2):
    graph, _, universe, view = chain2
    report = intersection_unit_gap(view)
    assert report.witness == {"X": "{a}", "Y": "{b}",
                              "identity_overlap": "{[a,b]}"}


def test_intersection_gap_ml23_pair_is_not_witness(ml23):
    graph, _, universe, view = ml23
    x, y = region(graph, "t0x0"), region(graph, "t0x2")
    assert universe.visits(x) & universe.visits(y) == 0


def test_intersection_gap_none_on_edgeless():
    _, _, _, view = build(EDGELESS2)
    report = intersection_unit_gap(view)
    assert report.witness is None
