"""Finite categories of regions and causal curves.

Objects are regions (antichains in slice mode, arbitrary event subsets in
space mode); a morphism X -> Y is any subset of the curves through X and
then Y, and composition is intersection of curve sets.  Homsets are
powersets, so the empty curve set is a morphism between every pair.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .spacetime import (
    DEFAULT_OBJECT_CAP,
    CapExceeded,
    CausalGraph,
    CurveUniverse,
    bits,
    enumerate_curves,
    submasks,
)

DEFAULT_HOM_CAP = 12


@dataclass(frozen=True)
class Morphism:
    """A typed curve set: ``curves`` is a subset of C[src, dst]."""

    src: int
    dst: int
    curves: int


@dataclass
class LawReport:
    """Outcome of one law sweep; a failure always carries a replayable witness."""

    name: str
    passed: bool
    checked: int = 0
    witness: dict | None = None
    sampled: bool = False
    notes: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        return {
            "name": self.name,
            "status": "pass" if self.passed else "fail",
            "checked": self.checked,
            "sampled": self.sampled,
            "witness": self.witness,
            "notes": self.notes,
        }


@dataclass(frozen=True)
class ProductCone:
    apex: int
    proj0: Morphism
    proj1: Morphism


@dataclass(frozen=True)
class CoproductCocone:
    apex: int
    inj0: Morphism
    inj1: Morphism


class CategoryView:
    """A finite full subcategory over a fixed graph and curve universe.

    ``complete`` records that the object list is the whole slice enumeration
    (or every region, in space mode); several verdicts are only sound on
    complete views.
    """

    def __init__(self, graph: CausalGraph, universe: CurveUniverse,
                 objects: tuple[int, ...], mode: str,
                 hom_cap: int = DEFAULT_HOM_CAP, complete: bool = False):
        if mode not in ("slice", "space"):
            raise ValueError(f"unknown mode {mode!r}")
        if len(set(objects)) != len(objects):
            raise ValueError("duplicate objects")
        if mode == "slice":
            for obj in objects:
                if not graph.is_spacelike(obj):
                    raise ValueError(
                        f"object {graph.region_str(obj)} is not spacelike")
        self.graph = graph
        self.universe = universe
        self.objects = tuple(sorted(objects))
        self.obj_index = {o: i for i, o in enumerate(self.objects)}
        self.mode = mode
        self.hom_cap = hom_cap
        self.complete = complete
        self._hom: dict[tuple[int, int], int] = {}

    # -- construction -------------------------------------------------------

    @classmethod
    def slice_view(cls, graph: CausalGraph, universe: CurveUniverse | None = None,
                   objects: tuple[int, ...] | None = None,
                   hom_cap: int = DEFAULT_HOM_CAP,
                   object_cap: int = DEFAULT_OBJECT_CAP) -> "CategoryView":
        universe = universe or enumerate_curves(graph)
        complete = objects is None
        if objects is None:
            objects = graph.antichains(object_cap)
        return cls(graph, universe, tuple(objects), "slice", hom_cap, complete)

    @classmethod
    def space_view(cls, graph: CausalGraph, universe: CurveUniverse | None = None,
                   objects: tuple[int, ...] | None = None,
                   hom_cap: int = DEFAULT_HOM_CAP,
                   object_cap: int = DEFAULT_OBJECT_CAP) -> "CategoryView":
        universe = universe or enumerate_curves(graph)
        complete = objects is None
        if objects is None:
            if 1 << graph.n_events > object_cap:
                raise CapExceeded("region count", object_cap, 1 << graph.n_events)
            objects = tuple(range(1 << graph.n_events))
        return cls(graph, universe, tuple(objects), "space", hom_cap, complete)

    # -- hom structure ------------------------------------------------------

    def hom(self, x: int, y: int) -> int:
        """Carrier C[x,y]: every morphism x -> y is a subset of this mask."""
        key = (x, y)
        cached = self._hom.get(key)
        if cached is None:
            cached = self._hom[key] = self.universe.through(x, y)
        return cached

    def require_object(self, x: int) -> None:
        if x not in self.obj_index:
            raise ValueError(f"{self.graph.region_str(x)} is not an object of the view")

    def identity(self, x: int) -> Morphism:
        self.require_object(x)
        return Morphism(x, x, self.hom(x, x))

    def compose(self, t: Morphism, s: Morphism) -> Morphism:
        """t after s, by intersection.  Raises on an endpoint mismatch."""
        if s.dst != t.src:
            raise ValueError("endpoint mismatch in composition")
        out = Morphism(s.src, t.dst, t.curves & s.curves)
        # Curves through s.src-then-mid and mid-then-t.dst chain into
        # s.src-then-t.dst, so the composite is always well-typed.
        assert out.curves & ~self.hom(s.src, t.dst) == 0
        return out

    def morphisms(self, x: int, y: int) -> Iterator[Morphism]:
        """Every morphism x -> y, canonically ordered; gated by the hom cap."""
        carrier = self.hom(x, y)
        if carrier.bit_count() > self.hom_cap:
            raise CapExceeded("hom basis", self.hom_cap, carrier.bit_count())
        for mask in submasks(carrier):
            yield Morphism(x, y, mask)

    # -- (co)equalizers ------------------------------------------------------

    def equalizer(self, f: Morphism, g: Morphism) -> Morphism:
        """Complement of the symmetric difference inside C[A,B], typed A -> A."""
        carrier = self._parallel_carrier(f, g)
        return Morphism(f.src, f.src, carrier & ~(f.curves ^ g.curves))

    def coequalizer(self, f: Morphism, g: Morphism) -> Morphism:
        """Same curve set as the equalizer, typed B -> B."""
        carrier = self._parallel_carrier(f, g)
        return Morphism(f.dst, f.dst, carrier & ~(f.curves ^ g.curves))

    def _parallel_carrier(self, f: Morphism, g: Morphism) -> int:
        if (f.src, f.dst) != (g.src, g.dst):
            raise ValueError("endpoint mismatch: not a parallel pair")
        return self.hom(f.src, f.dst)

    # -- (co)products ---------------------------------------------------------

    def product(self, x: int, y: int) -> ProductCone:
        """Product of disjoint jointly spacelike regions: the union, with
        projections given by all curves through each factor."""
        self._check_product_hypotheses(x, y)
        apex = x | y
        return ProductCone(apex,
                           Morphism(apex, x, self.universe.visits(x)),
                           Morphism(apex, y, self.universe.visits(y)))

    def coproduct(self, x: int, y: int) -> CoproductCocone:
        self._check_product_hypotheses(x, y)
        apex = x | y
        return CoproductCocone(apex,
                               Morphism(x, apex, self.universe.visits(x)),
                               Morphism(y, apex, self.universe.visits(y)))

    def _check_product_hypotheses(self, x: int, y: int) -> None:
        self.require_object(x)
        self.require_object(y)
        if x & y:
            raise ValueError("regions must be disjoint")
        if not self.graph.jointly_spacelike(x, y):
            raise ValueError("regions must be jointly spacelike")

    @staticmethod
    def tuple_arrow(f: Morphism, g: Morphism) -> Morphism:
        """Mediating arrow into a product: the union of the component sets."""
        if f.src != g.src:
            raise ValueError("cone legs must share a source")
        return Morphism(f.src, f.dst | g.dst, f.curves | g.curves)

    @staticmethod
    def cotuple_arrow(f: Morphism, g: Morphism) -> Morphism:
        if f.dst != g.dst:
            raise ValueError("cocone legs must share a target")
        return Morphism(f.src | g.src, f.dst, f.curves | g.curves)


# ---------------------------------------------------------------------------
# Law sweeps
# ---------------------------------------------------------------------------

def _sampled_masks(carrier: int, count: int, rng: random.Random) -> list[int]:
    width = carrier.bit_count()
    out = []
    for _ in range(count):
        m = 0
        for b in bits(carrier):
            if rng.getrandbits(1):
                m |= 1 << b
        out.append(m)
    return out


def check_category_laws(view: CategoryView, exhaustive_bits: int = 12,
                        samples: int = 32, seed: int = 0,
                        compose_masks: Callable[[int, int], int] | None = None,
                        max_unit_bits: int = 16) -> LawReport:
    """Sweep associativity, both unit laws, and endomorphism commutativity.

    Tuples are enumerated exhaustively while the powerset product stays under
    ``exhaustive_bits`` bits and sampled (seeded) above that.  ``compose_masks``
    exists so tests can corrupt composition and watch the sweep catch it.
    """
    comp = compose_masks or (lambda a, b: a & b)
    rng = random.Random(seed)
    checked = 0
    sampled = False
    objs = view.objects
    g = view.graph
    u = view.universe

    def witness(kind: str, **masks: int) -> dict:
        w = {"kind": kind}
        for k, v in masks.items():
            if k.endswith("_obj"):
                w[k] = g.region_str(v)
            else:
                w[k] = u.set_str(v)
        return w

    # unit laws (and endomorphism commutativity on x == y)
    for x in objs:
        ix = view.hom(x, x)
        for y in objs:
            carrier = view.hom(x, y)
            iy = view.hom(y, y)
            nbits = carrier.bit_count()
            if nbits <= max_unit_bits:
                fs = submasks(carrier)
            else:
                fs = _sampled_masks(carrier, samples, rng)
                sampled = True
            for f in fs:
                checked += 1
                if comp(f, ix) != f or comp(iy, f) != f:
                    return LawReport("category_laws", False, checked,
                                     witness("unit", x_obj=x, y_obj=y, f=f))
            if x == y:
                pool = fs if nbits <= 6 else fs[:16]
                for f in pool:
                    for h in pool:
                        checked += 1
                        if comp(f, h) != comp(h, f):
                            return LawReport("category_laws", False, checked,
                                             witness("endo_commute", x_obj=x, f=f, g=h))

    # associativity over composable triples
    for x in objs:
        for y in objs:
            c1 = view.hom(x, y)
            for z in objs:
                c2 = view.hom(y, z)
                for w in objs:
                    c3 = view.hom(z, w)
                    total = c1.bit_count() + c2.bit_count() + c3.bit_count()
                    if total <= exhaustive_bits:
                        triples = ((f, gm, h) for f in submasks(c1)
                                   for gm in submasks(c2) for h in submasks(c3))
                    else:
                        sampled = True
                        triples = zip(_sampled_masks(c1, samples, rng),
                                      _sampled_masks(c2, samples, rng),
                                      _sampled_masks(c3, samples, rng))
                    for f, gm, h in triples:
                        checked += 1
                        if comp(comp(h, gm), f) != comp(h, comp(gm, f)):
                            return LawReport(
                                "category_laws", False, checked,
                                witness("assoc", x_obj=x, y_obj=y, z_obj=z,
                                        w_obj=w, f=f, g=gm, h=h))

    return LawReport("category_laws", True, checked, sampled=sampled)


def check_equalizer_universality(view: CategoryView, f: Morphism,
                                 g: Morphism) -> LawReport:
    """Verify the (co)equalizer of one parallel pair against all cones.

    Cones are enumerated over carrier-valued arrows (subsets of C[W,A] that
    live inside the pair's carrier C[A,B]); each equalizing cone must land
    inside the equalizer and factor through it by exactly one carrier-valued
    mediating arrow.  Unrestricted mediators are not unique in a powerset
    homset, so uniqueness is checked among arrows contained in the equalizer.
    """
    a, b = f.src, f.dst
    carrier = view.hom(a, b)
    diff = f.curves ^ g.curves
    eq = view.equalizer(f, g)
    coeq = view.coequalizer(f, g)
    checked = 0

    if f.curves & eq.curves != g.curves & eq.curves:
        return LawReport("equalizer_universality", False, 1,
                         {"kind": "not_equalizing"})
    if f.curves & coeq.curves != g.curves & coeq.curves:
        return LawReport("equalizer_universality", False, 1,
                         {"kind": "not_coequalizing"})

    for w in view.objects:
        cone_basis = view.hom(w, a) & carrier
        cocone_basis = view.hom(b, w) & carrier
        if max(cone_basis.bit_count(), cocone_basis.bit_count()) > view.hom_cap:
            raise CapExceeded("cone basis", view.hom_cap, cone_basis.bit_count())
        for h in submasks(cone_basis):
            if h & diff:
                continue  # not an equalizing cone
            checked += 1
            mediators = [m for m in submasks(eq.curves & view.hom(w, a))
                         if eq.curves & m == h]
            if h & ~eq.curves or mediators != [h]:
                return LawReport(
                    "equalizer_universality", False, checked,
                    {"kind": "equalizer", "W": view.graph.region_str(w),
                     "h": view.universe.set_str(h),
                     "mediators": len(mediators)})
        for h in submasks(cocone_basis):
            if h & diff:
                continue
            checked += 1
            mediators = [m for m in submasks(coeq.curves & view.hom(b, w))
                         if coeq.curves & m == h]
            if h & ~coeq.curves or mediators != [h]:
                return LawReport(
                    "equalizer_universality", False, checked,
                    {"kind": "coequalizer", "W": view.graph.region_str(w),
                     "h": view.universe.set_str(h),
                     "mediators": len(mediators)})

    return LawReport("equalizer_universality", True, checked)


def check_product_universality(view: CategoryView, x: int, y: int) -> LawReport:
    """Exhaustively verify the product and coproduct of one disjoint pair."""
    cone = view.product(x, y)
    cocone = view.coproduct(x, y)
    apex = cone.apex
    checked = 0
    for w in view.objects:
        hx, hy = view.hom(w, x), view.hom(w, y)
        hxy = view.hom(w, apex)
        if hx.bit_count() + hy.bit_count() > view.hom_cap \
                or hxy.bit_count() > view.hom_cap:
            raise CapExceeded("cone basis", view.hom_cap,
                              hx.bit_count() + hy.bit_count())
        for fm in submasks(hx):
            for gm in submasks(hy):
                checked += 1
                med = fm | gm
                if cone.proj0.curves & med != fm or cone.proj1.curves & med != gm:
                    return LawReport("product_universality", False, checked,
                                     {"kind": "product_commute",
                                      "W": view.graph.region_str(w),
                                      "f": view.universe.set_str(fm),
                                      "g": view.universe.set_str(gm)})
                others = [m for m in submasks(hxy)
                          if cone.proj0.curves & m == fm
                          and cone.proj1.curves & m == gm]
                if others != [med]:
                    return LawReport("product_universality", False, checked,
                                     {"kind": "product_unique",
                                      "W": view.graph.region_str(w),
                                      "mediators": len(others)})
        # coproduct, dually
        hxw, hyw = view.hom(x, w), view.hom(y, w)
        hxyw = view.hom(apex, w)
        for fm in submasks(hxw):
            for gm in submasks(hyw):
                checked += 1
                med = fm | gm
                if cocone.inj0.curves & med != fm or cocone.inj1.curves & med != gm:
                    return LawReport("product_universality", False, checked,
                                     {"kind": "coproduct_commute",
                                      "W": view.graph.region_str(w)})
                others = [m for m in submasks(hxyw)
                          if cocone.inj0.curves & m == fm
                          and cocone.inj1.curves & m == gm]
                if others != [med]:
                    return LawReport("product_universality", False, checked,
                                     {"kind": "coproduct_unique",
                                      "W": view.graph.region_str(w),
                                      "mediators": len(others)})
    return LawReport("product_universality", True, checked)


def union_bifunctoriality_gap(view: CategoryView) -> LawReport:
    """Search for a strict failure of bifunctoriality of the union tensor.

    Looks for S: X->Y, S': Y->Z, T: X'->Y', T': Y'->Z' with
    (S' | T') & (S | T) strictly above (S' & S) | (T' & T).  The paired
    regions (X,X'), (Y,Y'), (Z,Z') are kept disjoint: the tensor combines
    separate parts, and overlapping columns admit degenerate witnesses on
    every graph with a nonempty region.

    A strict tuple exists among disjoint columns iff two crossed hom
    carriers intersect, so the sweep over carrier pairs below is complete;
    the reported witness takes S and T' empty and S', T full carriers.
    """
    if view.mode != "space":
        raise ValueError("bifunctoriality search needs a space-mode view")
    checked = 0
    empty = 0
    view.require_object(empty)
    for y in view.objects:
        for z in view.objects:
            s2 = view.hom(y, z)
            if not s2:
                continue
            for x2 in view.objects:
                for y2 in view.objects:
                    if y & y2:
                        continue
                    checked += 1
                    t = view.hom(x2, y2)
                    cross = s2 & t
                    if not cross:
                        continue
                    lhs = (s2 | 0) & (0 | t)
                    rhs = (s2 & 0) | (0 & t)
                    # sanity: inclusion always holds
                    assert lhs & rhs == rhs
                    return LawReport(
                        "union_bifunctoriality_gap", True, checked,
                        witness={
                            "X": view.graph.region_str(empty),
                            "Y": view.graph.region_str(y),
                            "Z": view.graph.region_str(z),
                            "Xp": view.graph.region_str(x2),
                            "Yp": view.graph.region_str(y2),
                            "Zp": view.graph.region_str(empty),
                            "S": view.universe.set_str(0),
                            "Sp": view.universe.set_str(s2),
                            "T": view.universe.set_str(t),
                            "Tp": view.universe.set_str(0),
                            "lhs": view.universe.set_str(lhs),
                            "rhs": view.universe.set_str(rhs),
                        },
                        notes={"witness_expected": True})
    return LawReport("union_bifunctoriality_gap", True, checked,
                     notes={"witness_expected": False, "found": False})


def intersection_unit_gap(view: CategoryView) -> LawReport:
    """Find disjoint regions whose identities overlap: 1_X & 1_Y != 1_{X&Y}."""
    checked = 0
    for i, x in enumerate(view.objects):
        cx = view.universe.visits(x)
        for y in view.objects[i + 1:]:
            if x & y:
                continue
            checked += 1
            overlap = cx & view.universe.visits(y)
            if overlap:
                return LawReport(
                    "intersection_unit_gap", True, checked,
                    witness={"X": view.graph.region_str(x),
                             "Y": view.graph.region_str(y),
                             "identity_overlap": view.universe.set_str(overlap)},
                    notes={"witness_expected": True})
    return LawReport("intersection_unit_gap", True, checked,
                     notes={"witness_expected": False, "found": False})
