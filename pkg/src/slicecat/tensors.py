"""Conjunction- and disjunction-shaped presheaves and the union tensor.

Every presheaf here sends a region Z to the powerset of a basis curve set
and every morphism to intersection with its curve set, so a presheaf is
stored as one basis mask per view object and a natural transformation as a
single curve mask K acting by C -> C & K.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .category import CategoryView, LawReport, Morphism
from .spacetime import CapExceeded, bits, submasks


@dataclass(frozen=True)
class Presheaf:
    """Intersection-shaped presheaf: Z maps to the powerset of ``bases[Z]``."""

    view: CategoryView
    kind: str                 # "wedge" | "vee" | "unit" | "yoneda"
    args: tuple[int, ...]     # region masks parameterizing the basis
    bases: tuple[int, ...]    # aligned with view.objects

    def basis(self, obj: int) -> int:
        return self.bases[self.view.obj_index[obj]]

    def act(self, s: Morphism, c: int) -> int:
        """Action of a morphism s: Z' -> Z on an element of the value at Z."""
        return c & s.curves

    def describe(self) -> str:
        names = ",".join(self.view.graph.region_str(a) for a in self.args)
        return f"{self.kind}({names})" if names else self.kind


def wedge(view: CategoryView, x: int, y: int) -> Presheaf:
    """Basis at Z: curves through Z and then both x and y."""
    view.require_object(x)
    view.require_object(y)
    u = view.universe
    bases = tuple(u.through(z, x) & u.through(z, y) for z in view.objects)
    return Presheaf(view, "wedge", (x, y), bases)


def vee(view: CategoryView, x: int, y: int) -> Presheaf:
    """Basis at Z: curves through Z and then either x or y."""
    view.require_object(x)
    view.require_object(y)
    u = view.universe
    bases = tuple(u.through(z, x) | u.through(z, y) for z in view.objects)
    return Presheaf(view, "vee", (x, y), bases)


def unit_presheaf(view: CategoryView) -> Presheaf:
    """Basis at Z: every curve through Z."""
    bases = tuple(view.universe.visits(z) for z in view.objects)
    return Presheaf(view, "unit", (), bases)


def yoneda(view: CategoryView, w: int) -> Presheaf:
    """The representable presheaf of w: basis at Z is the hom carrier C[Z,w]."""
    view.require_object(w)
    bases = tuple(view.hom(z, w) for z in view.objects)
    return Presheaf(view, "yoneda", (w,), bases)


def check_presheaf_laws(f: Presheaf, max_bits: int = 10) -> LawReport:
    """Identity and contravariant composition laws, by direct evaluation."""
    view = f.view
    checked = 0
    for i, z in enumerate(view.objects):
        # identity action is the identity: basis lives inside C[z,z]
        if f.bases[i] & ~view.hom(z, z):
            return LawReport("presheaf_laws", False, checked,
                             {"kind": "identity", "Z": view.graph.region_str(z)})
        checked += 1
    for z in view.objects:
        iz = view.obj_index[z]
        for zp in view.objects:
            s_car = view.hom(zp, z)
            for zpp in view.objects:
                t_car = view.hom(zpp, zp)
                if f.bases[iz].bit_count() + s_car.bit_count() \
                        + t_car.bit_count() > max_bits:
                    picks = [(f.bases[iz], s_car, t_car)]
                else:
                    picks = [(c, s, t) for c in submasks(f.bases[iz])
                             for s in submasks(s_car) for t in submasks(t_car)]
                for c, s, t in picks:
                    checked += 1
                    if (c & s) & t != c & (s & t):
                        return LawReport("presheaf_laws", False, checked,
                                         {"kind": "composition"})
    return LawReport("presheaf_laws", True, checked)


@dataclass(frozen=True)
class IntersectNat:
    """A natural transformation whose every component is C -> C & k."""

    dom: Presheaf
    cod: Presheaf
    k: int

    def component(self, z: int, c: int) -> int:
        return c & self.k

    def well_typed(self) -> dict | None:
        """None when every component lands in the codomain basis powerset,
        else a witness.  Disjunction-shaped transformations can leak: a curve
        kept by the shield of k may fall outside the target basis."""
        view = self.dom.view
        for i, z in enumerate(view.objects):
            escape = self.dom.bases[i] & self.k & ~self.cod.bases[i]
            if escape:
                return {"Z": view.graph.region_str(z),
                        "escapes": view.universe.set_str(escape)}
        return None

    def check_naturality(self, max_bits: int = 10) -> LawReport:
        """Evaluate both square legs on enumerated elements and morphisms."""
        view = self.dom.view
        checked = 0
        for z in view.objects:
            iz = view.obj_index[z]
            for zp in view.objects:
                u_car = view.hom(zp, z)
                if self.dom.bases[iz].bit_count() + u_car.bit_count() > max_bits:
                    picks = [(self.dom.bases[iz], u_car)]
                else:
                    picks = [(c, u) for c in submasks(self.dom.bases[iz])
                             for u in submasks(u_car)]
                for c, u in picks:
                    checked += 1
                    if (c & u) & self.k != (c & self.k) & u:
                        return LawReport("naturality", False, checked,
                                         {"Z": view.graph.region_str(z)})
        return LawReport("naturality", True, checked)


def wedge_map(view: CategoryView, s: Morphism, t: Morphism) -> IntersectNat:
    """(s, t) acting on the conjunction presheaf; k is their intersection."""
    return IntersectNat(wedge(view, s.src, t.src),
                        wedge(view, s.dst, t.dst), s.curves & t.curves)


def vee_left(view: CategoryView, s: Morphism, y: int) -> IntersectNat:
    """s acting on the left of the disjunction presheaf: k = s | C[y]."""
    return IntersectNat(vee(view, s.src, y), vee(view, s.dst, y),
                        s.curves | view.universe.visits(y))


def vee_right(view: CategoryView, x: int, t: Morphism) -> IntersectNat:
    """t acting on the right of the disjunction presheaf: k = C[x] | t."""
    return IntersectNat(vee(view, x, t.src), vee(view, x, t.dst),
                        view.universe.visits(x) | t.curves)


# ---------------------------------------------------------------------------
# Interchange
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    """A replayable counterexample to an interchange square."""

    mode: str                       # "vee" | "space_union"
    x: int
    xp: int
    y: int
    yp: int
    s: int
    t: int
    probe: int | None               # vee mode only
    element: int | None             # vee mode only
    lhs: int
    rhs: int

    def to_record(self, view: CategoryView) -> dict:
        g, u = view.graph, view.universe
        rec = {
            "mode": self.mode,
            "X": g.region_str(self.x), "Xp": g.region_str(self.xp),
            "Y": g.region_str(self.y), "Yp": g.region_str(self.yp),
            "S": u.set_str(self.s), "T": u.set_str(self.t),
            "lhs": u.set_str(self.lhs), "rhs": u.set_str(self.rhs),
        }
        if self.probe is not None:
            rec["Z"] = g.region_str(self.probe)
        if self.element is not None:
            rec["C"] = u.set_str(self.element)
        return rec


def _morphism_candidates(view: CategoryView, x: int, y: int,
                         full_sweep: bool) -> Iterator[int]:
    """Empty set and identities first, then singletons, then the powerset."""
    carrier = view.hom(x, y)
    yield 0
    if x == y:
        yield carrier
    seen = {0, carrier} if x == y else {0}
    for b in bits(carrier):
        m = 1 << b
        if m not in seen:
            seen.add(m)
            yield m
    if full_sweep and carrier.bit_count() <= view.hom_cap:
        for m in submasks(carrier):
            if m not in seen:
                yield m


def vee_interchange_values(view: CategoryView, x: int, xp: int, y: int,
                           yp: int, s: int, t: int, z: int,
                           c: int) -> tuple[int, int]:
    """Both composite images of c under the two left/right orders."""
    cx = view.universe.visits(x)
    cxp = view.universe.visits(xp)
    cy = view.universe.visits(y)
    cyp = view.universe.visits(yp)
    one = c & (cx | t) & (s | cyp)     # right action then left action
    two = c & (s | cy) & (cxp | t)     # left action then right action
    return one, two


def space_interchange_values(view: CategoryView, x: int, xp: int, y: int,
                             yp: int, s: int, t: int) -> tuple[int, int]:
    """Composite morphisms (s ltimes yp)(x rtimes t) and (xp rtimes t)(s ltimes y)."""
    u = view.universe
    one = (s | u.visits(yp)) & (u.visits(x) | t)
    two = (u.visits(xp) | t) & (s | u.visits(y))
    return one, two


def interchange_witness(view: CategoryView, mode: str,
                        full_sweep: bool = False) -> Witness | None:
    """First interchange failure in canonical order, or None.

    The conjunction tensor cannot produce one (both orders intersect with
    s & t); the disjunction-shaped structures generically do.  The search
    keeps the two tensor columns disjoint as regions: a shared event makes
    both structures fail for the uninteresting reason that its tiny curve
    feeds one column's identity into the other, on any graph at all.
    """
    if mode not in ("vee", "space_union"):
        raise ValueError(f"unknown interchange mode {mode!r}")
    if mode == "space_union" and view.mode != "space":
        raise ValueError("space_union interchange needs a space-mode view")
    for x in view.objects:
        for xp in view.objects:
            s_cands = list(_morphism_candidates(view, x, xp, full_sweep))
            for y in view.objects:
                for yp in view.objects:
                    if (x | xp) & (y | yp):
                        continue
                    t_cands = _morphism_candidates(view, y, yp, full_sweep)
                    for t in t_cands:
                        for s in s_cands:
                            if mode == "space_union":
                                one, two = space_interchange_values(
                                    view, x, xp, y, yp, s, t)
                                if one != two:
                                    return Witness("space_union", x, xp, y, yp,
                                                   s, t, None, None, one, two)
                                continue
                            for z in view.objects:
                                basis = view.universe.through(z, x) \
                                    | view.universe.through(z, y)
                                one, two = vee_interchange_values(
                                    view, x, xp, y, yp, s, t, z, basis)
                                delta = one ^ two
                                if delta:
                                    c = 1 << (delta & -delta).bit_length() - 1
                                    o, w = vee_interchange_values(
                                        view, x, xp, y, yp, s, t, z, c)
                                    return Witness("vee", x, xp, y, yp, s, t,
                                                   z, c, o, w)
    return None


def wedge_interchange_sweep(view: CategoryView) -> LawReport:
    """Confirm both orders agree for the conjunction tensor on every tuple."""
    checked = 0
    for x in view.objects:
        for xp in view.objects:
            s_cands = list(_morphism_candidates(view, x, xp, False))
            for y in view.objects:
                for yp in view.objects:
                    for t in _morphism_candidates(view, y, yp, False):
                        for s in s_cands:
                            for z in view.objects:
                                basis = view.universe.through(z, x) \
                                    & view.universe.through(z, y)
                                checked += 1
                                if basis & t & s != basis & s & t:
                                    return LawReport(
                                        "wedge_interchange", False, checked,
                                        {"X": view.graph.region_str(x)})
    return LawReport("wedge_interchange", True, checked)


# ---------------------------------------------------------------------------
# Representability
# ---------------------------------------------------------------------------

def representability_fast(f: Presheaf) -> list[int]:
    """Regions w whose hom carriers match the basis at every object.

    In this powerset setting a natural isomorphism from the representable
    at w exists exactly when C[Z,w] equals the basis at every Z, so this
    criterion is complete; soundness of a negative verdict needs the view
    to be the full slice enumeration.
    """
    view = f.view
    if not view.complete:
        raise ValueError("representability verdicts need a complete view")
    out = []
    for w in view.objects:
        if all(view.hom(z, w) == f.bases[i]
               for i, z in enumerate(view.objects)):
            out.append(w)
    return out


def representability_slow(f: Presheaf, max_bits: int = 8) -> tuple[str, object]:
    """Independent oracle: search for an invertible element-induced map.

    For each candidate w and each element e of the value at w, the induced
    transformation sends g in the hom powerset at Z to e & g; w represents
    the presheaf iff some e makes that map a bijection onto the value
    powerset at every Z, checked here by literal enumeration.

    Returns ("some", (w, e)), ("none", None), or ("skipped", reason) when
    enumeration would exceed ``max_bits`` of powerset anywhere.
    """
    view = f.view
    if not view.complete:
        raise ValueError("representability verdicts need a complete view")
    skipped = False
    for w in view.objects:
        iw = view.obj_index[w]
        if f.bases[iw].bit_count() > max_bits:
            skipped = True
            continue
        for e in submasks(f.bases[iw]):
            ok = True
            for i, z in enumerate(view.objects):
                car = view.hom(z, w)
                if car.bit_count() > max_bits or f.bases[i].bit_count() > max_bits:
                    skipped = True
                    ok = False
                    break
                images = [e & gmask for gmask in submasks(car)]
                target = set(submasks(f.bases[i]))
                if len(set(images)) != len(images) or set(images) != target:
                    ok = False
                    break
            if ok:
                return "some", (w, e)
    return ("skipped", "powerset bits") if skipped else ("none", None)


def representability(f: Presheaf, oracle: str = "fast",
                     slow_bits: int = 8) -> int | None:
    """Representing region of the presheaf, or None.

    ``oracle``: "fast", "slow", or "both" (cross-checks agreement whenever
    the slow enumeration completes).
    """
    fast = representability_fast(f)
    if len(fast) > 1:
        raise AssertionError("distinct regions share a presheaf; view corrupt")
    fast_result = fast[0] if fast else None
    if oracle == "fast":
        return fast_result
    verdict, payload = representability_slow(f, slow_bits)
    if oracle == "slow":
        if verdict == "skipped":
            raise CapExceeded("slow oracle powerset", slow_bits, slow_bits + 1)
        return payload[0] if verdict == "some" else None
    if verdict == "some" and payload[0] != fast_result:
        raise AssertionError("representability oracles disagree")
    if verdict == "none" and fast_result is not None:
        raise AssertionError("representability oracles disagree")
    return fast_result


def partial_tensor(view: CategoryView, x: int, y: int, mode: str) -> int | None:
    """The recovered partial operation: defined only on jointly spacelike
    pairs, where conjunction acts as intersection and disjunction as union."""
    view.require_object(x)
    view.require_object(y)
    if not view.graph.jointly_spacelike(x, y):
        return None
    return x & y if mode == "wedge" else x | y


# ---------------------------------------------------------------------------
# The union tensor on space-mode views
# ---------------------------------------------------------------------------

def rtimes(view: CategoryView, x: int, t: Morphism) -> Morphism:
    """x acting on the left of the union tensor: C[x] | t, typed on unions."""
    if view.mode != "space":
        raise ValueError("the union tensor lives on space-mode views")
    view.require_object(x)
    view.require_object(x | t.src)
    view.require_object(x | t.dst)
    return Morphism(x | t.src, x | t.dst, view.universe.visits(x) | t.curves)


def ltimes(view: CategoryView, s: Morphism, y: int) -> Morphism:
    if view.mode != "space":
        raise ValueError("the union tensor lives on space-mode views")
    view.require_object(y)
    view.require_object(s.src | y)
    view.require_object(s.dst | y)
    return Morphism(s.src | y, s.dst | y, s.curves | view.universe.visits(y))


def central_check(view: CategoryView, f: Morphism,
                  full_sweep: bool = False) -> tuple[bool, Witness | None]:
    """Does f satisfy both interchange squares against every probed g?"""
    for xp in view.objects:
        for yp in view.objects:
            for gm in _morphism_candidates(view, xp, yp, full_sweep):
                g = Morphism(xp, yp, gm)
                one, two = space_interchange_values(
                    view, f.src, f.dst, g.src, g.dst, f.curves, g.curves)
                if one != two:
                    return False, Witness("space_union", f.src, f.dst, g.src,
                                          g.dst, f.curves, g.curves, None,
                                          None, one, two)
                one, two = space_interchange_values(
                    view, g.src, g.dst, f.src, f.dst, g.curves, f.curves)
                if one != two:
                    return False, Witness("space_union", g.src, g.dst, f.src,
                                          f.dst, g.curves, f.curves, None,
                                          None, one, two)
    return True, None


def premonoidal_check(view: CategoryView, max_bits: int = 10) -> LawReport:
    """Validate the strict premonoidal layer of the union tensor.

    Checks, for every object pair and enumerated morphisms within budget:
    identity preservation rtimes(x, 1_y) = 1_{x|y} (as literal set
    equality), per-side functoriality, unit laws for the empty region, and
    centrality of identities against the candidate family.
    """
    if view.mode != "space":
        raise ValueError("the union tensor lives on space-mode views")
    u = view.universe
    checked = 0
    for x in view.objects:
        cx = u.visits(x)
        for y in view.objects:
            checked += 1
            if cx | u.visits(y) != u.visits(x | y):
                return LawReport("premonoidal", False, checked,
                                 {"kind": "identity_preservation",
                                  "X": view.graph.region_str(x),
                                  "Y": view.graph.region_str(y)})
            # per-side functoriality over composable pairs within budget
            for z in view.objects:
                c1, c2 = view.hom(y, z), view.hom(x, y)
                if c1.bit_count() + c2.bit_count() > max_bits:
                    pairs = [(c1, c2), (0, c2), (c1, 0)]
                else:
                    pairs = [(a, b) for a in submasks(c1) for b in submasks(c2)]
                for fp, f in pairs:
                    checked += 1
                    if (cx | fp) & (cx | f) != cx | (fp & f):
                        return LawReport("premonoidal", False, checked,
                                         {"kind": "rtimes_functoriality"})
                    if (fp | cx) & (f | cx) != (fp & f) | cx:
                        return LawReport("premonoidal", False, checked,
                                         {"kind": "ltimes_functoriality"})
    # unit laws: the empty region is a strict unit
    for x in view.objects:
        for y in view.objects:
            car = view.hom(x, y)
            for f in (0, car):
                checked += 1
                t = Morphism(x, y, f)
                if rtimes(view, 0, t) != t or ltimes(view, t, 0) != t:
                    return LawReport("premonoidal", False, checked,
                                     {"kind": "unit"})
    # centrality of identities
    for x in view.objects:
        ok, wit = central_check(view, view.identity(x))
        checked += 1
        if not ok:
            return LawReport("premonoidal", False, checked,
                             {"kind": "identity_not_central",
                              **wit.to_record(view)})
    return LawReport("premonoidal", True, checked)
