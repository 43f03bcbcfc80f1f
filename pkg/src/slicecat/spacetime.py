"""Finite causal sites: event graphs, causal curves, and curve-set algebra.

Events are numbered by declaration order.  A region is an int bitmask over
events; a curve set is an int bitmask over the canonical curve universe of a
graph.  All set algebra downstream (composition, tensors, coends) is bitwise
arithmetic on these masks, so every operation is exact and reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

DEFAULT_CURVE_CAP = 4096
DEFAULT_OBJECT_CAP = 1024


class CapExceeded(Exception):
    """An enumeration outgrew its configured cap; nothing is truncated silently."""

    def __init__(self, what: str, cap: int, needed: int):
        super().__init__(f"{what} exceeds cap {cap} (needs >= {needed})")
        self.what = what
        self.cap = cap
        self.needed = needed


class ParseError(ValueError):
    """Malformed site file, with the offending 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def bits(mask: int) -> Iterator[int]:
    """Indices of set bits, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


_SUBMASK_CACHE: dict[int, tuple[int, ...]] = {}
_SUBINDEX_CACHE: dict[int, dict[int, int]] = {}

# Powerset enumeration is the engine's exponential knob; 20 bits (1M subsets)
# is far beyond any desk-scale sweep and acts as a hard sanity bound.
_MAX_POWERSET_BITS = 20


def submasks(mask: int) -> tuple[int, ...]:
    """All subsets of ``mask`` in canonical order (counter over its bits)."""
    cached = _SUBMASK_CACHE.get(mask)
    if cached is not None:
        return cached
    positions = tuple(bits(mask))
    if len(positions) > _MAX_POWERSET_BITS:
        raise CapExceeded("powerset bits", _MAX_POWERSET_BITS, len(positions))
    out = []
    for k in range(1 << len(positions)):
        m = 0
        for j, p in enumerate(positions):
            if k >> j & 1:
                m |= 1 << p
        out.append(m)
    cached = tuple(out)
    _SUBMASK_CACHE[mask] = cached
    return cached


def submask_index(mask: int) -> dict[int, int]:
    """Inverse of :func:`submasks`: subset mask -> position in canonical order."""
    cached = _SUBINDEX_CACHE.get(mask)
    if cached is None:
        cached = {m: i for i, m in enumerate(submasks(mask))}
        _SUBINDEX_CACHE[mask] = cached
    return cached


@dataclass(frozen=True)
class CausalGraph:
    """A finite directed event graph; edges are elementary causal steps.

    Cycles are permitted (closed timelike loops); self-edges are not.
    ``coords`` optionally attaches integer (t, x) pairs to lattice events.
    """

    labels: tuple[str, ...]
    edges: frozenset[tuple[int, int]]
    coords: tuple[tuple[int, int] | None, ...] = ()

    def __post_init__(self) -> None:
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise ValueError("duplicate event label")
        if not self.coords:
            object.__setattr__(self, "coords", tuple([None] * n))
        elif len(self.coords) != n:
            raise ValueError("coords length mismatch")
        for src, dst in self.edges:
            if src == dst:
                raise ValueError(f"self-edge on event {self.labels[src]!r}")
            if not (0 <= src < n and 0 <= dst < n):
                raise ValueError("edge endpoint is not a declared event")

    @property
    def n_events(self) -> int:
        return len(self.labels)

    @property
    def all_events(self) -> int:
        return (1 << len(self.labels)) - 1

    @cached_property
    def label_index(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    @cached_property
    def successors(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in self.labels]
        for src, dst in self.edges:
            out[src].append(dst)
        return tuple(tuple(sorted(s)) for s in out)

    @cached_property
    def reach(self) -> tuple[int, ...]:
        """reach[x] = bitmask of events reachable from x, including x itself."""
        masks = []
        for start in range(self.n_events):
            seen = 1 << start
            stack = [start]
            while stack:
                cur = stack.pop()
                for nxt in self.successors[cur]:
                    if not seen >> nxt & 1:
                        seen |= 1 << nxt
                        stack.append(nxt)
            masks.append(seen)
        return tuple(masks)

    @cached_property
    def comparable(self) -> tuple[int, ...]:
        """comparable[x] = events y != x with x preceding y or y preceding x."""
        fwd = self.reach
        bwd = [0] * self.n_events
        for x in range(self.n_events):
            for y in bits(fwd[x]):
                bwd[y] |= 1 << x
        return tuple((fwd[x] | bwd[x]) & ~(1 << x) for x in range(self.n_events))

    def precedes(self, x: int, y: int) -> bool:
        """x causally precedes y: a directed path exists, or x == y."""
        return bool(self.reach[x] >> y & 1)

    def region(self, labels: Iterable[str]) -> int:
        mask = 0
        for lab in labels:
            try:
                mask |= 1 << self.label_index[lab]
            except KeyError:
                raise KeyError(f"unknown event id {lab!r}") from None
        return mask

    def region_labels(self, mask: int) -> list[str]:
        return [self.labels[i] for i in bits(mask)]

    def region_str(self, mask: int) -> str:
        return "{" + ",".join(self.region_labels(mask)) + "}"

    def is_spacelike(self, region: int) -> bool:
        """No two distinct events of the region are causally related."""
        for x in bits(region):
            if self.comparable[x] & region:
                return False
        return True

    def jointly_spacelike(self, x: int, y: int) -> bool:
        """The union of the two regions is itself spacelike."""
        return self.is_spacelike(x | y)

    def antichains(self, cap: int = DEFAULT_OBJECT_CAP) -> tuple[int, ...]:
        """Every spacelike region (antichain) including the empty one.

        Canonically ordered by event-index bitmask.
        """
        found: list[int] = []

        def extend(first: int, current: int, blocked: int) -> None:
            found.append(current)
            if len(found) > cap:
                raise CapExceeded("antichain count", cap, len(found))
            for e in range(first, self.n_events):
                bit = 1 << e
                if blocked & bit:
                    continue
                extend(e + 1, current | bit, blocked | self.comparable[e])

        extend(0, 0, 0)
        return tuple(sorted(found))


def minkowski_lattice(times: int, positions: int,
                      cap: int = DEFAULT_OBJECT_CAP) -> CausalGraph:
    """A discrete T x W lattice: (t,x) steps to (t+1, x-1 | x | x+1).

    Events are ordered by (t, x); the straight step is timelike, the two
    diagonal steps are null.
    """
    if times < 1 or positions < 1:
        raise ValueError("lattice dimensions must be >= 1")
    if times * positions > cap:
        raise CapExceeded("lattice events", cap, times * positions)
    labels = []
    coords = []
    for t in range(times):
        for x in range(positions):
            labels.append(f"t{t}x{x}")
            coords.append((t, x))
    edges = set()
    for t in range(times - 1):
        for x in range(positions):
            for d in (-1, 0, 1):
                if 0 <= x + d < positions:
                    edges.add((t * positions + x, (t + 1) * positions + x + d))
    return CausalGraph(tuple(labels), frozenset(edges), tuple(coords))


class CurveUniverse:
    """All nonempty simple directed paths of a graph, lexicographically ordered.

    Singleton paths count as curves: they are the discrete stand-in for the
    arbitrarily short curve through a point, which the representability
    arguments lean on.
    """

    def __init__(self, graph: CausalGraph, curves: Iterable[tuple[int, ...]]):
        self.graph = graph
        self.curves = tuple(curves)
        self.index = {c: i for i, c in enumerate(self.curves)}
        self.width = len(self.curves)
        self.full_mask = (1 << self.width) - 1
        # event mask per curve, and curve mask per event
        self.event_masks = tuple(self._event_mask(c) for c in self.curves)
        visit = [0] * graph.n_events
        for i, c in enumerate(self.curves):
            for e in c:
                visit[e] |= 1 << i
        self.visit_masks = tuple(visit)
        self._through_cache: dict[tuple[int, int], int] = {}

    @staticmethod
    def _event_mask(curve: tuple[int, ...]) -> int:
        m = 0
        for e in curve:
            m |= 1 << e
        return m

    def visits(self, region: int) -> int:
        """Curves that pass through the region at all (= through(region, region))."""
        m = 0
        for e in bits(region):
            m |= self.visit_masks[e]
        return m

    def through(self, a: int, b: int) -> int:
        """Curves passing through region ``a`` and then region ``b``.

        Some visit to b exists, and every visit to b has an earlier-or-equal
        visit to a (equal indices allowed, so a visit inside a & b witnesses
        itself).
        """
        key = (a, b)
        cached = self._through_cache.get(key)
        if cached is not None:
            return cached
        result = 0
        for i, curve in enumerate(self.curves):
            em = self.event_masks[i]
            if not em & b or not em & a:
                continue
            seen_a = False
            ok = False
            for e in curve:
                bit = 1 << e
                if a & bit:
                    seen_a = True
                if b & bit:
                    if not seen_a:
                        ok = False
                        break
                    ok = True
            if ok:
                result |= 1 << i
        self._through_cache[key] = result
        return result

    def curve_str(self, i: int) -> str:
        return "[" + ",".join(self.graph.labels[e] for e in self.curves[i]) + "]"

    def set_str(self, mask: int) -> str:
        return "{" + ",".join(self.curve_str(i) for i in bits(mask)) + "}"

    def set_of(self, paths: Iterable[Iterable[str]]) -> int:
        """Curve mask from label paths; unknown paths raise KeyError."""
        mask = 0
        idx = self.graph.label_index
        for p in paths:
            path = tuple(idx[lab] for lab in p)
            mask |= 1 << self.index[path]
        return mask


def enumerate_curves(graph: CausalGraph,
                     cap: int = DEFAULT_CURVE_CAP) -> CurveUniverse:
    """Enumerate every simple directed path, shortest prefixes first.

    Depth-first extension with sorted successors emits paths in lexicographic
    order over event-index sequences, which is the canonical curve order.
    """
    curves: list[tuple[int, ...]] = []
    succ = graph.successors

    def extend(path: list[int], visited: int) -> None:
        curves.append(tuple(path))
        if len(curves) > cap:
            raise CapExceeded("curve universe", cap, len(curves))
        for nxt in succ[path[-1]]:
            if not visited >> nxt & 1:
                path.append(nxt)
                extend(path, visited | 1 << nxt)
                path.pop()

    for start in range(graph.n_events):
        extend([start], 1 << start)
    return CurveUniverse(graph, curves)


# ---------------------------------------------------------------------------
# Site files
#
# Line-oriented UTF-8, '#' starts a comment, blank lines ignored:
#   event <label> [t=<int> x=<int>]
#   edge <src-label> <dst-label>
#   slice <name> = <label> <label> ...      (empty right-hand side allowed)
# ---------------------------------------------------------------------------

def parse_spacetime(text: str) -> tuple[CausalGraph, dict[str, int]]:
    """Parse a site file into a graph plus named regions."""
    labels: list[str] = []
    coords: list[tuple[int, int] | None] = []
    seen: dict[str, int] = {}
    edges: set[tuple[int, int]] = set()
    slices: dict[str, list[str]] = {}

    def resolve(lineno: int, lab: str) -> int:
        if lab not in seen:
            raise ParseError(lineno, f"unknown event id {lab!r}")
        return seen[lab]

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        kind = tokens[0]
        if kind == "event":
            if len(tokens) not in (2, 4):
                raise ParseError(lineno, "expected: event <label> [t=<int> x=<int>]")
            lab = tokens[1]
            if lab in seen:
                raise ParseError(lineno, f"duplicate event label {lab!r}")
            coord = None
            if len(tokens) == 4:
                try:
                    t = int(tokens[2].removeprefix("t="))
                    x = int(tokens[3].removeprefix("x="))
                except ValueError:
                    raise ParseError(lineno, "bad coordinates") from None
                if not (tokens[2].startswith("t=") and tokens[3].startswith("x=")):
                    raise ParseError(lineno, "bad coordinates")
                coord = (t, x)
            seen[lab] = len(labels)
            labels.append(lab)
            coords.append(coord)
        elif kind == "edge":
            if len(tokens) != 3:
                raise ParseError(lineno, "expected: edge <src> <dst>")
            src, dst = resolve(lineno, tokens[1]), resolve(lineno, tokens[2])
            if src == dst:
                raise ParseError(lineno, f"self-edge on {tokens[1]!r} rejected")
            edges.add((src, dst))
        elif kind == "slice":
            if len(tokens) < 3 or tokens[2] != "=":
                raise ParseError(lineno, "expected: slice <name> = <labels...>")
            name = tokens[1]
            if name in slices:
                raise ParseError(lineno, f"duplicate slice name {name!r}")
            for lab in tokens[3:]:
                resolve(lineno, lab)
            slices[name] = tokens[3:]
        else:
            raise ParseError(lineno, f"unknown directive {kind!r}")

    graph = CausalGraph(tuple(labels), frozenset(edges), tuple(coords))
    named = {name: graph.region(labs) for name, labs in slices.items()}
    return graph, named


def format_spacetime(graph: CausalGraph, slices: dict[str, int] | None = None) -> str:
    """Render a graph (and optional named regions) in the site-file format."""
    lines = []
    for i, lab in enumerate(graph.labels):
        coord = graph.coords[i]
        if coord is None:
            lines.append(f"event {lab}")
        else:
            lines.append(f"event {lab} t={coord[0]} x={coord[1]}")
    for src, dst in sorted(graph.edges):
        lines.append(f"edge {graph.labels[src]} {graph.labels[dst]}")
    for name in sorted(slices or {}):
        labs = " ".join(graph.region_labels(slices[name]))
        lines.append(f"slice {name} = {labs}".rstrip())
    return "\n".join(lines) + "\n"
