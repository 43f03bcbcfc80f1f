"""Shared site fixtures: the fixed generator list used across the suites."""

from __future__ import annotations

import pytest

from slicecat.category import CategoryView
from slicecat.spacetime import (
    enumerate_curves,
    format_spacetime,
    minkowski_lattice,
    parse_spacetime,
)

CHAIN2 = "event a\nevent b\nedge a b\n"
CHAIN3 = "event a\nevent b\nevent c\nedge a b\nedge b c\n"
CHAIN4 = ("event a\nevent b\nevent c\nevent d\n"
          "edge a b\nedge b c\nedge c d\n")
TRI = "event a\nevent b\nevent c\nedge a b\nedge b c\nedge c a\n"
TWO_CYCLE = "event a\nevent b\nedge a b\nedge b a\n"
DIAMOND = ("event a\nevent b\nevent c\nevent d\n"
           "edge a b\nedge a c\nedge b d\nedge c d\n")
EDGELESS1 = "event a\n"
EDGELESS2 = "event a\nevent b\n"
EDGELESS3 = "event a\nevent b\nevent c\n"
ML22 = format_spacetime(minkowski_lattice(2, 2))
ML23 = format_spacetime(minkowski_lattice(2, 3))

# every graph here has at most 8 events; the dichotomy and unit
# representability sweeps run over all of them
GENERATOR_LIST = {
    "chain2": CHAIN2,
    "chain3": CHAIN3,
    "chain4": CHAIN4,
    "tri": TRI,
    "two_cycle": TWO_CYCLE,
    "diamond": DIAMOND,
    "edgeless1": EDGELESS1,
    "edgeless2": EDGELESS2,
    "edgeless3": EDGELESS3,
    "ml22": ML22,
    "ml23": ML23,
}

_CACHE: dict[str, tuple] = {}


def build(text: str):
    """(graph, named slices, universe, complete slice view) for a site file."""
    if text not in _CACHE:
        graph, named = parse_spacetime(text)
        universe = enumerate_curves(graph)
        view = CategoryView.slice_view(graph, universe)
        _CACHE[text] = (graph, named, universe, view)
    return _CACHE[text]


@pytest.fixture
def chain2():
    return build(CHAIN2)


@pytest.fixture
def chain4():
    return build(CHAIN4)


@pytest.fixture
def tri():
    return build(TRI)


@pytest.fixture
def ml23():
    return build(ML23)


@pytest.fixture
def edgeless3():
    return build(EDGELESS3)
