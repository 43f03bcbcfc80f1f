"""Machine checks for categories of causal-curve slices over finite sites."""

from .spacetime import (
    CapExceeded,
    CausalGraph,
    CurveUniverse,
    ParseError,
    enumerate_curves,
    format_spacetime,
    minkowski_lattice,
    parse_spacetime,
)
from .category import CategoryView, LawReport, Morphism
from .tensors import (
    IntersectNat,
    Presheaf,
    Witness,
    interchange_witness,
    ltimes,
    partial_tensor,
    representability,
    rtimes,
    unit_presheaf,
    vee,
    wedge,
    yoneda,
)
from .coend import CoendBudget, IsoReport, QuotientSet

__version__ = "0.1.0"
