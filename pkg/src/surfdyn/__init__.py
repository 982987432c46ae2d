"""Exact dynamical invariants of rational self-maps of P2 and P1 x P1."""

from .dynamics import FiberCountConfig, analyze, degree_sequence, dynamical_degree, topological_degree
from .errors import (
    DegenerateCompositionError,
    GenericityError,
    InputError,
    ParseError,
    PreconditionError,
    ResourceError,
    SurfDynError,
    UnsupportedConeError,
)
from .mapio import AnalysisReport, MapFile, load_map, parse_expression
from .polycore import SparsePoly
from .ratmap import RationalSelfMap, compose, iterate, pullback_matrix
from .spectral import PullbackMatrix, analyze_matrix
from .surface import NSLattice, P1XP1_LATTICE, P2_LATTICE

__version__ = "0.1.0"
