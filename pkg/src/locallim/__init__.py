"""Random-graph samplers, core/kernel decomposition and local-limit checks."""

__version__ = "0.1.0"

from .errors import (
    BudgetError,
    ConfigError,
    ContractViolation,
    EmptyClassError,
    EmptyTargetError,
    LocalLimError,
    OversizeError,
    ParseError,
    UnsupportedCombination,
)
from .graphcore import Graph, MultiGraph, RootedBall, ball, components, distance, format_graph, is_planar, parse_graph
from .decompose import Decomposition, decompose, structure_stats
from .rng import derive_seed
from .trees import PlaneTree

__all__ = [
    "BudgetError",
    "ConfigError",
    "ContractViolation",
    "Decomposition",
    "EmptyClassError",
    "EmptyTargetError",
    "Graph",
    "LocalLimError",
    "MultiGraph",
    "OversizeError",
    "ParseError",
    "PlaneTree",
    "RootedBall",
    "UnsupportedCombination",
    "ball",
    "components",
    "decompose",
    "derive_seed",
    "distance",
    "format_graph",
    "is_planar",
    "parse_graph",
    "structure_stats",
]
