"""Exact evaluation and verification of solutions of the Matkowski-Wesolowski equation."""
from .numerics import DomainError, DyadicPoint, Enclosure, ModeError, MWError, ResourceError
from .ifs import ProbabilityVector
from .solutions import Averaged, Convex, DeRham, Integral, MeasureSpec, Series, eval_solution, eval_solution_enclosed
from .expr import ParseError, format_expr, parse_expr

__version__ = "0.1.0"

__all__ = [
    "Averaged", "Convex", "DeRham", "DomainError", "DyadicPoint", "Enclosure", "Integral",
    "MWError", "MeasureSpec", "ModeError", "ParseError", "ProbabilityVector", "ResourceError",
    "Series", "eval_solution", "eval_solution_enclosed", "format_expr", "parse_expr",
]
