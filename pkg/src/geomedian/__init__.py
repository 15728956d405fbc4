"""Solvers and certificates for the weighted geometric median (Fermat-Torricelli) problem."""
from ._backend import BACKEND
from .core import Instance, collinear, gradient, in_hull_combination, objective
from .errors import (AtVertexError, GeoMedianError, InvalidArgumentError,
                     NumericDegeneracyError, UnsupportedError)
from .exact3 import solve_exact3
from .subdiff import certify, resultant, three_point_conditions
from .weiszfeld import SolverConfig, Solution, f_step, solve

__all__ = [
    "BACKEND", "Instance", "objective", "gradient", "collinear", "in_hull_combination",
    "certify", "resultant", "three_point_conditions", "solve_exact3",
    "SolverConfig", "Solution", "f_step", "solve",
    "GeoMedianError", "InvalidArgumentError", "AtVertexError", "UnsupportedError",
    "NumericDegeneracyError",
]
