"""Optimality certificates built from subgradients of the distance sum.

At a point x away from every anchor the objective is differentiable and x is
optimal iff the gradient vanishes.  At an anchor a_k the subdifferential is
``-R_k + w_k * B`` where ``R_k`` is the weighted sum of unit vectors from a_k
toward the other anchors and ``B`` the closed unit ball, so a_k is optimal
iff ``||R_k|| <= w_k``.
"""
from dataclasses import dataclass
from typing import Literal, Tuple

import numpy as np

from . import core
from ._backend import kernels
from .errors import InvalidArgumentError, UnsupportedError

CERT_TOL = 1e-8
ANGLE_TOL = 1e-7


@dataclass(frozen=True)
class VertexReport:
    index: int
    resultant: np.ndarray
    resultant_norm: float
    optimal: bool


@dataclass(frozen=True)
class Certificate:
    """Optimality evidence at ``location``; ``residual <= tol`` certifies a minimum."""

    kind: Literal["interior", "vertex"]
    residual: float
    location: np.ndarray
    index: int = -1


@dataclass(frozen=True)
class ThreePointReport:
    case: Literal["interior", "vertex"]
    satisfied: bool
    cosines: Tuple[float, ...]
    index: int = -1


def resultant(inst, k, cert_tol=CERT_TOL):
    """Weighted resultant ``R_k`` at anchor ``k`` and the vertex optimality verdict."""
    if not isinstance(k, (int, np.integer)) or not 0 <= k < inst.m:
        raise InvalidArgumentError(f"anchor index {k!r} out of range for m={inst.m}")
    r = kernels.resultant(inst.anchors, inst.weights, int(k))
    norm = float(np.sqrt(r @ r))
    return VertexReport(int(k), r, norm, bool(norm <= inst.weights[k] + cert_tol))


def vertex_residual(inst, k):
    """``max(0, ||R_k|| - w_k)``: distance of 0 from the subdifferential at a_k."""
    rep = resultant(inst, k)
    return max(0.0, rep.resultant_norm - float(inst.weights[k]))


def certify(inst, x, cert_tol=CERT_TOL):
    if cert_tol <= 0:
        raise InvalidArgumentError("cert_tol must be positive")
    x = core.as_point(x, inst.n)
    k = core.vertex_index(inst, x)
    if k is not None:
        return Certificate("vertex", vertex_residual(inst, k), inst.anchors[k].copy(), k)
    g = kernels.gradient(inst.anchors, inst.weights, x)
    return Certificate("interior", float(np.sqrt(g @ g)), x)


def unit_directions(inst, x):
    """Unit vectors ``(x - a_i)/||x - a_i||`` pointing from each anchor toward ``x``."""
    diff = core.as_point(x, inst.n) - inst.anchors
    return diff / np.linalg.norm(diff, axis=1)[:, None]


def _cos(u, v):
    return float(u @ v / (np.linalg.norm(u) * np.linalg.norm(v)))


def three_point_conditions(inst, x, angle_tol=ANGLE_TOL):
    """Angle test for the unweighted three-anchor problem.

    Away from the anchors, x is optimal iff every pair of the unit vectors
    toward x makes cosine -1/2 (all angles 120 degrees).  At anchor a_k it is
    optimal iff the unit vectors from the other two anchors toward a_k have
    cosine at most -1/2.
    """
    if inst.m != 3:
        raise InvalidArgumentError(f"three-point test needs m=3, got m={inst.m}")
    if not inst.is_unweighted:
        raise UnsupportedError("three-point angle conditions are only defined for equal weights")
    x = core.as_point(x, inst.n)
    k = core.vertex_index(inst, x)
    if k is None:
        v = unit_directions(inst, x)
        cos = (_cos(v[0], v[1]), _cos(v[1], v[2]), _cos(v[2], v[0]))
        ok = all(abs(c + 0.5) <= angle_tol for c in cos)
        return ThreePointReport("interior", ok, cos)
    i, j = (t for t in range(3) if t != k)
    a = inst.anchors
    c = _cos(a[k] - a[i], a[k] - a[j])
    return ThreePointReport("vertex", c <= -0.5 + angle_tol, (c,), k)
