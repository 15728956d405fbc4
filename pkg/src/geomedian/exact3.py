"""Closed-form solver for three unweighted points in the plane.

If the triangle has an angle of at least 120 degrees the vertex carrying it
is the minimizer.  Otherwise the minimizer is the Torricelli point, found by
erecting outward equilateral triangles ABD and ACE and intersecting lines
DC and BE.  Collinear triples are solved by their middle point.
"""
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from . import core
from .errors import InvalidArgumentError, NumericDegeneracyError
from .subdiff import ANGLE_TOL

Kind = Literal["vertex", "interior", "collinear"]

_SIN60 = np.sqrt(3.0) / 2.0


@dataclass(frozen=True)
class TriangleCase:
    kind: Kind
    point: np.ndarray
    vertex_index: Optional[int] = None


def _triple(a1, a2, a3):
    pts = [core.as_point(p, name=f"a{i + 1}") for i, p in enumerate((a1, a2, a3))]
    if any(p.size != 2 for p in pts):
        raise InvalidArgumentError("the three-point solver works in the plane only (n=2)")
    return np.array(pts)


def _cross(u, v):
    return u[0] * v[1] - u[1] * v[0]


def vertex_cosines(a1, a2, a3):
    """Cosine of the interior angle at each vertex."""
    p = _triple(a1, a2, a3)
    out = []
    for k in range(3):
        u = p[(k + 1) % 3] - p[k]
        v = p[(k + 2) % 3] - p[k]
        out.append(float(u @ v / (np.linalg.norm(u) * np.linalg.norm(v))))
    return out


def classify(a1, a2, a3, angle_tol=ANGLE_TOL):
    """Return ``(kind, vertex_index)`` for the triangle ``a1 a2 a3``.

    An angle whose cosine is within ``angle_tol`` of -1/2 counts as 120
    degrees and routes to the vertex case.
    """
    p = _triple(a1, a2, a3)
    if core.collinear(core.Instance(p)):
        return "collinear", None
    cos = vertex_cosines(*p)
    k = int(np.argmin(cos))
    if cos[k] <= -0.5 + angle_tol:
        return "vertex", k
    return "interior", None


def _outward_apex(a, b, away_from):
    """Apex of the equilateral triangle on segment ab, on the side opposite ``away_from``."""
    mid = 0.5 * (a + b)
    e = b - a
    normal = np.array([-e[1], e[0]]) * _SIN60
    if _cross(e, away_from - a) > 0:
        normal = -normal
    return mid + normal


def torricelli_point(a1, a2, a3):
    """Intersection of DC and BE for outward equilateral apexes D (on AB) and E (on AC)."""
    A, B, C = _triple(a1, a2, a3)
    scale = max(np.linalg.norm(B - A), np.linalg.norm(C - A), np.linalg.norm(C - B))
    if abs(_cross(B - A, C - A)) <= 1e-14 * scale * scale:
        # no outward side to erect the apexes on
        raise NumericDegeneracyError("triangle is degenerate (collinear or coincident points)")
    D = _outward_apex(A, B, C)
    E = _outward_apex(A, C, B)
    # D + t (C - D) = B + s (E - B)
    u = C - D
    v = E - B
    rhs = B - D
    det = _cross(u, -v)
    if abs(det) < 1e-14 * scale * scale:
        raise NumericDegeneracyError(
            f"lines DC and BE are nearly parallel (det={det:.3g}); triangle too flat")
    t = _cross(rhs, -v) / det
    return D + t * u


def solve_exact3(a1, a2, a3, angle_tol=ANGLE_TOL):
    """Exact minimizer of the unweighted three-point problem in the plane."""
    p = _triple(a1, a2, a3)
    kind, k = classify(*p, angle_tol=angle_tol)
    if kind == "collinear":
        base, direction, _ = core.line_fit(core.Instance(p))
        mid = int(np.argsort((p - base) @ direction, kind="stable")[1])
        return TriangleCase("collinear", p[mid].copy(), mid)
    if kind == "vertex":
        return TriangleCase("vertex", p[k].copy(), k)
    return TriangleCase("interior", torricelli_point(*p))
