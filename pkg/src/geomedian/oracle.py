"""Brute-force verification tools.

Deliberately independent of the solver code paths: the objective is
re-implemented here with plain numpy broadcasting and nothing is imported
from the kernels, :mod:`geomedian.core` evaluation or the solvers.  Only the
:class:`~geomedian.core.Instance` container is shared.
"""
from dataclasses import dataclass

import numpy as np

from .errors import AtVertexError, InvalidArgumentError, UnsupportedError

MAX_DIM = 3


@dataclass(frozen=True)
class GridResult:
    best_point: np.ndarray
    best_value: float
    resolution: float
    cells_evaluated: int
    history: tuple = ()

    def coverage_bound(self, total_weight):
        """Largest possible excess of ``best_value`` over the true optimum."""
        return total_weight * self.resolution * np.sqrt(len(self.best_point))


def phi_many(anchors, weights, points):
    """Weighted distance sums for each row of ``points``."""
    pts = np.atleast_2d(points)
    d = np.sqrt(((pts[:, None, :] - anchors[None, :, :]) ** 2).sum(axis=2))
    return d @ weights


def _phi_and_slope(anchors, weights, points):
    """Objective values and gradient norms; the slope is ``sum(w)`` at anchors."""
    diff = points[:, None, :] - anchors[None, :, :]
    d = np.sqrt((diff ** 2).sum(axis=2))
    vals = d @ weights
    at_anchor = (d == 0).any(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.einsum("pm,pmn->pn", np.where(d > 0, weights / d, 0.0), diff)
    slope = np.where(at_anchor, weights.sum(), np.sqrt((g ** 2).sum(axis=1)))
    return vals, slope


def _best(points, values):
    # lowest value, ties broken by lexicographic coordinates
    keys = [points[:, j] for j in reversed(range(points.shape[1]))] + [values]
    i = np.lexsort(keys)[0]
    return points[i], float(values[i])


def grid_minimize(inst, levels=6, initial_divisions=48):
    """Multiresolution grid search over the anchors' bounding box.

    Each level evaluates ``(divisions + 1)^n`` nodes on the current box.  The
    next box is the bounding box of every node ``p`` that could still lie on
    the cell holding the minimizer, i.e. ``phi(p) - |grad phi(p)| * diag <= best``
    (convexity gives ``phi* >= phi(p) - |g_p| |x* - p|``), widened to at least
    three cells around the incumbent.  The corners of the minimizer's cell
    always pass, so refinement cannot lose the minimizer.  The incumbent is
    only replaced by a strictly better node; values never increase.
    """
    a, w = np.asarray(inst.anchors), np.asarray(inst.weights)
    n = a.shape[1]
    if n > MAX_DIM:
        raise UnsupportedError(f"grid oracle is limited to n <= {MAX_DIM}, got n={n}")
    if levels < 1 or initial_divisions < 1:
        raise InvalidArgumentError("levels and initial_divisions must be positive")
    full_lo, full_hi = a.min(axis=0), a.max(axis=0)
    lo, hi = full_lo.copy(), full_hi.copy()
    best_x, best_v = None, np.inf
    cells = 0
    history = []
    cell = np.zeros(n)
    for _ in range(levels):
        axes = [np.linspace(lo[j], hi[j], initial_divisions + 1) if hi[j] > lo[j]
                else np.array([lo[j]]) for j in range(n)]
        nodes = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
        vals, slope = _phi_and_slope(a, w, nodes)
        cells += len(nodes)
        x, v = _best(nodes, vals)
        if v < best_v:
            best_x, best_v = x.copy(), v
        history.append(best_v)
        cell = (hi - lo) / initial_divisions
        band = nodes[vals - slope * float(np.linalg.norm(cell)) <= best_v]
        lo = np.maximum(np.minimum(band.min(axis=0), best_x - 1.5 * cell), full_lo)
        hi = np.minimum(np.maximum(band.max(axis=0), best_x + 1.5 * cell), full_hi)
    return GridResult(best_x, best_v, float(cell.max()), cells, tuple(history))


def vertex_verdict(inst, k, grid):
    """Oracle opinion on whether anchor ``k`` is a global minimizer.

    ``False`` needs a witness: a grid node beating the anchor by more than
    floating point noise.  ``True`` needs the anchor to be within the grid's
    coverage bound of the best node.  ``None`` means neither holds.
    """
    at_vertex = float(phi_many(inst.anchors, inst.weights, inst.anchors[k])[0])
    if grid.best_value < at_vertex - 1e-12 * (1.0 + at_vertex):
        return False
    if at_vertex <= grid.best_value + grid.coverage_bound(float(np.sum(inst.weights))):
        return True
    return None


def fd_gradient(inst, x, h=1e-6):
    """Central-difference gradient of the objective at ``x``."""
    a, w = np.asarray(inst.anchors), np.asarray(inst.weights)
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (a.shape[1],):
        raise InvalidArgumentError(f"x must have shape ({a.shape[1]},)")
    d = np.sqrt(((a - x) ** 2).sum(axis=1))
    if d.min() <= 10 * h:
        raise AtVertexError(int(np.argmin(d)), "x is within 10*h of an anchor")
    eye = np.eye(len(x)) * h
    return (phi_many(a, w, x + eye) - phi_many(a, w, x - eye)) / (2 * h)


def brute_median_1d(anchors, weights):
    """Best anchor of a collinear instance by direct evaluation at every anchor."""
    a, w = np.asarray(anchors, dtype=np.float64), np.asarray(weights, dtype=np.float64)
    vals = phi_many(a, w, a)
    return a[int(np.argmin(vals))], float(vals.min())
