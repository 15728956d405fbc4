"""Weiszfeld fixed-point iteration for the weighted geometric median.

The map ``F(x) = sum_i c_i a_i`` with ``c_i = (w_i/||x-a_i||) / sum_j (w_j/||x-a_j||)``
is a convex combination of the anchors; ``F(a_k) = a_k`` by convention.
Iterating it from a non-anchor start decreases the objective at every
step and converges to the minimizer unless an iterate lands on an anchor.
:func:`solve` detects that capture, tests the anchor's optimality and
escapes along the resultant when it is not optimal.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Literal, Optional

import numpy as np

from . import core, subdiff
from ._backend import kernels
from .errors import AtVertexError, InvalidArgumentError

log = logging.getLogger(__name__)

EscapePolicy = Literal["nudge", "certify-and-stop"]
Status = Literal["converged", "max-iter", "collinear-degenerate"]


@dataclass(frozen=True)
class SolverConfig:
    step_tol: float = 1e-10
    cert_tol: float = subdiff.CERT_TOL
    max_iter: int = 100_000
    escape_policy: EscapePolicy = "nudge"
    # None means 1e-3 times the anchors' bounding-box diagonal
    nudge_scale: Optional[float] = None
    collinear_tol: float = core.COLLINEAR_TOL

    def __post_init__(self):
        if not (self.step_tol > 0 and self.cert_tol > 0):
            raise InvalidArgumentError("step_tol and cert_tol must be positive")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise InvalidArgumentError("max_iter must be a positive integer")
        if self.escape_policy not in ("nudge", "certify-and-stop"):
            raise InvalidArgumentError(f"unknown escape policy {self.escape_policy!r}")
        if self.nudge_scale is not None and not self.nudge_scale > 0:
            raise InvalidArgumentError("nudge_scale must be positive")
        if self.collinear_tol < 0:
            raise InvalidArgumentError("collinear_tol must be nonnegative")


@dataclass(frozen=True)
class TraceStep:
    k: int
    x: np.ndarray
    phi: float
    step_norm: float
    vertex_hit: Optional[int] = None


@dataclass
class IterationTrace:
    steps: List[TraceStep] = field(default_factory=list)

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def points(self):
        return np.array([s.x for s in self.steps])

    def values(self):
        return np.array([s.phi for s in self.steps])

    def step_norms(self):
        return np.array([s.step_norm for s in self.steps])


@dataclass(frozen=True)
class Solution:
    point: np.ndarray
    value: float
    certificate: subdiff.Certificate
    iterations: int
    status: Status
    unique: bool = True
    nudges: int = 0


@dataclass(frozen=True)
class DescentCheck:
    fx: np.ndarray
    moved: bool
    decreased: bool
    delta: float


@dataclass(frozen=True)
class ExpansionReport:
    min_ratio: float
    resultant_norm: float
    limit: float


def f_step(inst, x):
    """One application of the Weiszfeld map; anchors are fixed points."""
    x = core.as_point(x, inst.n)
    k = core.vertex_index(inst, x)
    if k is not None:
        return inst.anchors[k].copy()
    return kernels.f_step(inst.anchors, inst.weights, x)


def step_coefficients(inst, x):
    """Convex-combination coefficients ``c`` with ``f_step(x) == c @ anchors``."""
    x = core.as_point(x, inst.n)
    k = core.vertex_index(inst, x)
    if k is not None:
        c = np.zeros(inst.m)
        c[k] = 1.0
        return c
    c = inst.weights / np.linalg.norm(x - inst.anchors, axis=1)
    return c / c.sum()


def g_surrogate(inst, x, z):
    """``sum_i w_i ||z - a_i||^2 / ||x - a_i||``, minimized over z by ``f_step(x)``.

    Equals the objective at ``z == x``.
    """
    x = core.as_point(x, inst.n)
    z = core.as_point(z, inst.n, "z")
    k = core.vertex_index(inst, x)
    if k is not None:
        raise AtVertexError(k)
    dx = np.linalg.norm(x - inst.anchors, axis=1)
    dz = z - inst.anchors
    terms = inst.weights * np.einsum("ij,ij->i", dz, dz) / dx
    return float(np.add.accumulate(terms)[-1])


def descent_check(inst, x):
    """Compare the objective before and after one map application.

    ``decreased`` is vacuously true when the map does not move ``x`` (beyond
    the vertex snap tolerance); ``delta`` is ``phi(x) - phi(F(x))``.
    """
    x = core.as_point(x, inst.n)
    fx = f_step(inst, x)
    delta = core.objective(inst, x) - core.objective(inst, fx)
    moved = float(np.linalg.norm(fx - x)) > core.SNAP_REL * (1.0 + float(np.linalg.norm(x)))
    return DescentCheck(fx, moved, (delta > 0) if moved else True, delta)


def expansion_ratio(inst, k, radius, samples=64, seed=0):
    """Smallest ``||F(x) - a_k|| / ||x - a_k||`` over points at ``radius`` from a_k.

    For a non-optimal anchor this tends to ``||R_k|| / w_k > 1`` as the radius
    shrinks, i.e. the map pushes iterates away from the anchor.  In the plane
    the samples are equally spaced on the circle; otherwise directions are
    drawn from a seeded Gaussian.
    """
    rep = subdiff.resultant(inst, k, cert_tol=0.0)
    wk = float(inst.weights[k])
    if rep.resultant_norm <= wk:
        raise InvalidArgumentError(
            f"anchor {k} is optimal (||R_k||={rep.resultant_norm:.6g} <= {wk:.6g}); "
            "the expansion ratio is only defined at non-optimal anchors")
    if samples < 1:
        raise InvalidArgumentError("samples must be positive")
    a = inst.anchors
    ak = a[k]
    others = np.delete(np.linalg.norm(a - ak, axis=1), k)
    if others.size and others.min() <= radius:
        raise InvalidArgumentError("another anchor lies inside the sampling ball")
    if radius <= core.SNAP_REL * (1.0 + np.linalg.norm(ak)):
        raise InvalidArgumentError("radius is below the vertex snap tolerance")
    if inst.n == 1:
        dirs = np.array([[1.0], [-1.0]])
    elif inst.n == 2:
        theta = 2 * np.pi * np.arange(samples) / samples
        dirs = np.column_stack([np.cos(theta), np.sin(theta)])
    else:
        dirs = np.random.default_rng(seed).standard_normal((samples, inst.n))
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    ratios = []
    for u in dirs:
        x = ak + radius * u
        fx = kernels.f_step(a, inst.weights, x)
        ratios.append(np.linalg.norm(fx - ak) / np.linalg.norm(x - ak))
    return ExpansionReport(float(min(ratios)), rep.resultant_norm, rep.resultant_norm / wk)


def _solve_collinear(inst):
    """Exact weighted median along the fitted line; the midpoint on ties."""
    base, direction, _ = core.line_fit(inst)
    t = (inst.anchors - base) @ direction
    order = np.argsort(t, kind="stable")
    w = inst.weights[order]
    total = inst.total_weight
    cum = np.add.accumulate(w)
    j = int(np.searchsorted(cum, 0.5 * total - 1e-12 * total))
    if abs(cum[j] - 0.5 * total) <= 1e-12 * total and j + 1 < len(order):
        lo, hi = inst.anchors[order[j]], inst.anchors[order[j + 1]]
        return 0.5 * (lo + hi), False
    return inst.anchors[order[j]].copy(), True


def _row(trace, k, x, inst, step, hit=None):
    trace.steps.append(TraceStep(k, np.array(x, dtype=np.float64), core.objective(inst, x), step, hit))


def solve(inst, x0=None, cfg=None, record=True):
    """Minimize the weighted distance sum.

    Returns ``(Solution, IterationTrace)``.  Collinear instances (including
    every two-anchor instance) are solved exactly by a weighted median along
    the line and reported as ``collinear-degenerate``; everything else runs
    the Weiszfeld iteration from ``x0`` (default: the weighted centroid).
    With ``record=False`` the trace is left empty.
    """
    cfg = cfg or SolverConfig()
    if x0 is not None:
        x0 = core.as_point(x0, inst.n, "x0")
    trace = IterationTrace()

    if inst.m == 1:
        p = inst.anchors[0].copy()
        if record:
            _row(trace, 0, p, inst, 0.0, 0)
        cert = subdiff.certify(inst, p, cfg.cert_tol)
        return Solution(p, core.objective(inst, p), cert, 0, "converged"), trace

    if core.collinear(inst, cfg.collinear_tol):
        p, unique = _solve_collinear(inst)
        if not unique:
            log.info("solution set is a segment; returning its midpoint")
        if record:
            _row(trace, 0, p, inst, 0.0, core.vertex_index(inst, p))
        cert = subdiff.certify(inst, p, cfg.cert_tol)
        return (Solution(p, core.objective(inst, p), cert, 0, "collinear-degenerate", unique),
                trace)

    x = inst.centroid() if x0 is None else x0
    nudge = cfg.nudge_scale if cfg.nudge_scale is not None else 1e-3 * inst.spread()
    done = 0
    nudges = 0
    first_step = 0.0
    while True:
        x, k, code, idx, residual, xs, phis, steps = kernels.weiszfeld(
            inst.anchors, inst.weights, x, cfg.max_iter - done,
            cfg.step_tol, cfg.cert_tol, core.SNAP_REL, record)
        if record:
            steps[0] = first_step
            for r in range(len(phis)):
                hit = idx if (code == kernels.VERTEX_HIT and r == len(phis) - 1) else None
                trace.steps.append(TraceStep(done + r, xs[r], float(phis[r]), float(steps[r]), hit))
        done += k

        if code == kernels.CONVERGED:
            cert = subdiff.certify(inst, x, cfg.cert_tol)
            return Solution(x, core.objective(inst, x), cert, done, "converged", True, nudges), trace
        if code == kernels.MAX_ITER:
            cert = subdiff.certify(inst, x, cfg.cert_tol)
            log.warning("iteration budget exhausted with certificate residual %.3g", cert.residual)
            return Solution(x, core.objective(inst, x), cert, done, "max-iter", True, nudges), trace
        if code == kernels.VERTEX_OPTIMAL:
            done += 1
            if record:
                _row(trace, done, x, inst, float(np.linalg.norm(trace.steps[-1].x - x)), idx)
            cert = subdiff.certify(inst, x, cfg.cert_tol)
            return Solution(x, core.objective(inst, x), cert, done, "converged", True, nudges), trace

        # an iterate landed on anchor idx
        cert = subdiff.certify(inst, x, cfg.cert_tol)
        if cert.residual <= cfg.cert_tol:
            return Solution(x, core.objective(inst, x), cert, done, "converged", True, nudges), trace
        if cfg.escape_policy == "certify-and-stop" or done >= cfg.max_iter:
            log.warning("iterate captured by non-optimal anchor %d (residual %.3g)", idx, cert.residual)
            return Solution(x, core.objective(inst, x), cert, done, "max-iter", True, nudges), trace

        rep = subdiff.resultant(inst, idx)
        direction = rep.resultant / rep.resultant_norm
        phi_vertex = core.objective(inst, x)
        scale = nudge / 2 ** nudges
        for _ in range(64):
            cand = x + scale * direction
            if core.vertex_index(inst, cand) is None and core.objective(inst, cand) < phi_vertex:
                break
            scale *= 0.5
        else:
            log.warning("could not find a descent nudge away from anchor %d", idx)
            return Solution(x, phi_vertex, cert, done, "max-iter", True, nudges), trace
        log.info("escaping non-optimal anchor %d along its resultant (step %.3g)", idx, scale)
        nudges += 1
        done += 1
        first_step = scale
        x = cand


def fixed_point_gap(inst, x):
    """``||F(x) - x||``; zero exactly at fixed points of the map."""
    x = core.as_point(x, inst.n)
    return float(np.linalg.norm(f_step(inst, x) - x))
