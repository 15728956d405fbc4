"""Problem representation, objective/gradient evaluation and geometric predicates.

Points are plain 1-D float64 numpy arrays.  An :class:`Instance` holds the
anchor points and their positive weights; every function here is a pure
function of its arguments.
"""
import math

import numpy as np

from ._backend import kernels
from .errors import AtVertexError, InvalidArgumentError

#: x is "at anchor a_i" when ||x - a_i|| <= SNAP_REL * (1 + ||a_i||)
SNAP_REL = 1e-12

#: default relative residual for :func:`collinear`
COLLINEAR_TOL = 1e-12

# above this many anchors the farthest pair is approximated from axis extremes
_EXACT_PAIR_LIMIT = 1024


def as_point(x, n=None, name="x"):
    """Return ``x`` as a finite 1-D float64 array, checking its dimension."""
    try:
        p = np.array(x, dtype=np.float64).reshape(-1) if np.ndim(x) <= 1 else None
    except (TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"{name} is not a numeric vector: {exc}") from None
    if p is None or p.size == 0:
        raise InvalidArgumentError(f"{name} must be a non-empty 1-D vector")
    if not np.all(np.isfinite(p)):
        raise InvalidArgumentError(f"{name} has non-finite coordinates")
    if n is not None and p.size != n:
        raise InvalidArgumentError(f"{name} has dimension {p.size}, expected {n}")
    return p


class Instance:
    """Anchor points ``a_1..a_m`` in R^n with positive weights.

    Exact duplicate anchors are merged on construction (first occurrence
    keeps its position, weights are summed).  ``source_index[j]`` gives the
    merged index of the ``j``-th input row.

    >>> inst = Instance([[0, 0], [1, 0], [0, 0]])
    >>> inst.m, inst.weights.tolist()
    (2, [2.0, 1.0])
    """

    __slots__ = ("anchors", "weights", "source_index")

    def __init__(self, anchors, weights=None):
        try:
            a = np.array(anchors, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise InvalidArgumentError(f"anchors are not numeric: {exc}") from None
        if a.ndim == 1 and a.size:
            a = a.reshape(1, -1)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise InvalidArgumentError(
                "anchors must be a non-empty (m, n) array of points sharing one dimension")
        if not np.all(np.isfinite(a)):
            raise InvalidArgumentError("anchors have non-finite coordinates")
        if weights is None:
            w = np.ones(a.shape[0])
        else:
            w = np.array(weights, dtype=np.float64).reshape(-1)
            if w.size != a.shape[0]:
                raise InvalidArgumentError(
                    f"got {w.size} weights for {a.shape[0]} anchors")
            if not np.all(np.isfinite(w)) or np.any(w <= 0):
                raise InvalidArgumentError("weights must be finite and strictly positive")

        uniq, first, inverse = np.unique(a, axis=0, return_index=True, return_inverse=True)
        inverse = inverse.reshape(-1)
        if len(uniq) < len(a):
            order = np.argsort(first)          # keep first-occurrence order
            rank = np.empty_like(order)
            rank[order] = np.arange(len(order))
            source = rank[inverse]
            a = np.ascontiguousarray(a[np.sort(first)])
            merged = np.zeros(len(a))
            for j, s in enumerate(source):     # index order keeps sums reproducible
                merged[s] += w[j]
            w = merged
        else:
            source = np.arange(len(a))
        a = np.ascontiguousarray(a)
        w = np.ascontiguousarray(w)
        a.setflags(write=False)
        w.setflags(write=False)
        source.setflags(write=False)
        object.__setattr__(self, "anchors", a)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "source_index", source)

    def __setattr__(self, name, value):
        raise AttributeError("Instance is immutable")

    def __repr__(self):
        return f"Instance(m={self.m}, n={self.n}, total_weight={self.total_weight:g})"

    @property
    def m(self):
        return self.anchors.shape[0]

    @property
    def n(self):
        return self.anchors.shape[1]

    @property
    def total_weight(self):
        """Lipschitz constant of the objective."""
        return float(np.add.accumulate(self.weights)[-1])

    @property
    def is_unweighted(self):
        return bool(np.all(self.weights == self.weights[0]))

    def centroid(self):
        """Weighted centroid of the anchors (default Weiszfeld start)."""
        return np.add.accumulate(self.weights[:, None] * self.anchors)[-1] / self.total_weight

    def spread(self):
        """Diagonal length of the anchors' bounding box."""
        ext = self.anchors.max(axis=0) - self.anchors.min(axis=0)
        return float(math.sqrt(float(ext @ ext)))

    def transformed(self, fn):
        """New instance with ``fn`` applied to the anchor array, same weights."""
        return Instance(fn(np.array(self.anchors)), self.weights)


def vertex_index(inst, x):
    """Index of the anchor that ``x`` snaps to, or ``None``."""
    x = as_point(x, inst.n)
    k = kernels.snap_index(inst.anchors, x, SNAP_REL)
    return None if k < 0 else int(k)


def objective(inst, x):
    """Weighted sum of distances ``sum_i w_i ||x - a_i||``, accumulated in index order."""
    return kernels.objective(inst.anchors, inst.weights, as_point(x, inst.n))


def objective_decrease(inst, x, y):
    """``objective(x) - objective(y)`` without the cancellation of subtracting two sums.

    Uses ``|x-a| - |y-a| = (x-y).(x+y-2a) / (|x-a| + |y-a|)`` per anchor, so the
    result keeps relative accuracy even when ``x`` and ``y`` are a few ulps
    apart and both objective values round to the same double.  ``x`` and ``y``
    may also be ``(k, n)`` stacks of points, giving ``k`` differences.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.shape[-1] != inst.n or x.ndim > 2:
        raise InvalidArgumentError(f"x and y must both have shape (n,) or (k, n) with n={inst.n}")
    xs, ys = np.atleast_2d(x), np.atleast_2d(y)
    a = inst.anchors
    dx = np.linalg.norm(xs[:, None, :] - a, axis=2)
    dy = np.linalg.norm(ys[:, None, :] - a, axis=2)
    den = dx + dy
    num = np.einsum("kmn,kn->km", xs[:, None, :] + ys[:, None, :] - 2.0 * a, xs - ys)
    terms = np.divide(num, den, out=np.zeros_like(den), where=den > 0)
    out = np.add.accumulate(inst.weights * terms, axis=1)[:, -1]
    return float(out[0]) if x.ndim == 1 else out


def gradient(inst, x):
    """Gradient ``sum_i w_i (x - a_i) / ||x - a_i||``.

    Raises :class:`AtVertexError` when ``x`` snaps to an anchor, where the
    objective has no gradient.
    """
    x = as_point(x, inst.n)
    k = kernels.snap_index(inst.anchors, x, SNAP_REL)
    if k >= 0:
        raise AtVertexError(int(k))
    return kernels.gradient(inst.anchors, inst.weights, x)


def _farthest_pair(a):
    m = len(a)
    if m <= _EXACT_PAIR_LIMIT:
        diff = a[:, None, :] - a[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        i, j = np.unravel_index(np.argmax(d2), d2.shape)
        return int(i), int(j)
    cand = np.unique(np.concatenate([a.argmin(axis=0), a.argmax(axis=0)]))
    best = (0, 0, -1.0)
    for i in cand:
        d2 = np.einsum("ij,ij->i", a - a[i], a - a[i])
        j = int(np.argmax(d2))
        if d2[j] > best[2]:
            best = (int(i), j, float(d2[j]))
    return best[0], best[1]


def line_fit(inst):
    """Base point, unit direction and spread of the line through the farthest anchor pair.

    Returns ``(base, direction, spread)``; ``direction`` is ``None`` when all
    anchors coincide.
    """
    a = inst.anchors
    i, j = _farthest_pair(a)
    d = a[j] - a[i]
    spread = float(math.sqrt(float(d @ d)))
    if spread == 0.0:
        return a[i].copy(), None, 0.0
    return a[i].copy(), d / spread, spread


def collinear(inst, tol=COLLINEAR_TOL):
    """True iff every anchor lies within ``tol * spread`` of one line.

    The line passes through the two farthest-apart anchors; the residual is
    the largest perpendicular distance of any anchor from it.
    """
    if tol < 0:
        raise InvalidArgumentError("tol must be nonnegative")
    if inst.m <= 2:
        return True
    base, direction, spread = line_fit(inst)
    if direction is None:
        return True
    rel = inst.anchors - base
    perp = rel - np.outer(rel @ direction, direction)
    residual = float(np.sqrt(np.einsum("ij,ij->i", perp, perp).max()))
    return residual <= tol * spread


def in_hull_combination(inst, coeffs):
    """Convex combination ``sum_i c_i a_i`` of the anchors."""
    c = np.array(coeffs, dtype=np.float64).reshape(-1)
    if c.size != inst.m:
        raise InvalidArgumentError(f"need {inst.m} coefficients, got {c.size}")
    if not np.all(np.isfinite(c)) or np.any(c < 0):
        raise InvalidArgumentError("coefficients must be finite and nonnegative")
    if abs(math.fsum(c) - 1.0) > 1e-12:
        raise InvalidArgumentError("coefficients must sum to 1")
    return np.add.accumulate(c[:, None] * inst.anchors)[-1]
