"""Pure numpy implementation of the hot kernels.

Every reduction over anchors goes through ``np.add.accumulate`` so the
floating point summation happens strictly in index order, the same order
the compiled kernels use.  That keeps both backends reproducible and
(for the usual compilers) bit-identical.

All functions take ``anchors`` as a C-contiguous ``(m, n)`` float64 array
and ``weights`` as an ``(m,)`` float64 array; validation is done by the
callers in :mod:`geomedian.core`.
"""
import numpy as np

NAME = "python"

# status codes returned by weiszfeld()
CONVERGED = 0
VERTEX_OPTIMAL = 1
VERTEX_HIT = 2
MAX_ITER = 3


def _seqsum(values, axis=0):
    return np.add.accumulate(values, axis=axis)[-1]


def _distances(anchors, x):
    diff = x - anchors
    return diff, np.sqrt(np.add.accumulate(diff * diff, axis=1)[:, -1])


def objective(anchors, weights, x):
    _, d = _distances(anchors, x)
    return float(_seqsum(weights * d))


def gradient(anchors, weights, x):
    diff, d = _distances(anchors, x)
    return _seqsum((weights / d)[:, None] * diff)


def f_step(anchors, weights, x):
    _, d = _distances(anchors, x)
    coef = weights / d
    return _seqsum(coef[:, None] * anchors) / _seqsum(coef)


def resultant(anchors, weights, k):
    diff = anchors - anchors[k]
    d = np.sqrt(np.add.accumulate(diff * diff, axis=1)[:, -1])
    coef = np.zeros_like(d)
    mask = np.arange(len(d)) != k
    coef[mask] = weights[mask] / d[mask]
    return _seqsum(coef[:, None] * diff)


def snap_index(anchors, x, snap_rel):
    _, d = _distances(anchors, x)
    return _snap_from_distances(anchors, d, snap_rel)


def _snap_from_distances(anchors, d, snap_rel):
    norms = np.sqrt(np.add.accumulate(anchors * anchors, axis=1)[:, -1])
    hits = np.flatnonzero(d <= snap_rel * (1.0 + norms))
    if hits.size == 0:
        return -1
    return int(hits[np.argmin(d[hits])])


def weiszfeld(anchors, weights, x0, max_iter, step_tol, cert_tol, snap_rel, record):
    """Run the Weiszfeld loop until a stopping event.

    Returns ``(x, k, code, index, residual, xs, phis, steps)``.  ``k`` is the
    number of map applications performed, ``index`` the anchor involved in a
    vertex event (or -1), ``residual`` the certificate residual at ``x``.
    The trace arrays are ``None`` unless ``record`` is true; row ``i`` holds
    iterate ``i``, its objective value and the length of the step into it.
    """
    x = np.array(x0, dtype=np.float64)
    norms = np.sqrt(np.add.accumulate(anchors * anchors, axis=1)[:, -1])
    xs, phis, steps = [], [], []
    prev_step = 0.0
    k = 0
    while True:
        diff = x - anchors
        d = np.sqrt(np.add.accumulate(diff * diff, axis=1)[:, -1])
        phi = float(_seqsum(weights * d))
        if record:
            xs.append(x.copy())
            phis.append(phi)
            steps.append(prev_step)
        hits = np.flatnonzero(d <= snap_rel * (1.0 + norms))
        if hits.size:
            j = int(hits[np.argmin(d[hits])])
            return _pack(anchors[j].copy(), k, VERTEX_HIT, j, np.nan, record, xs, phis, steps)

        coef = weights / d
        total = float(_seqsum(coef))
        g = _seqsum(coef[:, None] * diff)
        y = _seqsum(coef[:, None] * anchors) / total
        residual = float(np.sqrt(_seqsum(g * g)))
        dy = y - x
        step = float(np.sqrt(_seqsum(dy * dy)))
        small_step = step <= step_tol * (1.0 + float(np.sqrt(_seqsum(x * x))))
        if residual <= cert_tol and small_step:
            return _pack(x, k, CONVERGED, -1, residual, record, xs, phis, steps)

        i = int(np.argmax(coef))
        if small_step or coef[i] >= 0.5 * total:
            r = resultant(anchors, weights, i)
            vres = max(0.0, float(np.sqrt(_seqsum(r * r))) - float(weights[i]))
            if vres <= cert_tol:
                return _pack(anchors[i].copy(), k, VERTEX_OPTIMAL, i, vres, record, xs, phis, steps)

        if k >= max_iter:
            return _pack(x, k, MAX_ITER, -1, residual, record, xs, phis, steps)
        x = y
        prev_step = step
        k += 1


def _pack(x, k, code, index, residual, record, xs, phis, steps):
    if not record:
        return x, k, code, index, residual, None, None, None
    return (x, k, code, index, residual,
            np.array(xs), np.array(phis), np.array(steps))
