# cython: language_level=3
"""Compiled kernels; drop-in replacement for ``_pykernels``.

Loops accumulate in anchor index order, matching the numpy fallback.
"""
import numpy as np

from libc.math cimport sqrt, NAN

NAME = "cython"

CONVERGED = 0
VERTEX_OPTIMAL = 1
VERTEX_HIT = 2
MAX_ITER = 3


cdef inline double _dist(const double[:, ::1] a, Py_ssize_t i, const double[::1] x) noexcept nogil:
    cdef Py_ssize_t j
    cdef double s = 0.0, t
    for j in range(a.shape[1]):
        t = x[j] - a[i, j]
        s += t * t
    return sqrt(s)


cdef inline double _norm(const double[::1] v) noexcept nogil:
    cdef Py_ssize_t j
    cdef double s = 0.0
    for j in range(v.shape[0]):
        s += v[j] * v[j]
    return sqrt(s)


def objective(const double[:, ::1] anchors, const double[::1] weights, const double[::1] x):
    cdef Py_ssize_t i
    cdef double total = 0.0
    with nogil:
        for i in range(anchors.shape[0]):
            total += weights[i] * _dist(anchors, i, x)
    return total


def gradient(const double[:, ::1] anchors, const double[::1] weights, const double[::1] x):
    cdef Py_ssize_t i, j, n = anchors.shape[1]
    cdef double c
    out = np.zeros(n)
    cdef double[::1] g = out
    with nogil:
        for i in range(anchors.shape[0]):
            c = weights[i] / _dist(anchors, i, x)
            for j in range(n):
                g[j] += c * (x[j] - anchors[i, j])
    return out


def f_step(const double[:, ::1] anchors, const double[::1] weights, const double[::1] x):
    cdef Py_ssize_t i, j, n = anchors.shape[1]
    cdef double c, total = 0.0
    out = np.zeros(n)
    cdef double[::1] y = out
    with nogil:
        for i in range(anchors.shape[0]):
            c = weights[i] / _dist(anchors, i, x)
            total += c
            for j in range(n):
                y[j] += c * anchors[i, j]
        for j in range(n):
            y[j] = y[j] / total
    return out


def resultant(const double[:, ::1] anchors, const double[::1] weights, Py_ssize_t k):
    out = np.zeros(anchors.shape[1])
    cdef double[::1] r = out
    with nogil:
        _resultant(anchors, weights, k, r)
    return out


cdef void _resultant(const double[:, ::1] a, const double[::1] w, Py_ssize_t k,
                     double[::1] r) noexcept nogil:
    cdef Py_ssize_t i, j, n = a.shape[1]
    cdef double s, t, c
    for j in range(n):
        r[j] = 0.0
    for i in range(a.shape[0]):
        if i == k:
            continue
        s = 0.0
        for j in range(n):
            t = a[i, j] - a[k, j]
            s += t * t
        c = w[i] / sqrt(s)
        for j in range(n):
            r[j] += c * (a[i, j] - a[k, j])


cdef double[::1] _row_norms(const double[:, ::1] a):
    cdef Py_ssize_t i, j
    cdef double s
    out = np.empty(a.shape[0])
    cdef double[::1] norms = out
    for i in range(a.shape[0]):
        s = 0.0
        for j in range(a.shape[1]):
            s += a[i, j] * a[i, j]
        norms[i] = sqrt(s)
    return norms


def snap_index(const double[:, ::1] anchors, const double[::1] x, double snap_rel):
    cdef double[::1] norms = _row_norms(anchors)
    cdef Py_ssize_t i, best = -1
    cdef double d, best_d = 0.0
    for i in range(anchors.shape[0]):
        d = _dist(anchors, i, x)
        if d <= snap_rel * (1.0 + norms[i]) and (best < 0 or d < best_d):
            best = i
            best_d = d
    return best


def weiszfeld(const double[:, ::1] anchors, const double[::1] weights, x0,
              long max_iter, double step_tol, double cert_tol, double snap_rel,
              bint record):
    """Same contract as ``_pykernels.weiszfeld``."""
    cdef Py_ssize_t m = anchors.shape[0], n = anchors.shape[1]
    cdef Py_ssize_t i, j, hit, imax
    cdef long k = 0
    cdef double phi, total, residual, step, prev_step = 0.0, xnorm, c, cmax, t, s, vres
    cdef double[::1] norms = _row_norms(anchors)
    cdef double[::1] d = np.empty(m)
    cdef double[::1] coef = np.empty(m)
    cdef double[::1] g = np.empty(n)
    cdef double[::1] y = np.empty(n)
    cdef double[::1] r = np.empty(n)
    x_arr = np.array(x0, dtype=np.float64)
    cdef double[::1] x = x_arr
    xs, phis, steps = [], [], []

    while True:
        phi = 0.0
        hit = -1
        for i in range(m):
            d[i] = _dist(anchors, i, x)
            phi += weights[i] * d[i]
            if d[i] <= snap_rel * (1.0 + norms[i]) and (hit < 0 or d[i] < d[hit]):
                hit = i
        if record:
            xs.append(x_arr.copy())
            phis.append(phi)
            steps.append(prev_step)
        if hit >= 0:
            return _pack(np.array(anchors[hit]), k, VERTEX_HIT, hit, NAN, record, xs, phis, steps)

        total = 0.0
        imax = 0
        cmax = -1.0
        for j in range(n):
            g[j] = 0.0
            y[j] = 0.0
        for i in range(m):
            c = weights[i] / d[i]
            coef[i] = c
            total += c
            if c > cmax:
                cmax = c
                imax = i
            for j in range(n):
                g[j] += c * (x[j] - anchors[i, j])
                y[j] += c * anchors[i, j]
        s = 0.0
        xnorm = 0.0
        for j in range(n):
            y[j] = y[j] / total
            t = y[j] - x[j]
            s += t * t
            xnorm += x[j] * x[j]
        step = sqrt(s)
        residual = _norm(g)
        if residual <= cert_tol and step <= step_tol * (1.0 + sqrt(xnorm)):
            return _pack(x_arr, k, CONVERGED, -1, residual, record, xs, phis, steps)

        if step <= step_tol * (1.0 + sqrt(xnorm)) or cmax >= 0.5 * total:
            _resultant(anchors, weights, imax, r)
            vres = _norm(r) - weights[imax]
            if vres < 0.0:
                vres = 0.0
            if vres <= cert_tol:
                return _pack(np.array(anchors[imax]), k, VERTEX_OPTIMAL, imax, vres,
                             record, xs, phis, steps)

        if k >= max_iter:
            return _pack(x_arr, k, MAX_ITER, -1, residual, record, xs, phis, steps)
        for j in range(n):
            x[j] = y[j]
        prev_step = step
        k += 1


def _pack(x, k, code, index, residual, record, xs, phis, steps):
    if not record:
        return x, k, code, index, residual, None, None, None
    return (x, k, code, index, residual,
            np.array(xs), np.array(phis), np.array(steps))
