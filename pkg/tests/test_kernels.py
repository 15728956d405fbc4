"""The compiled kernels and the numpy fallback must be interchangeable."""
import os
import subprocess
import sys

import numpy as np
import pytest

from geomedian import _backend, _pykernels
from geomedian.core import SNAP_REL

from conftest import _ckernels, kernel_backends, random_instance

pytestmark = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


@pytest.mark.parametrize("seed", range(20))
def test_pointwise_kernels_agree(seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, n=int(rng.integers(1, 5)), weighted=True)
    x = rng.normal(size=inst.n)
    a, w = inst.anchors, inst.weights
    assert _ckernels.objective(a, w, x) == pytest.approx(_pykernels.objective(a, w, x), rel=1e-14)
    np.testing.assert_allclose(_ckernels.gradient(a, w, x), _pykernels.gradient(a, w, x),
                               rtol=1e-13, atol=1e-14)
    np.testing.assert_allclose(_ckernels.f_step(a, w, x), _pykernels.f_step(a, w, x),
                               rtol=1e-13, atol=1e-14)
    k = int(rng.integers(inst.m))
    np.testing.assert_allclose(_ckernels.resultant(a, w, k), _pykernels.resultant(a, w, k),
                               rtol=1e-13, atol=1e-14)


def test_snap_index_agrees(square):
    a = square.anchors
    for x, expected in [([0.0, 0.0], 0), ([1.0, 1.0 + 1e-13], 3), ([0.5, 0.5], -1)]:
        x = np.array(x)
        assert _ckernels.snap_index(a, x, SNAP_REL) == expected
        assert _pykernels.snap_index(a, x, SNAP_REL) == expected


@pytest.mark.parametrize("seed", range(10))
def test_weiszfeld_loop_agrees(seed):
    rng = np.random.default_rng(100 + seed)
    inst = random_instance(rng, weighted=bool(seed % 2))
    x0 = inst.centroid()
    args = (inst.anchors, inst.weights, x0, 10_000, 1e-10, 1e-8, SNAP_REL, True)
    c = _ckernels.weiszfeld(*args)
    p = _pykernels.weiszfeld(*args)
    assert c[1:4] == p[1:4]
    np.testing.assert_allclose(c[0], p[0], rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(c[6], p[6], rtol=1e-12)
    assert c[5].shape == p[5].shape


@pytest.mark.parametrize("kern", kernel_backends())
def test_loop_reports_vertex_hit_at_anchor_start(kern, square):
    x, k, code, idx, *_ = kern.weiszfeld(square.anchors, square.weights, np.array([1.0, 0.0]),
                                         10, 1e-10, 1e-8, SNAP_REL, False)
    assert (code, idx, k) == (kern.VERTEX_HIT, 1, 0)
    np.testing.assert_array_equal(x, [1.0, 0.0])


@pytest.mark.skipif(os.environ.get("GEOMEDIAN_PURE_PYTHON", "") not in ("", "0"),
                    reason="fallback forced by environment")
def test_default_backend_is_compiled():
    assert _backend.BACKEND == "cython"


def test_env_var_forces_fallback():
    env = dict(os.environ, GEOMEDIAN_PURE_PYTHON="1")
    code = ("import geomedian as g; s, _ = g.solve(g.Instance([[0,0],[1,0],[0,1],[1,1]]));"
            "print(g.BACKEND, s.status)")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                         text=True, check=True).stdout.split()
    assert out == ["python", "converged"]
