import sys

import numpy as np
import pytest

from geomedian import _pykernels
from geomedian.core import Instance

try:
    from geomedian import _ckernels
except ImportError:  # extension not built
    _ckernels = None

SQRT3 = np.sqrt(3.0)

SQUARE = [[0, 0], [1, 0], [0, 1], [1, 1]]
PLUS = [[0, 0], [1, 0], [-1, 0], [0, 1]]          # optimum at the vertex (0, 0)
RIGHT = [[0, 0], [1, 0], [0, 1]]
EQUILATERAL = [[0, 0], [1, 0], [0.5, SQRT3 / 2]]
OBTUSE = [[0, 0], [1, 0], [-0.866025, 0.5]]       # 150 degree angle at (0, 0)
COLLINEAR3 = [[0, 0], [1, 0], [3, 0]]


@pytest.fixture
def square():
    return Instance(SQUARE)


@pytest.fixture
def plus():
    return Instance(PLUS)


@pytest.fixture
def right():
    return Instance(RIGHT)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_instance(rng, m=None, n=2, weighted=False):
    m = int(rng.integers(3, 11)) if m is None else m
    w = rng.uniform(0.5, 2.0, m) if weighted else None
    return Instance(rng.random((m, n)), w)


def kernel_backends():
    backends = [pytest.param(_pykernels, id="python")]
    backends.append(pytest.param(
        _ckernels, id="cython",
        marks=pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")))
    return backends


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[num])
