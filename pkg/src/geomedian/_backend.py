"""Pick the kernel implementation at import time.

The compiled ``_ckernels`` extension is used when it was built; otherwise,
or when ``GEOMEDIAN_PURE_PYTHON`` is set to a non-empty value other than
``0``, the numpy fallback in ``_pykernels`` is used.
"""
import os

from . import _pykernels


def _want_pure():
    return os.environ.get("GEOMEDIAN_PURE_PYTHON", "") not in ("", "0")


if _want_pure():
    kernels = _pykernels
else:
    try:
        from . import _ckernels as kernels
    except ImportError:
        kernels = _pykernels

BACKEND = kernels.NAME
