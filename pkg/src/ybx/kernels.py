"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the numpy
fallback is imported. Setting ``YBX_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("YBX_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

theta1_series = _impl.theta1_series
egamma_product = _impl.egamma_product

__all__ = ["BACKEND", "theta1_series", "egamma_product"]
