"""Hot numeric kernels with two interchangeable backends.

The numba backend JIT-compiles the per-sample loops; the numpy backend is a
vectorized pure-numpy fallback with identical semantics. Selection happens
once at import time from the environment:

    QMEAS_BACKEND=numba   force numba (raises if numba is unavailable)
    QMEAS_BACKEND=numpy   force the pure-numpy fallback
    QMEAS_BACKEND=auto    numba when importable, else numpy (default)

Both backends are deterministic; all random sampling happens outside the
kernels so results do not depend on the backend beyond float rounding.
"""

from __future__ import annotations

import os

from ..errors import ConfigError
from . import numpy_impl

_choice = os.environ.get("QMEAS_BACKEND", "auto").strip().lower()

if _choice in ("auto", ""):
    try:
        from . import numba_impl as _impl
        BACKEND = "numba"
    except ImportError:
        _impl = numpy_impl
        BACKEND = "numpy"
elif _choice == "numba":
    from . import numba_impl as _impl
    BACKEND = "numba"
elif _choice == "numpy":
    _impl = numpy_impl
    BACKEND = "numpy"
else:
    raise ConfigError(f"QMEAS_BACKEND must be 'numba', 'numpy' or 'auto', got {_choice!r}")

mc_info_samples = _impl.mc_info_samples
block_singulars = _impl.block_singulars

__all__ = ["BACKEND", "mc_info_samples", "block_singulars"]
