"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The backend is chosen once at import time. Set ``VISO_DISABLE_NUMBA=1`` to
force the numpy path; it is also used when numba cannot be imported. Both
modules expose the same functions and can be imported directly for
side-by-side comparison.
"""

from __future__ import annotations

import os

from . import numpy_impl

_disabled = os.environ.get("VISO_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

if _disabled:
    _impl = numpy_impl
    BACKEND = "numpy"
else:
    try:
        from . import numba_impl as _impl
    except ImportError:  # pragma: no cover - numba missing
        _impl = numpy_impl
        BACKEND = "numpy"
    else:
        BACKEND = "numba"

sinr = _impl.sinr
channel_proportional = _impl.channel_proportional
fast_loop = _impl.fast_loop
feasibility_inner = _impl.feasibility_inner
grid_search = _impl.grid_search

__all__ = [
    "BACKEND",
    "channel_proportional",
    "fast_loop",
    "feasibility_inner",
    "grid_search",
    "sinr",
]
