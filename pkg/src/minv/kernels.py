"""Kernel backend selection.

The compiled extension is preferred when importable; the numpy fallback is
used otherwise. Set MINV_PURE_PYTHON=1 to force the fallback (the benchmark
script uses this to compare the two).
"""

import os

if os.environ.get("MINV_PURE_PYTHON"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

BACKEND: str = _impl.BACKEND
sinkhorn_log_potentials = _impl.sinkhorn_log_potentials
