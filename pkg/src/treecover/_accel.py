"""Kernel backend selection.

The compiled extension is used when it imports; ``TREECOVER_PURE_PYTHON=1``
forces the numpy fallback.
"""

import os

from . import _pykernels

if os.environ.get("TREECOVER_PURE_PYTHON") == "1":
    kernels = _pykernels
else:
    try:
        from . import _ckernels as kernels
    except ImportError:
        kernels = _pykernels

BACKEND = kernels.BACKEND


def worker_count(default: int = 1) -> int:
    """Thread count for verification sweeps; ``TREECOVER_WORKERS`` overrides it."""
    raw = os.environ.get("TREECOVER_WORKERS")
    if not raw:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        return default
