"""Select the compiled kernels when available, else the numpy fallback.

Set ``REUPLOAD_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("REUPLOAD_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels

fidelities = _impl.fidelities
noisy_counts = _impl.noisy_counts
expected_p0 = _pykernels.expected_p0
shot_stride = _pykernels.shot_stride
