"""
Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise the pure-Python
mirror is used. Setting ``PIPEADC_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _pykernels

BACKEND = "python"

if os.environ.get("PIPEADC_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

convert_block = _impl.convert_block
sd_modulate = _impl.sd_modulate
