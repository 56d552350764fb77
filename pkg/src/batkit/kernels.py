"""Backend selection for the hot kernels.

By default the compiled Cython extension is used when importable, with the
pure numpy module as fallback. BATKIT_KERNELS=pure|compiled forces a
backend (compiled raises if the extension is missing).
"""

import os

from . import _kernels_py

_choice = os.environ.get("BATKIT_KERNELS", "auto").lower()

if _choice not in ("auto", "pure", "compiled"):
    raise ValueError(f"BATKIT_KERNELS must be auto, pure or compiled, got {_choice!r}")

if _choice == "pure":
    _impl = _kernels_py
else:
    try:
        from . import _kernels_cy as _impl
    except ImportError:
        if _choice == "compiled":
            raise
        _impl = _kernels_py

BACKEND = _impl.BACKEND
gru_forward = _impl.gru_forward
gru_backward = _impl.gru_backward
accumulate_taps = _impl.accumulate_taps
