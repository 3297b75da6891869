"""Picks the compiled decoder when it was built, the numpy one otherwise.

Set ``ERASURE_EXPONENTS_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _decode_py

try:
    if os.environ.get("ERASURE_EXPONENTS_PURE"):
        raise ImportError("pure-Python backend requested")
    from ._decode import decode_batch
    BACKEND = "compiled"
except ImportError:
    decode_batch = _decode_py.decode_batch
    BACKEND = "python"

fallback_decode_batch = _decode_py.decode_batch
