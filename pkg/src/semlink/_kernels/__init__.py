"""Decoder kernel backend selection.

The compiled extension is preferred when importable; the NumPy fallback is
functionally and numerically identical.  Set ``SEMLINK_PURE_PY=1`` to force
the fallback (used by the benchmark and the parity tests).
"""

from __future__ import annotations

import os

if os.environ.get("SEMLINK_PURE_PY"):
    from . import _polar_py as _impl
else:
    try:
        from . import _polar_c as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _polar_py as _impl  # type: ignore[no-redef]

BACKEND = _impl.BACKEND_NAME
encode_blocks = _impl.encode_blocks
sc_decode_blocks = _impl.sc_decode_blocks
scl_decode = _impl.scl_decode

__all__ = ["BACKEND", "encode_blocks", "sc_decode_blocks", "scl_decode"]
