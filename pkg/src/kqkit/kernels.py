"""Backend selection for the pairwise kernels.

Prefers the compiled extension, falls back to the numpy implementation when
the extension is missing. Set ``KQKIT_NO_EXT=1`` to force the fallback.
"""

from __future__ import annotations

import os

_force_fallback = os.environ.get("KQKIT_NO_EXT", "") not in ("", "0")

if not _force_fallback:
    try:
        from . import _pairwise_cy as _impl

        BACKEND = "compiled"
    except ImportError:
        from . import _pairwise_py as _impl

        BACKEND = "numpy"
else:
    from . import _pairwise_py as _impl

    BACKEND = "numpy"

within_class = _impl.within_class
between_class = _impl.between_class


def backend_name() -> str:
    """Name of the active kernel backend: 'compiled' or 'numpy'."""
    return BACKEND
