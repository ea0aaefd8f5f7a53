"""Kernel backend selection.

The compiled extension is used when it imported cleanly; set
QUOTASIG_PURE=1 to force the pure-Python reference kernel. `BACKEND`
names the active choice ("compiled" or "pure").
"""

import os

from . import pure

__all__ = ["BACKEND", "grid_search", "pure", "compiled_available"]

_fast = None
if os.environ.get("QUOTASIG_PURE") != "1":
    try:
        from . import _fastcore as _fast
    except ImportError:
        _fast = None

BACKEND = "compiled" if _fast is not None else "pure"
grid_search = _fast.grid_search if _fast is not None else pure.grid_search


def compiled_available() -> bool:
    try:
        from . import _fastcore  # noqa: F401
    except ImportError:
        return False
    return True
