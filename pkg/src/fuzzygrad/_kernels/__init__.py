"""Backend selection for the enumeration scan.

The compiled Cython kernel is preferred when its extension module built;
otherwise the numpy implementation is used.  Both produce bit-identical
results; the compiled kernel runs rows in parallel.  Set the environment
variable ``FUZZYGRAD_BACKEND`` to ``python`` or ``cython`` to force one.
"""

from __future__ import annotations

import os

from ..constants import ENUM_CHUNK_BITS
from . import fallback as _fallback

try:
    from . import _enumscan as _compiled
except ImportError:
    _compiled = None

_forced = os.environ.get("FUZZYGRAD_BACKEND", "").strip().lower()
if _forced in ("python", "numpy", "fallback"):
    _impl, BACKEND = _fallback, "numpy"
elif _forced in ("cython", "compiled", "c"):
    if _compiled is None:
        raise ImportError(
            "FUZZYGRAD_BACKEND requests the compiled kernel but the extension "
            "is not built; reinstall with a C compiler or unset the variable"
        )
    _impl, BACKEND = _compiled, "cython"
elif _forced:
    raise ImportError(f"unknown FUZZYGRAD_BACKEND value {_forced!r}")
elif _compiled is not None:
    _impl, BACKEND = _compiled, "cython"
else:
    _impl, BACKEND = _fallback, "numpy"


def enum_scan(alpha0, alpha, beta0, beta, eps):
    """Min/max candidate scan on the active backend.

    Returns ``(y_lo, y_hi, jmin, jmax)`` per row, where jmin/jmax are the
    lowest switch-column indices attaining the extrema.
    """
    return _impl.enum_scan(alpha0, alpha, beta0, beta, eps, ENUM_CHUNK_BITS)


def available_backends() -> dict[str, callable]:
    """Name -> scan callable for every importable backend."""
    out = {"numpy": lambda *args: _fallback.enum_scan(*args, ENUM_CHUNK_BITS)}
    if _compiled is not None:
        out["cython"] = lambda *args: _compiled.enum_scan(*args, ENUM_CHUNK_BITS)
    return out
