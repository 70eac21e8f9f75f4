"""Backend selection for the integer kernels.

The compiled extension is used when it imports and ``CROSSOVER_UO_PURE`` is
not set. Compiled calls that overflow int64 are retried with the Python
kernels, so results never depend on the backend.
"""

import os

from . import _fallback

_compiled = None
if not os.environ.get("CROSSOVER_UO_PURE"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = _compiled.BACKEND if _compiled is not None else _fallback.BACKEND


def bareiss_rank(rows):
    if _compiled is not None:
        try:
            return _compiled.bareiss_rank(rows)
        except OverflowError:
            pass
    return _fallback.bareiss_rank(rows)


def symmetric_ldl(rows):
    if _compiled is not None:
        try:
            return _compiled.symmetric_ldl(rows)
        except OverflowError:
            pass
    return _fallback.symmetric_ldl(rows)


def frequency_counts(grid, v):
    if _compiled is not None:
        return _compiled.frequency_counts(grid, v)
    return _fallback.frequency_counts(grid, v)
