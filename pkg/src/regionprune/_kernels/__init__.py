"""LP kernel selection.

The compiled Cython kernel is used when importable; otherwise the numpy
fallback. Set ``REGIONPRUNE_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import fallback
from .fallback import INFEASIBLE, NUMERICAL, OPTIMAL

try:
    if os.environ.get("REGIONPRUNE_PURE_PYTHON"):
        raise ImportError("pure-python kernel requested")
    from ._simplex import max_slack

    BACKEND = "cython"
except ImportError:
    from .fallback import max_slack

    BACKEND = "python"

__all__ = ["BACKEND", "INFEASIBLE", "NUMERICAL", "OPTIMAL", "fallback", "max_slack"]
