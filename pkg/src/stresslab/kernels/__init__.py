"""Backend selection for the stress evaluation kernel.

Two interchangeable implementations exist: a compiled extension and a pure
NumPy fallback. The environment variable STRESSLAB_BACKEND forces one
("compiled" or "pure"); otherwise the compiled kernel is used when the
extension built, falling back silently to pure.
"""
from __future__ import annotations

import os

from . import pure
from .pure import isotonic_increasing

_requested = os.environ.get("STRESSLAB_BACKEND", "").strip().lower()

if _requested == "pure":
    _backend = pure
elif _requested == "compiled":
    from . import _ckern as _backend  # ImportError here means the build is missing
elif _requested == "":
    try:
        from . import _ckern as _backend
    except ImportError:
        _backend = pure
else:
    raise ValueError(
        f"STRESSLAB_BACKEND must be 'pure' or 'compiled', got {_requested!r}"
    )

BACKEND_NAME: str = _backend.NAME
StressEvaluator = _backend.StressEvaluator
kruskal_stress_sorted = _backend.kruskal_stress_sorted

__all__ = [
    "BACKEND_NAME",
    "StressEvaluator",
    "kruskal_stress_sorted",
    "isotonic_increasing",
]
