"""Kernel backend selection.

The compiled extension is preferred when importable; the numpy backend is the
fallback. RULESPACE_KERNEL=python|compiled forces a choice (the benchmark and
the cross-backend tests use this). Both backends are bit-identical, so the
choice only affects speed.
"""

from __future__ import annotations

import os

from . import _core_py as _python

try:
    from . import _core as _compiled
except ImportError:
    _compiled = None

_forced = os.environ.get("RULESPACE_KERNEL", "").strip().lower()
if _forced == "python":
    _active = _python
elif _forced == "compiled":
    if _compiled is None:
        raise ImportError("RULESPACE_KERNEL=compiled but rulespace._core is not built")
    _active = _compiled
elif _forced:
    raise ValueError(f"unknown RULESPACE_KERNEL value: {_forced!r}")
else:
    _active = _compiled if _compiled is not None else _python

IMPL = _active.IMPL
MAX_SAMPLES = _python.MAX_SAMPLES

grow_tree = _active.grow_tree
node_covers_and_counts = _active.node_covers_and_counts
gains = _active.gains
popcount = _active.popcount
and_popcount = _active.and_popcount
andnot_popcount = _active.andnot_popcount
class_popcounts = _active.class_popcounts


def backends() -> dict:
    """Importable backends by name (for benchmarks and equivalence tests)."""
    out = {"python": _python}
    if _compiled is not None:
        out["compiled"] = _compiled
    return out
