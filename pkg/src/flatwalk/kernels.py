"""Float hot loops, compiled when the extension is built, pure Python otherwise.

Set FLATWALK_PURE_PYTHON=1 to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
classify_pairs = _kernels_py.classify_pairs
excursion_walk = _kernels_py.excursion_walk

if not os.environ.get("FLATWALK_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None
    if _compiled is not None:
        BACKEND = "cython"
        classify_pairs = _compiled.classify_pairs
        excursion_walk = _compiled.excursion_walk


def backends():
    """Available implementations by name, for benchmarks and cross-checks."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels

        out["cython"] = _kernels
    except ImportError:
        pass
    return out
