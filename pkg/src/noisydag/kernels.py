"""Kernel selection: compiled extension if built, pure Python otherwise.

Set NOISYDAG_PURE=1 to force the Python kernels (used by the equivalence
tests and the benchmark).
"""

import os

from . import _kernels_py

try:
    from . import _mckernel
except ImportError:  # extension not built
    _mckernel = None

if _mckernel is not None and not os.environ.get("NOISYDAG_PURE"):
    _impl = _mckernel
    IMPLEMENTATION = "compiled"
else:
    _impl = _kernels_py
    IMPLEMENTATION = "python"

broadcast_trials = _impl.broadcast_trials
coupled_trials = _impl.coupled_trials
percolation_trials = _impl.percolation_trials


def implementations() -> dict:
    """All available kernel implementations, keyed by name."""
    out = {"python": _kernels_py}
    if _mckernel is not None:
        out["compiled"] = _mckernel
    return out
