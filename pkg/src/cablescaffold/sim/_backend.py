"""Kernel selection: compiled extension when importable, else pure Python.

``CABLESCAFFOLD_BACKEND`` may be ``auto`` (default), ``cython`` or ``python``.
"""

import os

from . import _pykernel

try:
    from . import _core
except ImportError:  # extension not built
    _core = None

KERNELS = {"python": _pykernel}
if _core is not None:
    KERNELS["cython"] = _core


def default_backend() -> str:
    choice = os.environ.get("CABLESCAFFOLD_BACKEND", "auto").lower()
    if choice == "auto":
        return "cython" if _core is not None else "python"
    if choice not in ("python", "cython"):
        raise ValueError(f"CABLESCAFFOLD_BACKEND must be auto, cython or python, got {choice!r}")
    if choice == "cython" and _core is None:
        raise ImportError("compiled kernel requested but cablescaffold.sim._core is not built")
    return choice


def get_kernel(name=None):
    name = default_backend() if name is None else name
    try:
        return KERNELS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable (have: {sorted(KERNELS)})") from None
