"""Backend selection for the hot kernels.

The compiled extension is used when it was built; otherwise the numpy
fallback.  Setting ``QCNOISE_PURE_PYTHON=1`` forces the fallback at import.
"""

import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

if os.environ.get("QCNOISE_PURE_PYTHON", "") not in ("", "0") or _ckernels is None:
    _active = _pykernels
else:
    _active = _ckernels


def available() -> list[str]:
    return sorted(_BACKENDS)


def active():
    return _active


def backend_name() -> str:
    return _active.NAME


def use(name: str):
    """Switch the process-wide backend; returns the previous name."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} not available (have {available()})")
    prev = _active.NAME
    _active = _BACKENDS[name]
    return prev


def get(name: str):
    return _BACKENDS[name]
