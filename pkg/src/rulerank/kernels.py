"""Backend selection for the hot statistic kernels.

The compiled extension is preferred when it imported cleanly; the NumPy
reference implementation is always available. Set ``RULERANK_PURE_PYTHON=1``
to force the reference backend, or call :func:`use_backend` at runtime
(used by the benchmark to time both).
"""

from __future__ import annotations

import os

from . import _pykernels

_BACKENDS = {"python": _pykernels}
try:
    from . import _fastkernels

    _BACKENDS["compiled"] = _fastkernels
except ImportError:
    pass

BACKEND = "python"
studentized_moments = _pykernels.studentized_moments
signed_moments = _pykernels.signed_moments


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def use_backend(name: str) -> None:
    """Switch the active kernel backend ("python" or "compiled")."""
    global BACKEND, studentized_moments, signed_moments
    if name not in _BACKENDS:
        raise ValueError(f"unknown kernel backend {name!r}; available: {available_backends()}")
    mod = _BACKENDS[name]
    BACKEND = name
    studentized_moments = mod.studentized_moments
    signed_moments = mod.signed_moments


if not os.environ.get("RULERANK_PURE_PYTHON") and "compiled" in _BACKENDS:
    use_backend("compiled")
