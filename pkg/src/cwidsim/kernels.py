"""Hot-loop kernels with a compiled backend and a numpy fallback.

The compiled extension (``_ckernels``) is used when it was built at install
time; otherwise the numpy versions in ``_pykernels`` are used. Both produce
the same numbers to floating-point rounding.
"""

import logging

import numpy as np

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

logger = logging.getLogger(__name__)

HALF_WIDTH = 32
KAISER_BETA = 9.0
OVERSAMPLE = 4096


def sinc_kernel(u):
    """Kaiser-windowed sinc evaluated directly (no table)."""
    u = np.asarray(u, dtype=np.float64)
    ratio = np.clip(1.0 - (u / HALF_WIDTH) ** 2, 0.0, None)
    window = np.i0(KAISER_BETA * np.sqrt(ratio)) / np.i0(KAISER_BETA)
    return np.where(np.abs(u) < HALF_WIDTH, np.sinc(u) * window, 0.0)


def _build_table():
    u = np.arange(HALF_WIDTH * OVERSAMPLE + 1) / OVERSAMPLE
    table = np.append(sinc_kernel(u), 0.0)
    table.setflags(write=False)
    return table


TABLE = _build_table()

BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["compiled"] = _ckernels

_active = _ckernels if _ckernels is not None else _pykernels


def available_backends():
    return sorted(BACKENDS)


def backend_name():
    return "compiled" if _active is _ckernels else "python"


def use_backend(name):
    """Switch the kernel backend (``"compiled"`` or ``"python"``)."""
    global _active
    if name not in BACKENDS:
        raise ValueError(f"backend {name!r} not available; have {available_backends()}")
    _active = BACKENDS[name]
    logger.debug("kernel backend set to %s", name)


def interp(x, positions):
    """Evaluate the band-limited reconstruction of ``x`` at ``positions``."""
    return _active.interp(x, positions, TABLE, OVERSAMPLE, HALF_WIDTH)


def slot_correlate(r, starts, refs, max_lag):
    return _active.slot_correlate(r, starts, refs, int(max_lag))
