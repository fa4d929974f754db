"""Kernel backend selection: compiled extension when available, numpy otherwise.

``EULERLAB_KERNELS`` forces a backend: ``compiled``, ``numpy`` or ``auto``
(default).  The MUSCL reconstruction always runs through numpy.
"""

from __future__ import annotations

import os

import numpy as np

from . import kernels_numpy

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built; pure-python fallback
    _compiled = None

_FORCED = os.environ.get("EULERLAB_KERNELS", "auto").lower()
if _FORCED not in ("auto", "numpy", "compiled"):
    raise RuntimeError(f"EULERLAB_KERNELS must be auto/numpy/compiled, got {_FORCED!r}")
if _FORCED == "compiled" and _compiled is None:
    raise RuntimeError("EULERLAB_KERNELS=compiled but the extension is not built")

HAVE_COMPILED = _compiled is not None
USE_COMPILED = HAVE_COMPILED and _FORCED in ("auto", "compiled")


def backend_name():
    return "compiled" if USE_COMPILED else "numpy"


max_wave_speed = kernels_numpy.max_wave_speed
entropy = kernels_numpy.entropy
entropy_flux_divergence = kernels_numpy.entropy_flux_divergence


def _rhs_compiled(rho, m, gamma, spacing, periodic, floor):
    d = m.shape[-1]
    rho = np.ascontiguousarray(rho)
    comps = [np.ascontiguousarray(m[..., i]) for i in range(d)]
    drho = np.empty_like(rho)
    douts = [np.empty_like(rho) for _ in range(d)]
    if d == 1:
        _compiled.rhs_1d(rho, comps[0], gamma, spacing[0], periodic[0], floor,
                         drho, douts[0])
    elif d == 2:
        _compiled.rhs_2d(rho, comps[0], comps[1], gamma, spacing[0], spacing[1],
                         periodic[0], periodic[1], floor, drho, douts[0], douts[1])
    else:
        _compiled.rhs_3d(rho, comps[0], comps[1], comps[2], gamma,
                         spacing[0], spacing[1], spacing[2],
                         periodic[0], periodic[1], periodic[2], floor,
                         drho, douts[0], douts[1], douts[2])
    return drho, np.stack(douts, axis=-1)


def euler_rhs(rho, m, gamma, spacing, periodic, reconstruction="constant",
              floor=1e-14, dissipation="local", backend=None):
    """Conservative flux divergence (drho/dt, dm/dt) via the selected backend.

    Only the hot path (piecewise-constant states, per-face dissipation) has a
    compiled twin; MUSCL and uniform-dissipation variants run through numpy.
    """
    use_compiled = USE_COMPILED if backend is None else (backend == "compiled")
    if reconstruction == "constant" and dissipation == "local" and use_compiled:
        return _rhs_compiled(rho, m, gamma, spacing, periodic, floor)
    return kernels_numpy.euler_rhs(rho, m, gamma, spacing, periodic,
                                   reconstruction=reconstruction, floor=floor,
                                   dissipation=dissipation)
