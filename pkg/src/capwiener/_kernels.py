"""Hot loops with a compiled backend and a numpy fallback.

The compiled module is optional; set ``CAPWIENER_BACKEND=python`` to force the
fallback.  Both backends compute the same sums in the same atom order.
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    if os.environ.get("CAPWIENER_BACKEND", "").lower() == "python":
        raise ImportError
    from . import _speedups as _ext
except ImportError:  # pragma: no cover - depends on the build
    _ext = None

BACKEND = "cython" if _ext is not None else "python"


def gauss_sums_1d_py(y, atoms, weights, groups, ngroups: int, s: float, cutoff: float) -> np.ndarray:
    """``out[i, g] = Σ_{groups[j] = g, |y_i - a_j| <= cutoff} w_j G(y_i - a_j, s)`` in 1D.

    ``atoms`` must be sorted increasingly.
    """
    y = np.asarray(y, dtype=float)
    out = np.zeros((len(y), ngroups))
    if len(atoms) == 0 or len(y) == 0:
        return out
    c = 1.0 / math.sqrt(4.0 * math.pi * s)
    for start in range(0, len(y), 512):
        yy = y[start:start + 512]
        pad = 1e-12 * (np.abs(yy).max() + cutoff)
        j0 = np.searchsorted(atoms, yy.min() - cutoff - pad, side="left")
        j1 = np.searchsorted(atoms, yy.max() + cutoff + pad, side="right")
        if j1 <= j0:
            continue
        d = yy[:, None] - atoms[None, j0:j1]
        val = weights[None, j0:j1] * c * np.exp(-d * d / (4.0 * s))
        val[np.abs(d) > cutoff] = 0.0
        if ngroups == 1:
            out[start:start + 512, 0] = val.sum(axis=1)
        else:
            g = groups[j0:j1]
            for k in np.unique(g):
                out[start:start + 512, k] = val[:, g == k].sum(axis=1)
    return out


def gauss_sums_1d(y, atoms, weights, groups=None, ngroups: int = 1, s: float = 1.0,
                  cutoff: float = math.inf, backend: str | None = None) -> np.ndarray:
    """Windowed weighted heat-kernel sums grouped by an integer tag."""
    atoms = np.ascontiguousarray(atoms, dtype=float).reshape(-1)
    weights = np.ascontiguousarray(weights, dtype=float).reshape(-1)
    groups = (np.zeros(len(atoms), dtype=np.int64) if groups is None
              else np.ascontiguousarray(groups, dtype=np.int64).reshape(-1))
    if len(atoms) > 1 and np.any(np.diff(atoms) < 0):
        order = np.argsort(atoms, kind="stable")
        atoms, weights, groups = atoms[order], weights[order], groups[order]
    y = np.ascontiguousarray(y, dtype=float).reshape(-1)
    use = backend or BACKEND
    if use == "cython":
        if _ext is None:
            raise RuntimeError("compiled backend not available")
        cut = min(cutoff, 1e300)
        return _ext.gauss_sums_1d(y, atoms, weights, groups, int(ngroups), float(s), float(cut))
    return gauss_sums_1d_py(y, atoms, weights, groups, int(ngroups), float(s), cutoff)
