"""The capacitary potential ``W_F(x, t)``.

For ``q >= q_c``

    W_F(x, t) = t^{-1/(q-1)} Σ_{n>=0} (n+1)^{N/2 - 1/(q-1)} e^{-n/4} C(F_n / √((n+1)t)),

where ``F_n`` is the part of ``F`` in the slice ``√(nt) <= |x - y| < √((n+1)t)``
and ``C = C_{2/q,q'}``.  Every rescaled slice lies in the unit ball around
``x / √((n+1)t)``, so all terms are computed on lattices of one shared spacing
anchored at that point.  With this anchoring the discrete potential is exactly
covariant under translations and parabolic rescalings.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional

import numpy as np

from . import geometry
from .capacity import CapacityControls, CapacityResult, capacity
from .geometry import BallUnion, CompactSet, IntervalUnion
from .params import InvalidParameterError, Params


class UnsupportedRegimeError(InvalidParameterError):
    pass


#: default spacing, in rescaled units, of the lattices used for the slice capacities
DEFAULT_SLICE_SPACING = 1.0 / 64.0


@dataclass(frozen=True)
class PotentialTerm:
    n: int
    weight: float
    capacity: float
    gap: float
    contribution: float


@dataclass
class PotentialTerms:
    """Per-slice terms of the series together with the prefactor."""

    x: tuple
    t: float
    prefactor: float
    terms: list = field(default_factory=list)
    h: float = DEFAULT_SLICE_SPACING
    omitted: float = 0.0

    @property
    def total(self) -> float:
        return self.prefactor * math.fsum(term.contribution for term in sorted(self.terms, key=lambda r: r.n))

    @property
    def value(self) -> float:
        return self.total

    @property
    def gap(self) -> float:
        """Bound on the error due to the capacity solver tolerances."""
        return self.prefactor * (math.fsum(term.weight * term.gap for term in self.terms) + self.omitted)

    def to_dict(self) -> dict:
        return {"x": list(self.x), "t": self.t, "prefactor": self.prefactor, "h": self.h,
                "total": self.total, "gap": self.gap, "omitted": self.omitted,
                "terms": [{"n": r.n, "weight": r.weight, "capacity": r.capacity, "gap": r.gap,
                           "contribution": r.contribution} for r in self.terms]}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "weight", "capacity", "contribution"])
        for r in self.terms:
            w.writerow([r.n, repr(r.weight), repr(r.capacity), repr(r.contribution)])
        w.writerow(["total", "", "", repr(self.total)])
        return buf.getvalue()


def term_weight(params: Params, n: int) -> float:
    return (n + 1) ** params.slice_exponent * math.exp(-n / 4.0)


def _require_supercritical(params: Params):
    if not params.supercritical:
        raise UnsupportedRegimeError(
            f"the capacitary potential needs q >= q_c = {params.q_crit:g}; for q < q_c use the vss module")


def _slice_controls(controls: Optional[CapacityControls], x: np.ndarray, scale: float) -> CapacityControls:
    controls = controls or CapacityControls(h=DEFAULT_SLICE_SPACING)
    if controls.h is None:
        controls = replace(controls, h=DEFAULT_SLICE_SPACING)
    return replace(controls, origin=tuple(float(v) for v in x / scale))


def slice_capacity(F: CompactSet, params: Params, x, t: float, n: int,
                   controls: Optional[CapacityControls] = None) -> tuple[CompactSet, CapacityResult]:
    """Capacity of ``F_n(x, t) / √((n+1)t)``; returns the rescaled slice and the result."""
    x = np.asarray(x, dtype=float).reshape(params.N)
    scale = math.sqrt((n + 1) * t)
    piece = geometry.slice(F, x, t, n).scaled(1.0 / scale)
    return piece, capacity(piece, params, _slice_controls(controls, x, scale))


def slice_capacities(F: CompactSet, params: Params, x, t: float,
                     controls: Optional[CapacityControls] = None, jobs: int = 1) -> list:
    """``[(n, rescaled slice, CapacityResult)]`` for ``n = 0..slice_range``, sorted by ``n``."""
    if t <= 0:
        raise InvalidParameterError("t must be positive")
    if F.dim != params.N:
        raise InvalidParameterError(f"set dimension {F.dim} does not match N={params.N}")
    n_max = geometry.slice_range(F, x, t)
    ns = list(range(n_max + 1))

    def one(n):
        piece, res = slice_capacity(F, params, x, t, n, controls)
        return n, piece, res

    if jobs > 1 and len(ns) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            out = list(ex.map(one, ns))
    else:
        out = [one(n) for n in ns]
    return sorted(out, key=lambda r: r[0])


@lru_cache(maxsize=16)
def _unit_ball_capacity(N: int, q: float, h: float, gap_tol: float) -> float:
    ball = IntervalUnion([(-1.0, 1.0)]) if N == 1 else BallUnion([[0.0] * N], [1.0])
    return capacity(ball, Params(N, q), CapacityControls(h=h, gap_tol=gap_tol, origin=(0.0,) * N)).value


def w_potential(F: CompactSet, params: Params, x, t: float,
                controls: Optional[CapacityControls] = None, jobs: int = 1,
                tail_rtol: float = 0.0) -> PotentialTerms:
    """Evaluate ``W_F(x, t)`` term by term.

    With ``tail_rtol > 0`` the summation stops once the remaining terms are
    certified to add less than ``tail_rtol`` times the partial sum.  The
    certificate uses ``C(slice) <= C(closed unit ball)``, which holds for the
    discrete capacities because every rescaled slice lies in the unit ball
    around the lattice anchor.  The bound on the dropped part is kept in
    ``omitted`` and counted in ``gap``.
    """
    _require_supercritical(params)
    x = np.asarray(x, dtype=float).reshape(params.N)
    if t <= 0:
        raise InvalidParameterError("t must be positive")
    h = (controls.h if controls is not None and controls.h is not None else DEFAULT_SLICE_SPACING)
    terms = []
    omitted = 0.0
    if tail_rtol <= 0:
        for n, _, res in slice_capacities(F, params, x, t, controls, jobs):
            wgt = term_weight(params, n)
            terms.append(PotentialTerm(n, wgt, res.value, res.gap, wgt * res.value))
    else:
        n_max = geometry.slice_range(F, x, t)
        gap_tol = controls.gap_tol if controls is not None else CapacityControls().gap_tol
        cb = _unit_ball_capacity(params.N, params.q, float(h), gap_tol) * (1 + gap_tol)
        wts = np.array([term_weight(params, n) for n in range(n_max + 1)])
        rest = np.cumsum(wts[::-1])[::-1]            # rest[n] = Σ_{m >= n} weight(m)
        partial = 0.0
        for n in range(n_max + 1):
            if partial > 0 and n + 1 > 4 * params.slice_exponent and cb * rest[n] <= tail_rtol * partial:
                omitted = cb * float(rest[n])
                break
            piece, res = slice_capacity(F, params, x, t, n, controls)
            terms.append(PotentialTerm(n, float(wts[n]), res.value, res.gap, float(wts[n]) * res.value))
            partial += float(wts[n]) * res.value
    return PotentialTerms(tuple(x.tolist()), float(t), t ** (-params.decay_exponent), terms, h, omitted)


def similarity_pair(F: CompactSet, params: Params, x, t: float, k: float,
                    controls: Optional[CapacityControls] = None) -> tuple[float, float]:
    """``(k^{1/(q-1)} W_F(√k x, k t), W_{F/√k}(x, t))``."""
    if k <= 0:
        raise InvalidParameterError("k must be positive")
    x = np.asarray(x, dtype=float).reshape(params.N)
    a = k ** params.decay_exponent * w_potential(F, params, math.sqrt(k) * x, k * t, controls).total
    b = w_potential(geometry.scale_set(F, k), params, x, t, controls).total
    return a, b
