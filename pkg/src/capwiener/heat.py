"""Heat kernel, heat extensions of discrete measures and the capacitary lower bound.

For a measure ``μ`` the solution with initial trace ``μ`` satisfies

    u_μ >= e^{tΔ}μ - ∫_0^t e^{(t-s)Δ}[(e^{sΔ}μ)^q] ds.

For the atomic measures built here the time integral diverges at ``s = 0`` when
``q >= q_c``, so the nonlinear term is evaluated from ``s = ε₀`` on.  This is
the exact correction for the solution started at time ``ε₀`` from
``e^{ε₀Δ}μ``, which is what :func:`pde.solve_with_measure` computes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import geometry
from ._kernels import gauss_sums_1d
from .capacity import CapacityControls, NonConvergedError
from .geometry import CompactSet
from .measure import DiscreteMeasure
from .params import InvalidParameterError, Params
from .potential import _require_supercritical, slice_capacities


def heat_kernel(xi, tau: float, N: Optional[int] = None):
    """``(4π|τ|)^{-N/2} exp(-|ξ|²/(4τ))``.

    A scalar ``xi`` is a point of the line; for arrays the last axis is the
    space dimension unless ``N`` is given.
    """
    if tau == 0:
        raise InvalidParameterError("heat kernel needs τ != 0")
    xi = np.asarray(xi, dtype=float)
    if N is None:
        N = 1 if xi.ndim == 0 else xi.shape[-1]
        r2 = xi * xi if xi.ndim == 0 else np.sum(xi * xi, axis=-1)
    elif N == 1 and (xi.ndim == 0 or xi.shape[-1] != 1):
        r2 = xi * xi
    else:
        r2 = np.sum(xi.reshape(xi.shape[:-1] + (N,)) ** 2, axis=-1)
    out = (4 * math.pi * abs(tau)) ** (-N / 2) * np.exp(-r2 / (4 * tau))
    return float(out) if np.ndim(out) == 0 else out


def heat_of_measure(mu: DiscreteMeasure, x, t: float):
    """``e^{tΔ}[μ](x) = Σ w_j G(x - a_j, t)``; ``x`` may be one point or an ``(m, N)`` array."""
    if not t > 0:
        raise InvalidParameterError("t must be positive")
    N = mu.dim
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 0 or (pts.ndim == 1 and (N > 1 or pts.size == 1))
    pts = pts.reshape(-1, N)
    if len(mu) == 0:
        out = np.zeros(len(pts))
    else:
        out = np.empty(len(pts))
        for s in range(0, len(pts), 1024):
            d = pts[s:s + 1024, None, :] - mu.atoms[None, :, :]
            out[s:s + 1024] = heat_kernel(d, t, N) @ mu.weights
    return float(out[0]) if single else out


# ---------------------------------------------------------------------------
# partition of the backward cone


@dataclass(frozen=True)
class PartitionCell:
    """Cell ``p`` of the partition of ``R^N x (0, t)`` by ``ρ = |x-y|² + t - s``.

    ``p >= 1``: ``t p <= ρ < t (p+1)``; ``p <= 0``: ``t α^{1-p} <= ρ < t α^{-p}``.
    """

    p: int
    t: float
    alpha: float = 0.5

    def bounds(self) -> tuple[float, float]:
        if self.p >= 1:
            return self.t * self.p, self.t * (self.p + 1)
        return self.t * self.alpha ** (1 - self.p), self.t * self.alpha ** (-self.p)

    def contains(self, rho) -> np.ndarray:
        lo, hi = self.bounds()
        rho = np.asarray(rho, dtype=float)
        return (rho >= lo) & (rho < hi)


def cell_index(rho, t: float, alpha: float = 0.5) -> np.ndarray:
    """Index of the partition cell holding each ``ρ > 0``."""
    if not 0 < alpha < 1:
        raise InvalidParameterError("cell geometry parameter must lie in (0, 1)")
    rho = np.asarray(rho, dtype=float)
    r = rho / t
    out = np.empty(rho.shape, dtype=np.int64)
    big = r >= 1.0
    out[big] = np.floor(r[big]).astype(np.int64)
    small = ~big
    L = np.log(r[small]) / math.log(alpha)
    p = 1 - np.ceil(L).astype(np.int64)
    # guard the rounding of the logarithm at cell edges
    lo = t * alpha ** (1.0 - p)
    p = np.where(rho[small] < lo, p - 1, p)
    hi = t * alpha ** (-p.astype(float))
    p = np.where(rho[small] >= hi, p + 1, p)
    out[small] = p
    return out


# ---------------------------------------------------------------------------
# the capacitary measure


def _project_1d(a: np.ndarray, iv: np.ndarray) -> np.ndarray:
    if len(iv) == 0:
        return a
    lo, hi = iv[:, 0][None, :], iv[:, 1][None, :]
    cand = np.clip(a[:, None], lo, hi)
    k = np.argmin(np.abs(cand - a[:, None]), axis=1)
    return cand[np.arange(len(a)), k]


def _project_to_slice(atoms: np.ndarray, piece, x: np.ndarray, t: float, n: int) -> np.ndarray:
    if atoms.shape[1] == 1:
        iv = piece.intervals()
        return _project_1d(atoms[:, 0], iv).reshape(-1, 1)
    d = atoms - x
    r = np.linalg.norm(d, axis=1)
    rc = np.clip(r, math.sqrt(n * t), math.sqrt((n + 1) * t))
    f = np.where(r > 0, rc / np.where(r > 0, r, 1.0), 1.0)
    return x + d * f[:, None]


@dataclass
class CapacitaryMeasure:
    """``μ = Σ μ_n`` together with the slice data it was built from."""

    measure: DiscreteMeasure
    slices: list = field(default_factory=list)   # (n, capacity value, dual bound, mass of μ_n)

    def to_dict(self) -> dict:
        return {"measure": self.measure.to_dict(),
                "slices": [{"n": n, "capacity": c, "dual_bound": d, "mass": m} for n, c, d, m in self.slices]}


def build_capacitary_mu(F: CompactSet, params: Params, x, t: float,
                        controls: Optional[CapacityControls] = None, slices=None) -> CapacitaryMeasure:
    """Assemble ``μ`` from the capacitary measures of the rescaled slices.

    ``μ_n(A) = (t(n+1))^{N/2 - 1/(q-1)} ν_n(A / √(t(n+1)))``.  Atoms are moved to
    the nearest point of the closed slice (a shift of at most one lattice cell).
    """
    _require_supercritical(params)
    N = params.N
    x = np.asarray(x, dtype=float).reshape(N)
    if slices is None:
        slices = slice_capacities(F, params, x, t, controls)
    parts, info = [], []
    for n, piece, res in slices:
        if len(res.measure) == 0:
            continue
        scale = math.sqrt(t * (n + 1))
        nu = res.measure
        mu_n = nu.pushforward(scale).scaled(scale ** (N - 2.0 * params.decay_exponent)).with_group(n)
        full_piece = geometry.slice(F, x, t, n)
        atoms = _project_to_slice(mu_n.atoms, full_piece, x, t, n)
        mu_n = DiscreteMeasure(atoms, mu_n.weights, f"μ_{n}", mu_n.groups)
        parts.append(mu_n)
        info.append((n, res.value, res.dual_bound, mu_n.mass))
    return CapacitaryMeasure(DiscreteMeasure.concatenate(parts, N, "μ"), info)


@dataclass(frozen=True)
class Est4Result:
    lhs: float
    rhs: float
    allowance: float

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs - self.allowance

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "allowance": self.allowance, "holds": self.holds}


def est4_check(F: CompactSet, params: Params, x, t: float,
               controls: Optional[CapacityControls] = None, built: Optional[CapacitaryMeasure] = None) -> Est4Result:
    """Compare ``e^{tΔ}μ(x)`` with ``(4πt)^{-N/2} Σ (t(n+1))^{N/2-1/(q-1)} e^{-(n+1)/4} C_n``.

    ``allowance`` is the same sum with ``C_n`` replaced by the solver gaps.
    """
    N = params.N
    built = built or build_capacitary_mu(F, params, x, t, controls)
    lhs = heat_of_measure(built.measure, np.asarray(x, float).reshape(N), t) if len(built.measure) else 0.0
    c0 = (4 * math.pi * t) ** (-N / 2)
    rhs = allow = 0.0
    for n, cap, dual, _ in built.slices:
        f = c0 * (t * (n + 1)) ** params.slice_exponent * math.exp(-(n + 1) / 4.0)
        rhs += f * cap
        allow += f * max(cap - dual, 0.0)
    return Est4Result(float(lhs), rhs, allow)


# ---------------------------------------------------------------------------
# nonlinear term


@dataclass(frozen=True)
class NonlinearControls:
    """Quadrature layout for the nonlinear term.

    ``eps0_rel``: lower time limit as a fraction of ``t``.  ``alpha``: geometry of
    the cells ``p <= 0``.  ``panel_ratio``: growth of the geometric time panels
    towards ``s = ε₀`` and ``s = t``.  ``nodes``: Gauss-Legendre nodes per panel.
    ``y_div``: spatial nodes per ``min(√(t-s), √s)``.  ``extent``: spatial
    truncation in units of those scales.  ``refine_tol``: accepted relative change
    between the base and the refined rule.
    """

    eps0_rel: float = 1e-3
    alpha: float = 0.5
    panel_ratio: float = 2.0
    nodes: int = 8
    y_div: float = 4.0
    extent: float = 9.0
    refine_tol: float = 0.02
    backend: Optional[str] = None

    def refined(self) -> "NonlinearControls":
        return NonlinearControls(self.eps0_rel, self.alpha, math.sqrt(self.panel_ratio), self.nodes,
                                 2 * self.y_div, self.extent, self.refine_tol, self.backend)

    def to_dict(self) -> dict:
        return {"eps0_rel": self.eps0_rel, "alpha": self.alpha, "panel_ratio": self.panel_ratio,
                "nodes": self.nodes, "y_div": self.y_div, "extent": self.extent,
                "refine_tol": self.refine_tol}

    @classmethod
    def from_dict(cls, d: Optional[dict]) -> "NonlinearControls":
        d = dict(d or {})
        keys = ("eps0_rel", "alpha", "panel_ratio", "nodes", "y_div", "extent", "refine_tol")
        return cls(**{k: d[k] for k in keys if k in d})


@dataclass
class NonlinearResult:
    """Value of the nonlinear term with its quadrature diagnostics.

    ``cells`` maps the partition index ``p`` to the part of the integral over
    that cell; ``j1``/``j2`` split the integrand by slice index (``n <= p+2``
    versus ``n >= p+3``).
    """

    value: float
    delta: float
    eps0: float
    cells: dict = field(default_factory=dict)
    j1: float = 0.0
    j2: float = 0.0

    def to_dict(self) -> dict:
        return {"value": self.value, "delta": self.delta, "eps0": self.eps0, "j1": self.j1, "j2": self.j2,
                "cells": {str(k): v for k, v in sorted(self.cells.items())}}


def _time_nodes(e0: float, t: float, ratio: float, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes on panels graded geometrically towards ``ε₀`` and ``t``."""
    mid = e0 + (t - e0) / 2
    left = [e0]
    while left[-1] * ratio < mid:
        left.append(left[-1] * ratio)
    left.append(mid)
    right = [t - mid]
    sig_min = e0 * 1e-3
    while right[-1] / ratio > sig_min:
        right.append(right[-1] / ratio)
    edges = np.concatenate([np.array(left), t - np.array(right[1:]), [t]])
    xg, wg = leggauss(nodes)
    a, b = edges[:-1], edges[1:]
    s = (0.5 * (b - a)[:, None] * (xg[None, :] + 1) + a[:, None]).reshape(-1)
    w = (0.5 * (b - a)[:, None] * wg[None, :]).reshape(-1)
    return s, w


def _nonlinear_pass(mu: DiscreteMeasure, q: float, x: float, t: float, c: NonlinearControls,
                    with_split: bool):
    e0 = c.eps0_rel * t
    atoms = mu.atoms[:, 0]
    order = np.argsort(atoms, kind="stable")
    atoms, weights = atoms[order], mu.weights[order]
    groups = np.zeros(len(atoms), dtype=np.int64) if mu.groups is None else mu.groups[order]
    ng = int(groups.max()) + 1 if len(groups) else 1
    amin, amax = float(atoms[0]), float(atoms[-1])
    s_nodes, s_w = _time_nodes(e0, t, c.panel_ratio, c.nodes)
    total = 0.0
    cells: dict = {}
    j1 = j2 = 0.0
    gidx = np.arange(ng)
    for s, ws in zip(s_nodes, s_w):
        sig = t - s
        rs, rsig = math.sqrt(s), math.sqrt(sig)
        dy = min(rs, rsig) / c.y_div
        lo = max(x - c.extent * rsig, amin - c.extent * rs)
        hi = min(x + c.extent * rsig, amax + c.extent * rs)
        if hi <= lo:
            continue
        k0, k1 = math.floor((lo - x) / dy), math.ceil((hi - x) / dy)
        y = x + dy * np.arange(k0, k1 + 1)
        v = gauss_sums_1d(y, atoms, weights, groups, ng, s, c.extent * rs, backend=c.backend)
        g = heat_kernel(x - y, sig, 1) * (ws * dy)
        vt = v.sum(axis=1)
        contrib = g * vt ** q
        total += float(contrib.sum())
        if with_split:
            p = cell_index((y - x) ** 2 + sig, t, c.alpha)
            for pi in np.unique(p):
                m = p == pi
                cells[int(pi)] = cells.get(int(pi), 0.0) + float(contrib[m].sum())
            near = gidx[None, :] <= (p[:, None] + 2)
            A = np.where(near, v, 0.0).sum(axis=1)
            B = vt - A
            j1 += float((g * A ** q).sum())
            j2 += float((g * np.maximum(B, 0.0) ** q).sum())
    return total, cells, j1, j2


def nonlinear_term(mu: DiscreteMeasure, params: Params, x, t: float,
                   controls: Optional[NonlinearControls] = None, check: bool = True) -> NonlinearResult:
    """``∫_{ε₀}^t ∫ G(x-y, t-s) (e^{sΔ}μ(y))^q dy ds`` with a refinement check.

    Implemented on the line (``N = 1``).
    """
    c = controls or NonlinearControls()
    if not t > 0:
        raise InvalidParameterError("t must be positive")
    if not 0 < c.eps0_rel < 1:
        raise InvalidParameterError("eps0_rel must lie in (0, 1)")
    if not 0 < c.alpha < 1:
        raise InvalidParameterError("cell geometry parameter must lie in (0, 1)")
    if mu.dim != 1:
        raise InvalidParameterError("the nonlinear-term quadrature is implemented for N = 1 only")
    e0 = c.eps0_rel * t
    xs = float(np.asarray(x, dtype=float).reshape(-1)[0])
    if len(mu) == 0 or mu.mass == 0:
        return NonlinearResult(0.0, 0.0, e0)
    fine = c.refined()
    val, cells, j1, j2 = _nonlinear_pass(mu, params.q, xs, t, fine, True)
    delta = 0.0
    if check:
        coarse, _, _, _ = _nonlinear_pass(mu, params.q, xs, t, c, False)
        delta = abs(val - coarse) / val if val > 0 else 0.0
        if delta > c.refine_tol:
            raise NonConvergedError(f"nonlinear-term quadrature changed by {delta:.3g} under refinement")
    return NonlinearResult(val, delta, e0, cells, j1, j2)


def j1_j2_split(mu: DiscreteMeasure, params: Params, x, t: float, alpha: float = 0.5,
                controls: Optional[NonlinearControls] = None) -> tuple[float, float]:
    c = controls or NonlinearControls()
    c = NonlinearControls(c.eps0_rel, alpha, c.panel_ratio, c.nodes, c.y_div, c.extent, c.refine_tol, c.backend)
    r = nonlinear_term(mu, params, x, t, c)
    return r.j1, r.j2


@dataclass(frozen=True)
class LowerSolution:
    eps: float
    heat: float
    nonlinear: float
    delta: float = 0.0

    @property
    def value(self) -> float:
        return self.heat - self.nonlinear

    def to_dict(self) -> dict:
        return {"eps": self.eps, "heat": self.heat, "nonlinear": self.nonlinear, "lower": self.value,
                "delta": self.delta}


def lower_solution(mu: DiscreteMeasure, params: Params, x, t: float,
                   controls: Optional[NonlinearControls] = None) -> LowerSolution:
    """``e^{tΔ}μ(x) - (nonlinear term)``."""
    H = heat_of_measure(mu, x, t) if len(mu) else 0.0
    nl = nonlinear_term(mu, params, x, t, controls)
    return LowerSolution(1.0, float(H), nl.value, nl.delta)


def find_epsilon(mu: DiscreteMeasure, params: Params, x, t: float,
                 controls: Optional[NonlinearControls] = None, max_halvings: int = 40) -> LowerSolution:
    """Largest ``ε = 2^{-k}`` with ``e^{tΔ}[εμ] - NL(εμ) >= ε e^{tΔ}[μ] / 2``.

    The nonlinear term is ``q``-homogeneous in the measure, so one evaluation
    serves the whole search.
    """
    base = lower_solution(mu, params, x, t, controls)
    if base.heat == 0:
        return LowerSolution(1.0, 0.0, 0.0, base.delta)
    eps = 1.0
    for _ in range(max_halvings + 1):
        h = eps * base.heat
        nl = eps ** params.q * base.nonlinear
        if h - nl >= 0.5 * h:
            return LowerSolution(eps, h, nl, base.delta)
        eps *= 0.5
    raise NonConvergedError("no admissible ε found")
