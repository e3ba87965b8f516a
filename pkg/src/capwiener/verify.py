"""Experiments comparing maximal solutions, capacitary potentials and lower bounds.

Every report lists its samples, a summary and an error budget.  The empirical
constants measured here include discretization effects; they are not the
constants of the continuous estimates and are only meaningful as regression
values.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import geometry
from .capacity import CapacityControls, capacity, quasi_additivity_ratio, relative_capacity
from .fixtures import fixture_scale
from .geometry import CompactSet
from .heat import (NonlinearControls, build_capacitary_mu, est4_check, find_epsilon, heat_of_measure,
                   nonlinear_term)
from .params import InvalidParameterError, Params
from .pde import MaximalControls, SpaceTimeGrid, maximal_solution, solve_with_measure
from .potential import w_potential


@dataclass
class RatioReport:
    """Per-sample ratios ``numerator / denominator`` with summary statistics.

    Samples whose numerator or denominator is below ``threshold`` times the
    flat solution ``((q-1)t)^{-1/(q-1)}`` are excluded and counted.
    """

    experiment: str
    fixture: dict
    samples: list = field(default_factory=list)
    threshold: float = 1e-6
    budget: dict = field(default_factory=dict)
    notes: str = ""

    @property
    def ratios(self) -> np.ndarray:
        return np.array([s["ratio"] for s in self.samples if s["ratio"] is not None])

    @property
    def excluded(self) -> int:
        return sum(1 for s in self.samples if s["ratio"] is None)

    @property
    def vacuous(self) -> bool:
        return len(self.ratios) == 0

    def summary(self) -> dict:
        r = self.ratios
        if len(r) == 0:
            return {"count": 0, "excluded": self.excluded, "vacuous": True}
        return {"count": int(len(r)), "excluded": self.excluded, "vacuous": False,
                "min": float(r.min()), "max": float(r.max()), "median": float(np.median(r)),
                "spread": float(r.max() / r.min())}

    def to_dict(self) -> dict:
        return {"id": self.experiment, "fixture": self.fixture, "samples": self.samples,
                "summary": self.summary(), "budget": self.budget, "threshold": self.threshold,
                "notes": self.notes}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "t", "numerator", "denominator", "ratio"])
        for s in self.samples:
            w.writerow([repr(s["x"]), repr(s["t"]), repr(s["numerator"]), repr(s["denominator"]),
                        "" if s["ratio"] is None else repr(s["ratio"])])
        return buf.getvalue()


def _add(report: RatioReport, params: Params, x: float, t: float, num: float, den: float):
    floor = report.threshold * params.flat_solution(t)
    ok = num > floor and den > floor
    report.samples.append({"x": float(x), "t": float(t), "numerator": float(num), "denominator": float(den),
                           "ratio": float(num / den) if ok else None})


def default_grid(F: CompactSet, T: float, outputs: Sequence[float], h_rel: float = 0.01,
                 extra: float = 0.0) -> SpaceTimeGrid:
    """Solver grid scaled with the set: ``h = h_rel * scale``, ``L >= radius + 6√T``."""
    s = fixture_scale(F)
    h = h_rel * s
    L = F.bounding_radius + extra + 6 * math.sqrt(T) + s
    L = math.ceil(L / h) * h
    return SpaceTimeGrid(L=L, h=h, T=T, dt=h, outputs=tuple(sorted(set(outputs))))


def sample_grid(F: CompactSet, T: float = 0.5, n_t: int = 5, n_d: int = 4,
                t_lo_rel: float = 0.02) -> list:
    """``(x, t)`` pairs: ``t`` log-spaced in ``[t_lo_rel, 1] * T`` and ``x`` at the
    centre of the hull of ``F``, at its right end and at log-spaced distances up
    to ``4√T`` beyond it.  All lengths scale with the set (for 1D sets)."""
    lo, hi = F.bounding_box()
    c, b = float(0.5 * (lo[0] + hi[0])), float(hi[0])
    ts = np.geomspace(t_lo_rel * T, T, n_t)
    ds = np.geomspace(0.1 * math.sqrt(T), 4 * math.sqrt(T), n_d - 1) if n_d > 1 else []
    xs = [c, b] + [b + float(d) for d in ds]
    return [(x, float(t)) for t in ts for x in xs]


def bilateral_ratio(F: CompactSet, params: Params, samples: Optional[Sequence] = None,
                    grid: Optional[SpaceTimeGrid] = None, controls: Optional[CapacityControls] = None,
                    maximal_controls: Optional[MaximalControls] = None, tail_rtol: float = 1e-10,
                    label: str = "") -> RatioReport:
    """``ū_F / W_F`` over sample points (1D sets)."""
    if params.N != 1:
        raise InvalidParameterError("bilateral ratios are computed for N = 1")
    if not params.supercritical:
        raise InvalidParameterError("bilateral ratios need q >= q_c")
    rep = RatioReport("bilateral", {"label": label, "set": F.to_dict(), "params": params.to_dict()})
    if F.is_empty():
        samples = list(samples or [(0.0, 0.1), (0.0, 0.5)])
        for x, t in samples:
            _add(rep, params, x, t, 0.0, 0.0)
        rep.notes = "empty set: vacuous"
        return rep
    samples = list(samples) if samples is not None else sample_grid(F)
    ts = sorted({t for _, t in samples})
    grid = grid or default_grid(F, max(ts), ts)
    mc = maximal_controls or MaximalControls(t_min=min(ts))
    u = maximal_solution(F, params, grid, mc)
    gaps = []
    for x, t in samples:
        W = w_potential(F, params, [x], t, controls, tail_rtol=tail_rtol)
        gaps.append(W.gap / W.total if W.total > 0 else 0.0)
        _add(rep, params, x, t, u.at(x, t), W.total)
    rep.budget = {"capacity_rel_gap_max": max(gaps) if gaps else 0.0,
                  "saturation_change": u.diagnostics.get("change", 0.0), "grid": grid.to_dict()}
    rep.notes = "measured envelope includes discretization constants"
    return rep


# ---------------------------------------------------------------------------
# lower bound


@dataclass
class LowerBoundReport:
    x: float
    t: float
    W: float
    heat: float
    eps: float
    heat_eps: float
    nonlinear_eps: float
    lower: float
    solution: float
    est4: dict
    j1: float
    j2: float
    budget: dict

    @property
    def c(self) -> float:
        return self.lower / self.W if self.W > 0 else 0.0

    @property
    def chain_holds(self) -> bool:
        tol = self.budget.get("total", 0.0)
        if self.W == 0:
            return self.solution >= -tol and self.lower <= tol
        return self.solution >= self.lower - tol * max(self.solution, 1e-300) and self.lower > 0

    def to_dict(self) -> dict:
        return {"x": self.x, "t": self.t, "W": self.W, "heat": self.heat, "eps": self.eps,
                "heat_eps": self.heat_eps, "nonlinear_eps": self.nonlinear_eps, "lower": self.lower,
                "solution": self.solution, "c": self.c, "chain_holds": self.chain_holds, "est4": self.est4,
                "j1": self.j1, "j2": self.j2, "budget": self.budget}


def lower_bound_experiment(F: CompactSet, params: Params, x: float, t: float,
                           grid: Optional[SpaceTimeGrid] = None, controls: Optional[CapacityControls] = None,
                           nl_controls: Optional[NonlinearControls] = None) -> LowerBoundReport:
    """``u_{εμ}(x,t) >= e^{tΔ}[εμ](x) - NL(εμ) >= c W_F(x,t)`` with ``μ`` the capacitary measure."""
    if params.N != 1:
        raise InvalidParameterError("the lower-bound experiment is implemented for N = 1")
    nlc = nl_controls or NonlinearControls()
    W = w_potential(F, params, [x], t, controls)
    if F.is_empty() or W.total == 0:
        return LowerBoundReport(x, t, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, {"lhs": 0.0, "rhs": 0.0},
                                0.0, 0.0, {"total": 0.0})
    built = build_capacitary_mu(F, params, [x], t, controls)
    mu = built.measure
    e4 = est4_check(F, params, [x], t, built=built)
    nl = nonlinear_term(mu, params, x, t, nlc)
    heat = heat_of_measure(mu, [x], t)
    eps = 1.0
    while heat * eps - eps ** params.q * nl.value < 0.5 * eps * heat:
        eps *= 0.5
    lower = eps * heat - eps ** params.q * nl.value
    e0 = nlc.eps0_rel * t
    if grid is None:
        span = max(abs(x) + 1.0, F.bounding_radius + abs(x))
        h = min(0.01, math.sqrt(e0) / 4)
        L = math.ceil((span + 6 * math.sqrt(t) + 1) / h) * h
        grid = SpaceTimeGrid(L=L, h=h, T=t, dt=h, outputs=(t,))
    f = solve_with_measure(mu.scaled(eps), params, grid, e0, check=False)
    u = f.at(x, t)
    fr = solve_with_measure(mu.scaled(eps), params, grid.refined(), e0, check=False)
    scheme = abs(fr.at(x, t) - u) / max(abs(fr.at(x, t)), 1e-300)
    budget = {"scheme_rel": scheme, "quadrature_rel": nl.delta * (eps ** params.q * nl.value) / max(lower, 1e-300),
              "capacity_rel_gap": W.gap / W.total}
    budget["total"] = budget["scheme_rel"] + budget["quadrature_rel"] + 1e-9
    return LowerBoundReport(float(x), float(t), W.total, float(heat), eps, eps * heat, eps ** params.q * nl.value,
                            lower, u, e4.to_dict(), nl.j1, nl.j2, budget)


# ---------------------------------------------------------------------------
# localized upper bound


def uplem_bound(params: Params, r: float, rho: float, x, t: float, rel_cap: float) -> float:
    """``(1 + r/ρ)^{N/2} t^{-N/2} e^{-(|x|-r-3ρ)²/(4t)} C^{B_{r+ρ}}(F)``."""
    N = params.N
    ax = float(np.linalg.norm(np.atleast_1d(np.asarray(x, dtype=float))))
    return (1 + r / rho) ** (N / 2) * t ** (-N / 2) * math.exp(-(ax - r - 3 * rho) ** 2 / (4 * t)) * rel_cap


def uplem_experiment(F: CompactSet, params: Params, r: float, rho: float, samples: Sequence,
                     grid: Optional[SpaceTimeGrid] = None, controls: Optional[CapacityControls] = None) -> RatioReport:
    """Ratio of ``ū_F`` to the localized bound; the maximum is the empirical constant."""
    if params.N != 1:
        raise InvalidParameterError("the localized upper bound experiment is implemented for N = 1")
    if r <= 0 or rho <= 0:
        raise InvalidParameterError("r and ρ must be positive")
    if not F.is_empty() and F.farthest(np.zeros(1)) > r * (1 + 1e-12):
        raise InvalidParameterError("F must lie in B_r")
    samples = list(samples)
    t0 = (r + 3 * rho) ** 2
    if any(t < t0 * (1 - 1e-12) for _, t in samples):
        raise InvalidParameterError(f"samples need t >= (r + 3ρ)² = {t0:g}")
    rep = RatioReport("uplem", {"set": F.to_dict(), "params": params.to_dict(), "r": r, "rho": rho})
    if F.is_empty():
        for x, t in samples:
            _add(rep, params, x, t, 0.0, 0.0)
        rep.notes = "empty set: vacuous"
        return rep
    cc = controls or CapacityControls(h=r / 64)
    rc = relative_capacity(F, (np.zeros(1), r + rho), params, cc)
    ts = sorted({t for _, t in samples})
    if grid is None:
        h = 0.01
        L = math.ceil((r + 6 * math.sqrt(max(ts)) + 2) / h) * h
        grid = SpaceTimeGrid(L=L, h=h, T=max(ts), dt=h, outputs=tuple(ts))
    u = maximal_solution(F, params, grid, MaximalControls())
    for x, t in samples:
        _add(rep, params, x, t, u.at(x, t), uplem_bound(params, r, rho, x, t, rc.value))
    rep.budget = {"relative_capacity": rc.value, "relative_capacity_gap": rc.gap,
                  "saturation_change": u.diagnostics.get("change", 0.0)}
    return rep


# ---------------------------------------------------------------------------
# capacity comparisons


def capacity_equivalence_check(F_nj: CompactSet, a, n: int, params: Params,
                               controls: Optional[CapacityControls] = None) -> tuple[float, float]:
    """``(C^{B(a, 2/√(n+1))}(F_nj), (n+1)^{N/2-1/(q-1)} C(√(n+1) F_nj))``.

    Both sides use lattices related by the dilation ``√(n+1)``.
    """
    N = params.N
    a = np.asarray(a, dtype=float).reshape(N)
    if F_nj.is_empty():
        return 0.0, 0.0
    s = math.sqrt(n + 1)
    if F_nj.farthest(a) > (1 / s) * (1 + 1e-9):
        raise InvalidParameterError("F_nj must lie in B(a, 1/√(n+1))")
    c = controls or CapacityControls()
    h = c.h if c.h is not None else 1.0 / (64 * s)
    base = CapacityControls(h=h, gap_tol=c.gap_tol, max_iter=c.max_iter, origin=tuple(a))
    lhs = relative_capacity(F_nj, (a, 2 / s), params, base).value
    scaled = CapacityControls(h=h * s, gap_tol=c.gap_tol, max_iter=c.max_iter, origin=tuple(a * s))
    rhs = (n + 1) ** params.slice_exponent * capacity(F_nj.scaled(s), params, scaled).value
    return lhs, rhs


def ring_quasi_additivity(F: CompactSet, params: Params, n: int, h: float = 1.0 / 16.0,
                          controls: Optional[CapacityControls] = None) -> dict:
    """``Σ_j C(√((n+1)/t) F_{n,j}) / C(√((n+1)/t) F_n)`` at ``(0, t_n)``.

    ``t_n = R²/(n + 1/2)`` puts a set lying near the sphere of radius ``R``
    (its farthest distance from 0) in the slice ``n``.
    """
    N = params.N
    R = F.farthest(np.zeros(N))
    t = R * R / (n + 0.5)
    cover = geometry.sphere_cover(np.zeros(N), t, n, N)
    s = math.sqrt((n + 1) / t)
    whole = geometry.slice(F, np.zeros(N), t, n).scaled(s)
    parts = [p.scaled(s) for p in cover.pieces(F)]
    parts = [p for p in parts if not p.is_empty()]
    c = controls or CapacityControls()
    c = CapacityControls(h=h, gap_tol=c.gap_tol, max_iter=c.max_iter, origin=(0.0,) * N)
    ratio = quasi_additivity_ratio(parts, whole, params, c)
    return {"n": n, "t": t, "pieces": len(parts), "cover_size": cover.count, "ratio": ratio}


# ---------------------------------------------------------------------------
# nonlinear term versus the capacity series


def capacity_series(F: CompactSet, params: Params, x, t: float,
                    controls: Optional[CapacityControls] = None) -> float:
    """``t^{-N/2} Σ (√((n+1)t))^{N-2/(q-1)} e^{-(n+1)/4} C(F_n/√((n+1)t))``."""
    W = w_potential(F, params, [x] if np.ndim(x) == 0 else x, t, controls)
    N = params.N
    return t ** (-N / 2) * math.fsum(t ** params.slice_exponent * (r.n + 1) ** params.slice_exponent
                                     * math.exp(-(r.n + 1) / 4.0) * r.capacity for r in W.terms)


def est5_experiment(F: CompactSet, params: Params, x: float, t: float, alpha: float = 0.5,
                    ks: Sequence[float] = (0.25, 1.0, 4.0), controls: Optional[CapacityControls] = None,
                    nl_controls: Optional[NonlinearControls] = None) -> dict:
    """``(J1 + J2) / S`` over the similarity family ``(F/√k, x/√k, t/k)``."""
    if params.N != 1:
        raise InvalidParameterError("the J1/J2 experiment is implemented for N = 1")
    base = nl_controls or NonlinearControls()
    nlc = NonlinearControls(base.eps0_rel, alpha, base.panel_ratio, base.nodes, base.y_div, base.extent,
                            base.refine_tol, base.backend)
    rows = []
    for k in ks:
        Fk = geometry.scale_set(F, k)
        xk, tk = x / math.sqrt(k), t / k
        S = capacity_series(Fk, params, xk, tk, controls)
        if S == 0:
            rows.append({"k": k, "J1": 0.0, "J2": 0.0, "S": 0.0, "ratio": None})
            continue
        mu = build_capacitary_mu(Fk, params, [xk], tk, controls).measure
        nl = nonlinear_term(mu, params, xk, tk, nlc)
        rows.append({"k": k, "J1": nl.j1, "J2": nl.j2, "NL": nl.value, "S": S,
                     "ratio": (nl.j1 + nl.j2) / S, "delta": nl.delta})
    rs = [r["ratio"] for r in rows if r["ratio"] is not None]
    spread = max(rs) / min(rs) - 1 if rs else 0.0
    return {"alpha": alpha, "rows": rows, "spread": spread, "vacuous": not rs}
