"""Solver for ``u_t - Δu + u^q = 0`` on ``[-L, L]`` or radially on ``B_L``.

Time stepping is Strang splitting between

* the absorption ODE ``u' = -u^q``, integrated exactly:
  ``u ↦ (u^{1-q} + (q-1)τ)^{-1/(q-1)}``;
* the semi-discrete heat flow ``u' = D u`` with homogeneous Dirichlet data,
  applied exactly through the eigenbasis of ``D`` (sine transform in 1D,
  a symmetrized finite-volume operator for radial ``N >= 2``).

Both sub-steps are positivity preserving and order preserving, so the scheme
satisfies the discrete comparison principle without any step restriction.
Steps grow geometrically from ``dt_min`` to ``dt`` and land exactly on the
requested output times.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.fft import dst, idst

from .capacity import CapacityControls, NonConvergedError
from .geometry import BallUnion, CompactSet, PointSet, UnsupportedSetError
from .heat import build_capacitary_mu, heat_of_measure
from .measure import DiscreteMeasure
from .params import InvalidParameterError, Params


@dataclass(frozen=True)
class SpaceTimeGrid:
    """Spatial lattice and time-step controls.

    ``N = 1``: nodes ``-L, -L+h, ..., L``.  ``N >= 2``: radial nodes ``0, h, ..., L``.
    The outer boundary carries ``u = 0``.  ``outputs`` are the stored times; when
    empty, ``n_out`` equally spaced times up to ``T`` are used.
    """

    L: float
    h: float
    T: float
    dt: float
    N: int = 1
    dt_min: Optional[float] = None
    growth: float = 1.1
    outputs: tuple = ()
    n_out: int = 20
    scheme: str = "strang-exact"

    def __post_init__(self):
        if not (self.L > 0 and self.h > 0 and self.T > 0 and self.dt > 0):
            raise InvalidParameterError("grid lengths and steps must be positive")
        if self.dt > self.h * (1 + 1e-12):
            raise InvalidParameterError(f"time step {self.dt} exceeds the spacing {self.h}")
        if abs(self.L / self.h - round(self.L / self.h)) > 1e-8:
            raise InvalidParameterError("L must be a multiple of h")
        if self.scheme != "strang-exact":
            raise InvalidParameterError(f"unknown scheme {self.scheme!r}")
        if int(self.N) != self.N or self.N < 1:
            raise InvalidParameterError("N must be a positive integer")
        if not self.growth >= 1:
            raise InvalidParameterError("step growth factor must be >= 1")

    @property
    def radial(self) -> bool:
        return self.N >= 2

    @property
    def nodes(self) -> np.ndarray:
        m = int(round(self.L / self.h))
        if self.radial:
            return self.h * np.arange(m + 1)
        return self.h * np.arange(-m, m + 1)

    @property
    def first_step(self) -> float:
        return self.dt_min if self.dt_min is not None else min(self.dt, self.h * self.h / 8.0)

    def output_times(self, t0: float = 0.0) -> np.ndarray:
        if self.outputs:
            out = np.unique(np.asarray(self.outputs, dtype=float))
        else:
            out = self.T * np.arange(1, self.n_out + 1) / self.n_out
        if np.any(out <= 0) or np.any(out > self.T * (1 + 1e-12)):
            raise InvalidParameterError("output times must lie in (0, T]")
        out = out[out > t0]
        if len(out) == 0:
            raise InvalidParameterError(f"no output time after the start time {t0}")
        return out

    def domain_ok(self, F: CompactSet) -> bool:
        """``L >= diam(F) + 6√T`` (boundary influence negligible)."""
        return self.L >= F.diameter + 6 * math.sqrt(self.T)

    def refined(self) -> "SpaceTimeGrid":
        return SpaceTimeGrid(self.L, self.h / 2, self.T, self.dt / 2, self.N,
                             None if self.dt_min is None else self.dt_min / 4, self.growth,
                             self.outputs, self.n_out)

    def to_dict(self) -> dict:
        return {"L": self.L, "h": self.h, "T": self.T, "dt": self.dt, "N": self.N,
                "dt_min": self.dt_min, "growth": self.growth, "outputs": list(self.outputs),
                "n_out": self.n_out, "scheme": self.scheme}

    @classmethod
    def from_dict(cls, d: dict) -> "SpaceTimeGrid":
        try:
            return cls(L=float(d["L"]), h=float(d["h"]), T=float(d["T"]), dt=float(d["dt"]),
                       N=int(d.get("N", 1)), dt_min=d.get("dt_min"), growth=float(d.get("growth", 1.1)),
                       outputs=tuple(d.get("outputs", ())), n_out=int(d.get("n_out", 20)),
                       scheme=d.get("scheme", "strang-exact"))
        except KeyError as exc:
            raise InvalidParameterError(f"grid is missing field {exc.args[0]!r}") from None


@dataclass
class Field:
    """Stored solution values ``u[i, j] = u(x_j, t_i)`` plus step-level history.

    ``history`` holds, at every time step, ``(t, ∫u, ∫u^q)``.
    """

    grid: SpaceTimeGrid
    times: np.ndarray
    u: np.ndarray
    q: float
    description: str = ""
    history: Optional[np.ndarray] = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def x(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def N(self) -> int:
        return self.grid.N

    def time_index(self, t: float) -> int:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > 1e-9 * max(1.0, abs(t)):
            raise InvalidParameterError(f"time {t} is not a stored output time")
        return i

    def at(self, x, t: float):
        """Value at position ``x`` (or radius, for radial grids) and stored time ``t``."""
        row = self.u[self.time_index(t)]
        xs = np.abs(np.asarray(x, dtype=float)) if self.grid.radial else np.asarray(x, dtype=float)
        out = np.interp(xs, self.x, row)
        return float(out) if np.ndim(out) == 0 else out

    def weights(self) -> np.ndarray:
        """Quadrature weights for ``∫ u dx`` (trapezoid; radial shells for ``N >= 2``)."""
        return _volume_weights(self.grid)

    def mass(self, t: float) -> float:
        return float(self.weights() @ self.u[self.time_index(t)])

    def summary(self) -> dict:
        return {"description": self.description, "q": self.q, "grid": self.grid.to_dict(),
                "times": self.times.tolist(), "max": [float(v) for v in self.u.max(axis=1)],
                "min": [float(v) for v in self.u.min(axis=1)],
                "mass": [float(self.weights() @ r) for r in self.u],
                "diagnostics": self.diagnostics}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "x", "u"])
        for i, t in enumerate(self.times):
            for xv, uv in zip(self.x, self.u[i]):
                w.writerow([repr(float(t)), repr(float(xv)), repr(float(uv))])
        return buf.getvalue()


def _volume_weights(grid: SpaceTimeGrid) -> np.ndarray:
    x = grid.nodes
    h = grid.h
    if not grid.radial:
        w = np.full(len(x), h)
        w[0] = w[-1] = h / 2
        return w
    N = grid.N
    area = 2 * math.pi ** (N / 2) / math.gamma(N / 2)
    lo = np.maximum(x - h / 2, 0.0)
    hi = np.minimum(x + h / 2, x[-1])
    return area * (hi ** N - lo ** N) / N


class _Diffusion:
    """Exact propagator ``exp(τ D)`` of the discrete Dirichlet Laplacian."""

    def __init__(self, grid: SpaceTimeGrid):
        self.grid = grid
        h = grid.h
        x = grid.nodes
        if not grid.radial:
            m = len(x) - 2
            k = np.arange(1, m + 1)
            self.lam = -(4.0 / h ** 2) * np.sin(k * math.pi / (2 * (m + 1))) ** 2
            return
        N = grid.N
        r = x[:-1]                                   # unknowns; x[-1] = L is the Dirichlet node
        m = len(r)
        vol = np.empty(m)
        vol[0] = (h / 2) ** N / N
        vol[1:] = ((r[1:] + h / 2) ** N - (r[1:] - h / 2) ** N) / N
        area = (r + h / 2) ** (N - 1)                # faces i+1/2
        A = np.zeros((m, m))
        for i in range(m):
            A[i, i] -= area[i] / h
            if i + 1 < m:
                A[i, i + 1] += area[i] / h
            if i > 0:
                A[i, i] -= area[i - 1] / h
                A[i, i - 1] += area[i - 1] / h
        sq = np.sqrt(vol)
        S = A / sq[:, None] / sq[None, :]
        S = 0.5 * (S + S.T)
        self.lam, self.Q = np.linalg.eigh(S)
        self.sq = sq

    def apply(self, u: np.ndarray, tau: float) -> np.ndarray:
        out = np.zeros_like(u)
        if not self.grid.radial:
            c = dst(u[1:-1], type=1)
            out[1:-1] = idst(c * np.exp(tau * self.lam), type=1)
        else:
            c = self.Q.T @ (self.sq * u[:-1])
            out[:-1] = (self.Q @ (np.exp(tau * self.lam) * c)) / self.sq
        np.maximum(out, 0.0, out=out)
        return out


def _react(u: np.ndarray, q: float, tau: float) -> np.ndarray:
    with np.errstate(divide="ignore", over="ignore"):
        z = np.where(u > 0, u ** (1.0 - q), np.inf)
        return np.where(u > 0, (z + (q - 1.0) * tau) ** (-1.0 / (q - 1.0)), 0.0)


def solve_semilinear(initial, params: Params, grid: SpaceTimeGrid, t0: float = 0.0,
                     absorption: bool = True, description: str = "") -> Field:
    """March from ``u(·, t0) = initial`` to every output time of ``grid``.

    ``initial`` holds nodal values (boundary values are replaced by 0).  With
    ``absorption=False`` the linear heat equation is solved instead.
    """
    if grid.N != params.N:
        raise InvalidParameterError(f"grid dimension {grid.N} does not match N={params.N}")
    u = np.array(initial, dtype=float).reshape(-1)
    x = grid.nodes
    if u.shape != x.shape:
        raise InvalidParameterError(f"initial data has {u.size} values, grid has {x.size} nodes")
    if np.any(u < 0) or np.any(np.isnan(u)):
        raise InvalidParameterError("initial data must be nonnegative")
    u[-1] = 0.0
    if not grid.radial:
        u[0] = 0.0
    q = params.q
    diff = _Diffusion(grid)
    w = _volume_weights(grid)
    outs = grid.output_times(t0)
    stored = np.empty((len(outs), len(u)))
    hist = [(t0, float(w @ u), float(w @ u ** q) if absorption else 0.0)]
    t = t0
    step = grid.first_step
    j = 0
    while j < len(outs):
        target = outs[j]
        tau = min(step, grid.dt, target - t)
        if target - t - tau < 1e-12 * max(1.0, target):
            tau = target - t
        if absorption:
            u = _react(u, q, tau / 2)
        u = diff.apply(u, tau)
        if absorption:
            u = _react(u, q, tau / 2)
        t = target if tau == target - t else t + tau
        hist.append((t, float(w @ u), float(w @ u ** q) if absorption else 0.0))
        if t == target:
            stored[j] = u
            j += 1
        step = min(step * grid.growth, grid.dt)
    return Field(grid, outs, stored, q, description, np.array(hist))


# ---------------------------------------------------------------------------
# maximal solutions


@dataclass(frozen=True)
class MaximalControls:
    """k-doubling exhaustion: data ``k 1_{F_h}``, ``k = k0, 2 k0, ...``."""

    k0: float = 10.0
    max_doublings: int = 20
    tol: float = 1e-3
    t_min: Optional[float] = None

    def to_dict(self) -> dict:
        return {"k0": self.k0, "max_doublings": self.max_doublings, "tol": self.tol, "t_min": self.t_min}

    @classmethod
    def from_dict(cls, d: Optional[dict]) -> "MaximalControls":
        d = dict(d or {})
        return cls(**{k: d[k] for k in ("k0", "max_doublings", "tol", "t_min") if k in d})


class SaturationError(NonConvergedError):
    def __init__(self, msg, fields=()):
        super().__init__(msg)
        self.fields = tuple(fields)


def _radial_ok(F: CompactSet) -> bool:
    if isinstance(F, PointSet):
        return len(F.points) == 0 or (len(F.points) == 1 and not np.any(F.points))
    if isinstance(F, BallUnion):
        return all(not np.any(c) for c in F.centers)
    return False


def fattened_indicator(F: CompactSet, grid: SpaceTimeGrid) -> np.ndarray:
    """``1`` at nodes within distance ``h`` of ``F`` (interior nodes only)."""
    x = grid.nodes
    if F.is_empty():
        return np.zeros(len(x))
    if grid.radial:
        if not _radial_ok(F):
            raise UnsupportedSetError("radial solves need a set that is radially symmetric about 0")
        pts = np.zeros((len(x), grid.N))
        pts[:, 0] = x
    else:
        pts = x.reshape(-1, 1)
    ind = (F.distance(pts) <= grid.h * (1 + 1e-9)).astype(float)
    ind[-1] = 0.0
    if not grid.radial:
        ind[0] = 0.0
    return ind


def _relative_change(a: np.ndarray, b: np.ndarray, times: np.ndarray, t_min: float) -> float:
    sel = times >= t_min
    if not sel.any():
        return 0.0
    num = np.abs(a[sel] - b[sel]).max(axis=1)
    den = np.abs(b[sel]).max(axis=1)
    r = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
    return float(r.max())


def maximal_solution(F: CompactSet, params: Params, grid: SpaceTimeGrid,
                     controls: Optional[MaximalControls] = None) -> Field:
    """Limit of the solutions with data ``k 1_{F_h}`` as ``k`` doubles.

    Saturation is measured, for each output time ``t >= t_min``, by
    ``max_x |u_{2k} - u_k| / max_x u_{2k}``.
    """
    c = controls or MaximalControls()
    t_min = c.t_min if c.t_min is not None else 4 * grid.h ** 2
    ind = fattened_indicator(F, grid)
    if not ind.any():
        outs = grid.output_times()
        f = Field(grid, outs, np.zeros((len(outs), len(grid.nodes))), params.q, "maximal solution (empty set)")
        f.diagnostics = {"k": 0.0, "change": 0.0, "t_min": t_min}
        return f
    k = c.k0
    prev = solve_semilinear(k * ind, params, grid, description=f"k={k:g}")
    change = math.inf
    for _ in range(c.max_doublings):
        k *= 2
        cur = solve_semilinear(k * ind, params, grid, description=f"k={k:g}")
        change = _relative_change(cur.u, prev.u, cur.times, t_min)
        if change < c.tol:
            cur.description = "maximal solution"
            cur.diagnostics = {"k": k, "change": change, "t_min": t_min}
            return cur
        prev = cur
    raise SaturationError(f"no saturation after {c.max_doublings} doublings (last change {change:.3g})",
                          (prev, cur))


# ---------------------------------------------------------------------------
# measure data


def measure_initial_layer(mu: DiscreteMeasure, grid: SpaceTimeGrid, eps0: float) -> np.ndarray:
    x = grid.nodes
    if len(mu) == 0:
        return np.zeros(len(x))
    if grid.radial:
        pts = np.zeros((len(x), grid.N))
        pts[:, 0] = x
    else:
        pts = x.reshape(-1, 1)
    v = heat_of_measure(mu, pts, eps0)
    v = np.asarray(v, dtype=float).reshape(-1)
    v[-1] = 0.0
    if not grid.radial:
        v[0] = 0.0
    return v


def solve_with_measure(mu: DiscreteMeasure, params: Params, grid: SpaceTimeGrid, eps0: float,
                       check: bool = True, tol: float = 0.01, t_min: Optional[float] = None,
                       absorption: bool = True) -> Field:
    """Solution with initial trace ``μ``, started at ``ε₀`` from ``e^{ε₀Δ}μ``.

    Times in the returned field are measured from the trace (``t = 0``).  With
    ``check`` the run is repeated with ``ε₀/2``; the relative change at stored
    times ``>= t_min`` is kept in ``diagnostics['eps0_change']`` and must be
    below ``tol``.  For ``N >= 2`` the measure is evaluated along the first axis,
    so it should be radially symmetric.
    """
    if not eps0 > 0:
        raise InvalidParameterError("ε₀ must be positive")
    if mu.dim != params.N:
        raise InvalidParameterError("measure dimension does not match N")
    if len(mu) and np.abs(mu.atoms).max() >= grid.L:
        raise InvalidParameterError("measure atoms must lie inside the domain")
    u0 = measure_initial_layer(mu, grid, eps0)
    f = solve_semilinear(u0, params, grid, t0=eps0, absorption=absorption, description="measure data")
    f.diagnostics = {"eps0": eps0}
    if check and len(mu):
        g = solve_semilinear(measure_initial_layer(mu, grid, eps0 / 2), params, grid, t0=eps0 / 2,
                             absorption=absorption)
        tm = t_min if t_min is not None else max(4 * grid.h ** 2, 2 * eps0)
        change = _relative_change(f.u, g.u, f.times, tm)
        f.diagnostics["eps0_change"] = change
        if change > tol:
            raise NonConvergedError(f"halving ε₀ changed the solution by {change:.3g} (> {tol:g})")
    return f


def mass_balance_residual(field: Field, t1: float, t2: float) -> float:
    """``|∫u(t2) + ∫_{t1}^{t2} ∫u^q - ∫u(t1)| / ∫u(t1)`` from the step history.

    Time integrals use the trapezoidal rule on the step sequence.
    """
    if not t1 < t2:
        raise InvalidParameterError("need t1 < t2")
    h = field.history
    t, m, a = h[:, 0], h[:, 1], h[:, 2]
    i1 = int(np.argmin(np.abs(t - t1)))
    i2 = int(np.argmin(np.abs(t - t2)))
    if abs(t[i1] - t1) > 1e-9 * max(1, t1) or abs(t[i2] - t2) > 1e-9 * max(1, t2):
        raise InvalidParameterError("t1 and t2 must be stored output times")
    if m[i1] == 0:
        return 0.0
    seg = slice(i1, i2 + 1)
    absorbed = float(np.sum(0.5 * (a[seg][1:] + a[seg][:-1]) * np.diff(t[seg])))
    return abs(m[i2] + absorbed - m[i1]) / m[i1]


def monotone_measure_sequence(F: CompactSet, params: Params, grid: SpaceTimeGrid, n_steps: int,
                              x=0.0, t: float = 1.0, m0: float = 1.0, eps0: float = 1e-3,
                              capacity_controls: Optional[CapacityControls] = None) -> list:
    """Solutions for ``2^j m0 μ``, ``j = 0..n_steps-1``, with ``μ`` the capacitary measure at ``(x, t)``."""
    if not params.supercritical:
        raise InvalidParameterError("the capacitary measure needs q >= q_c")
    if n_steps < 1:
        raise InvalidParameterError("n_steps must be >= 1")
    mu = build_capacitary_mu(F, params, np.full(params.N, float(np.asarray(x).reshape(-1)[0])) if params.N > 1
                             else [float(np.asarray(x).reshape(-1)[0])], t, capacity_controls).measure
    out = []
    for j in range(n_steps):
        f = solve_with_measure(mu.scaled(m0 * 2 ** j), params, grid, eps0, check=False)
        f.description = f"measure multiplier {m0 * 2 ** j:g}"
        out.append(f)
    return out
