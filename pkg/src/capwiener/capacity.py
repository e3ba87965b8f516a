"""Bessel kernels and Bessel capacities ``C_{α,p}`` of compact sets.

The capacity of ``K`` is ``inf { ∫ f^p : f >= 0, G_α * f >= 1 on K }``.  It is
discretized on a lattice ``origin + h Z^N``: the density lives on lattice cells,
the constraints on the lattice points returned by :func:`geometry.discretize`.
The solver maximizes the concave dual

    D(ν) = p Σν - (p - 1) Σ_cells h^N (G * ν)^{p'},      ν >= 0,

by accelerated projected gradient ascent.  Any ``ν`` yields the certified lower
bound ``ν(K)^p / ||G*ν||_{p'}^{p'(p-1)}`` and the rescaled density
``(G*ν)^{p'-1}`` yields a feasible primal point, so every result carries a
duality gap.  The returned measure is the dual iterate scaled so that its mass
equals the lower bound; it is the (discrete) capacitary measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy import fft as sfft
from scipy.interpolate import CubicSpline
from scipy.special import gamma, gammainc

from .geometry import CompactSet, discretize, lattice_box
from .measure import DiscreteMeasure
from .params import InvalidParameterError, Params


class QuadratureError(RuntimeError):
    pass


class NonConvergedError(RuntimeError):
    """Iteration cap reached with the duality gap above tolerance."""

    def __init__(self, msg, result=None):
        super().__init__(msg)
        self.result = result


class InconsistentCapacityError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Bessel kernel

_R_MIN, _R_MAX, _N_TABLE = 1e-7, 60.0, 1600


class BesselKernel:
    """Radial Bessel kernel ``G_α`` on ``R^N`` normalized to unit integral.

    ``G_α(r) ∝ ∫_0^∞ s^{(α-N)/2 - 1} exp(-s - r²/(4s)) ds``, evaluated by the
    trapezoidal rule in ``log s`` (the integrand decays doubly exponentially at
    both ends, so the rule converges geometrically in the node spacing ``du``).
    """

    def __init__(self, alpha: float, N: int, du: float = 0.02):
        if not 0.0 < alpha <= 2.0:
            raise InvalidParameterError(f"Bessel order must lie in (0, 2], got {alpha}")
        if int(N) != N or N < 1:
            raise InvalidParameterError(f"dimension must be a positive integer, got {N}")
        self.alpha = float(alpha)
        self.N = int(N)
        self.du = float(du)
        self.nu = (self.alpha - self.N) / 2.0
        self.const = (4 * math.pi) ** (-self.N / 2) / gamma(self.alpha / 2)
        self._tables = None
        self._norm = None

    # -- raw quadrature --------------------------------------------------
    def _integral(self, r: np.ndarray, du: float) -> np.ndarray:
        r = np.atleast_1d(np.asarray(r, dtype=float))
        rpos = np.maximum(r, 1e-300)
        lo = np.log(rpos * rpos / 4.0) - 7.0
        hi = np.maximum(np.log(np.maximum(rpos, 1.0)) + 4.0, 5.0)
        out = np.empty_like(r)
        # one shared node set per chunk keeps this vectorized
        u0, u1 = float(lo.min()), float(hi.max())
        if self.nu < 0 and np.any(r == 0):
            raise QuadratureError("kernel is singular at r = 0 for α <= N")
        u = np.arange(u0, u1 + du, du)
        for s in range(0, len(r), 256):
            rr = r[s:s + 256, None]
            f = np.exp(self.nu * u[None, :] - np.exp(u)[None, :] - rr * rr * np.exp(-u)[None, :] / 4.0)
            out[s:s + 256] = f.sum(axis=1) * du
        return out

    def quadrature(self, r, du: Optional[float] = None, check: bool = True) -> np.ndarray:
        """Kernel values by direct quadrature (no tables)."""
        du = self.du if du is None else du
        v = self._integral(r, du)
        if check:
            v2 = self._integral(r, 2 * du)
            rel = np.max(np.abs(v - v2) / np.maximum(np.abs(v), 1e-300))
            if rel > 1e-9:
                n = int(round(1.0 / du))
                raise QuadratureError(
                    f"kernel quadrature not converged (rel change {rel:.2e}, {n} nodes per unit log-time)")
        return self.const * v * self.normalization

    # -- tables ------------------------------------------------------------
    def _raw_ball_mass(self, r: np.ndarray, du: float) -> np.ndarray:
        # ∫_{B_r} G = (1/Γ(α/2)) ∫ e^{(α/2)w - e^w} P(N/2, r² e^{-w} / 4) dw
        a2 = self.alpha / 2.0
        r = np.atleast_1d(np.asarray(r, dtype=float))
        w_lo = math.log(min(float(r.min()), _R_MIN) ** 2 / 4.0) - math.log(80.0) - 1.0
        w = np.arange(w_lo, 6.0 + du, du)
        out = np.empty_like(r)
        for s in range(0, len(r), 256):
            rr = r[s:s + 256, None]
            x = rr * rr * np.exp(-w)[None, :] / 4.0
            f = np.exp(a2 * w - np.exp(w))[None, :] * gammainc(self.N / 2.0, x)
            body = (f.sum(axis=1) - 0.5 * (f[:, 0] + f[:, -1])) * du
            # below w_lo the regularized gamma is 1 to machine precision
            tail = math.exp(a2 * w_lo) / a2 - math.exp((a2 + 1) * w_lo) / (a2 + 1)
            out[s:s + 256] = body + tail * f[:, 0] / math.exp(a2 * w_lo - math.exp(w_lo))
        return out / gamma(a2)

    @property
    def normalization(self) -> float:
        """Factor making the total integral exactly one on the computed tables."""
        if self._norm is None:
            self._norm = 1.0 / float(self._raw_ball_mass(np.array([_R_MAX]), self.du)[0])
        return self._norm

    def _build(self):
        r = np.geomspace(_R_MIN, _R_MAX, _N_TABLE)
        g = self.const * self._integral(r, self.du) * self.normalization
        m = self._raw_ball_mass(r, self.du) * self.normalization
        lr = np.log(r)
        self._tables = (lr, CubicSpline(lr, np.log(g)), CubicSpline(lr, np.log(m)), g, m)

    @property
    def total_mass(self) -> float:
        """Numerical ``∫_{R^N} G_α`` before normalization (should be ~1)."""
        return 1.0 / self.normalization

    def __call__(self, r) -> np.ndarray:
        if self._tables is None:
            self._build()
        lr_tab, gs, _, g, _ = self._tables
        r = np.asarray(r, dtype=float)
        out = np.empty(r.shape)
        flat = r.reshape(-1)
        o = out.reshape(-1)
        lo = flat < _R_MIN
        hi = flat > _R_MAX
        mid = ~(lo | hi)
        o[mid] = np.exp(gs(np.log(flat[mid])))
        if np.any(lo):
            slope = float(gs(lr_tab[0], 1))
            rr = np.maximum(flat[lo], 1e-300)
            o[lo] = g[0] * np.exp(slope * (np.log(rr) - lr_tab[0]))
        if np.any(hi):
            o[hi] = g[-1] * np.exp(-(flat[hi] - _R_MAX))
        return out

    def ball_mass(self, r) -> np.ndarray:
        """``∫_{B_r} G_α``."""
        if self._tables is None:
            self._build()
        lr_tab, _, ms, _, m = self._tables
        r = np.asarray(r, dtype=float)
        out = np.empty(r.shape)
        flat = r.reshape(-1)
        o = out.reshape(-1)
        lo = flat < _R_MIN
        hi = flat > _R_MAX
        mid = ~(lo | hi)
        o[mid] = np.exp(ms(np.log(flat[mid])))
        o[lo] = m[0] * (np.maximum(flat[lo], 0.0) / _R_MIN) ** min(self.alpha, self.N)
        o[hi] = 1.0
        return out


@lru_cache(maxsize=32)
def get_kernel(alpha: float, N: int) -> BesselKernel:
    return BesselKernel(alpha, N)


def bessel_kernel_eval(kernel: BesselKernel, r: float) -> float:
    """Single kernel value by direct quadrature with a convergence check."""
    if r < 0:
        raise InvalidParameterError("radius must be non-negative")
    return float(kernel.quadrature(np.array([r]))[0])


@lru_cache(maxsize=64)
def _cell_table(alpha: float, N: int, h: float, extent: int) -> np.ndarray:
    """Integrals of ``G_α`` over lattice cells at integer offsets ``[-extent, extent]^N``.

    Entry ``d`` is ``∫_{cell(d h)} G_α(z) dz`` with ``cell(c)`` the cube of side ``h``
    centred at ``c``.  Exact (to table accuracy) in one dimension; in higher
    dimension the centre cell uses the ball of equal volume and the other near
    cells a sub-cell midpoint rule.
    """
    ker = get_kernel(alpha, N)
    d = np.arange(-extent, extent + 1, dtype=float)
    if N == 1:
        def S(x):
            return np.sign(x) * ker.ball_mass(np.abs(x)) / 2.0
        return S((d + 0.5) * h) - S((d - 0.5) * h)
    grids = np.meshgrid(*([d] * N), indexing="ij")
    rad = np.sqrt(sum(g * g for g in grids)) * h
    table = ker(np.where(rad > 0, rad, 1.0)) * h ** N
    c = (extent,) * N
    rho = h * (math.gamma(N / 2 + 1) / math.pi ** (N / 2)) ** (1.0 / N)
    table[c] = float(ker.ball_mass(np.array([rho]))[0])
    sub = 6
    off = (np.arange(sub) + 0.5) / sub - 0.5
    sub_pts = np.stack(np.meshgrid(*([off] * N), indexing="ij"), axis=-1).reshape(-1, N)
    near = range(-2, 3)
    for idx in np.stack(np.meshgrid(*([np.array(list(near))] * N), indexing="ij"), -1).reshape(-1, N):
        if not np.any(idx):
            continue
        if np.any(np.abs(idx) > extent):
            continue
        r = np.linalg.norm((idx[None, :] + sub_pts) * h, axis=1)
        table[tuple(idx + extent)] = float(ker(r).sum()) * (h / sub) ** N
    return table


# ---------------------------------------------------------------------------
# problems and results


@dataclass(frozen=True)
class CapacityControls:
    """Discretization and solver settings.

    ``h`` is the lattice spacing; when ``None`` it is ``h_rel`` times the
    diameter of the constraint set (or ``h_rel`` for a single point).  ``margin``
    is how far (in kernel units) the density grid extends beyond the set for
    whole-space capacities.  ``gap_tol`` is relative to the primal value.
    """

    h: Optional[float] = None
    h_rel: float = 1.0 / 64.0
    margin: Optional[float] = None
    gap_tol: float = 1e-3
    max_iter: int = 20000
    origin: Optional[tuple] = None
    dense_limit: int = 4_000_000

    def spacing_for(self, F: CompactSet) -> float:
        if self.h is not None:
            return float(self.h)
        d = F.diameter
        return self.h_rel * d if d > 0 else self.h_rel

    def margin_for(self, N: int) -> float:
        if self.margin is not None:
            return float(self.margin)
        return 4.0 if N == 1 else 3.0

    def to_dict(self) -> dict:
        d = {"h": self.h, "h_rel": self.h_rel, "margin": self.margin, "gap_tol": self.gap_tol,
             "max_iter": self.max_iter}
        if self.origin is not None:
            d["origin"] = list(self.origin)
        return d

    @classmethod
    def from_dict(cls, d: Optional[dict]) -> "CapacityControls":
        if not d:
            return cls()
        kw = {k: d[k] for k in ("h", "h_rel", "margin", "gap_tol", "max_iter") if k in d}
        if d.get("origin") is not None:
            kw["origin"] = tuple(d["origin"])
        return cls(**kw)


@dataclass
class CapacityProblem:
    """Constraint points, density grid and exponents of one discrete capacity."""

    constraints: np.ndarray
    h: float
    origin: np.ndarray
    alpha: float
    p: float
    grid_lo: np.ndarray          # integer lattice index of the first density cell per axis
    grid_shape: tuple
    ball: Optional[tuple] = None  # (center, radius) for relative capacities
    gap_tol: float = 1e-3
    max_iter: int = 20000
    dense_limit: int = 4_000_000

    @property
    def N(self) -> int:
        return self.constraints.shape[1]

    def grid_points(self) -> np.ndarray:
        axes = [self.origin[i] + self.h * (self.grid_lo[i] + np.arange(self.grid_shape[i]))
                for i in range(self.N)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.N)

    def mask(self) -> Optional[np.ndarray]:
        if self.ball is None:
            return None
        c, r = self.ball
        pts = self.grid_points()
        return (np.linalg.norm(pts - np.asarray(c), axis=1) <= r * (1 + 1e-12)).reshape(self.grid_shape)


@dataclass
class CapacityResult:
    """Outcome of a capacity solve.

    ``value`` is the objective of a feasible density (an upper bound for the
    discrete capacity); ``dual_bound`` is the certified lower bound and equals
    the mass of ``measure``.
    """

    value: float
    dual_bound: float
    iterations: int
    h: float
    measure: DiscreteMeasure
    density: Optional[np.ndarray] = None
    grid_points: Optional[np.ndarray] = None
    min_potential: float = 1.0
    constraints: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def gap(self) -> float:
        return max(self.value - self.dual_bound, 0.0)

    @property
    def rel_gap(self) -> float:
        return self.gap / self.value if self.value > 0 else 0.0

    def to_dict(self, with_density: bool = False) -> dict:
        d = {"value": self.value, "dual_bound": self.dual_bound, "gap": self.gap,
             "iterations": self.iterations, "h": self.h, "measure": self.measure.to_dict()}
        if with_density and self.density is not None:
            d["density"] = self.density.tolist()
            d["grid_points"] = self.grid_points.tolist()
        return d


def _empty_result(N: int, h: float) -> CapacityResult:
    return CapacityResult(0.0, 0.0, 0, h, DiscreteMeasure.empty(N, "ν"))


# ---------------------------------------------------------------------------
# discrete operators


class _DenseOp:
    def __init__(self, K: np.ndarray, w: float, mask: Optional[np.ndarray]):
        if mask is not None:
            K = K[:, mask.reshape(-1)]
        self.K = K
        self.w = w
        self.cols = None if mask is None else np.flatnonzero(mask.reshape(-1))
        self.size = mask.size if mask is not None else K.shape[1]

    def forward(self, f):          # (K f) at constraints
        return self.K @ f

    def potential(self, nu):       # (G * ν) on active cells
        return (nu @ self.K) / self.w

    def expand(self, f):
        if self.cols is None:
            return f
        out = np.zeros(self.size)
        out[self.cols] = f
        return out


class _FFTOp:
    def __init__(self, table: np.ndarray, extent: int, shape: tuple, cidx: np.ndarray,
                 w: float, mask: Optional[np.ndarray]):
        self.shape = shape
        self.N = len(shape)
        self.full = tuple(2 * s for s in shape)
        # kernel on offsets [-(s-1), s-1], circularly wrapped
        ker = np.zeros(self.full)
        sl_src = tuple(slice(extent - (s - 1), extent + s) for s in shape)
        sub = table[sl_src]
        for corner in np.ndindex(*([2] * self.N)):
            src, dst = [], []
            for ax, c in enumerate(corner):
                s = shape[ax]
                if c == 0:
                    src.append(slice(s - 1, 2 * s - 1))
                    dst.append(slice(0, s))
                else:
                    src.append(slice(0, s - 1))
                    dst.append(slice(self.full[ax] - (s - 1), self.full[ax]))
            ker[tuple(dst)] = sub[tuple(src)]
        self.kf = sfft.rfftn(ker)
        self.cidx = tuple(cidx.T)
        self.w = w
        self.mask = None if mask is None else mask.astype(float)

    def _conv(self, arr):
        out = sfft.irfftn(sfft.rfftn(arr, self.full) * self.kf, self.full)
        return out[tuple(slice(0, s) for s in self.shape)]

    def forward(self, f):
        arr = f.reshape(self.shape)
        return self._conv(arr)[self.cidx]

    def potential(self, nu):
        arr = np.zeros(self.shape)
        np.add.at(arr, self.cidx, nu)
        pot = self._conv(arr)
        if self.mask is not None:
            pot = pot * self.mask
        return np.maximum(pot.reshape(-1), 0.0) / self.w

    def expand(self, f):
        return f


def _build_operator(prob: CapacityProblem):
    h, N = prob.h, prob.N
    w = h ** N
    k = np.rint((prob.constraints - prob.origin) / h).astype(np.int64)
    cidx = k - prob.grid_lo[None, :]
    shape = prob.grid_shape
    mask = prob.mask()
    extent = int(max(shape)) - 1
    table = _cell_table(prob.alpha, N, float(h), extent)
    m, M = len(k), int(np.prod(shape))
    if m * M <= prob.dense_limit:
        axes = [np.arange(s) for s in shape]
        cells = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, N)
        off = cells[None, :, :] - cidx[:, None, :] + extent
        K = table[tuple(off[..., i] for i in range(N))]
        return _DenseOp(K, w, mask)
    return _FFTOp(table, extent, shape, cidx, w, mask)


def _bounds(op, nu, p, pc, w):
    pot = op.potential(nu)
    E = w * float(np.sum(pot ** pc))
    mass = float(nu.sum())
    f = pot ** (pc - 1.0)
    Kf = op.forward(f)
    kmin = float(Kf.min())
    lower = mass ** p / E ** (p - 1.0) if E > 0 else 0.0
    upper = w * float(np.sum(f ** p)) / kmin ** p if kmin > 0 else math.inf
    return lower, upper, pot, f, Kf, mass, E


def _converged(lower: float, upper: float, tol: float) -> bool:
    return math.isfinite(upper) and upper - lower <= tol * upper


def solve_capacity_problem(prob: CapacityProblem) -> CapacityResult:
    """Accelerated projected gradient ascent on the dual with certified bounds."""
    N, h = prob.N, prob.h
    m = len(prob.constraints)
    if m == 0:
        return _empty_result(N, h)
    p = prob.p
    pc = p / (p - 1.0)
    w = h ** N
    op = _build_operator(prob)

    def dual(nu):
        pot = op.potential(nu)
        return p * nu.sum() - (p - 1.0) * w * np.sum(pot ** pc), pot

    def optimal_scale(nu):
        pot = op.potential(nu)
        E = w * np.sum(pot ** pc)
        return nu * (nu.sum() / E) ** (p - 1.0)

    x = optimal_scale(np.full(m, 1.0 / m))
    # step from a power-method estimate of the dual Hessian norm at the start
    pot0 = op.potential(x)
    wgt = p * (pc - 1.0) * np.maximum(pot0, 1e-12 * pot0.max()) ** (pc - 2.0)
    v = np.ones(m) / math.sqrt(m)
    lam = 1.0
    for _ in range(12):
        hv = op.forward(wgt * op.potential(v))
        lam = float(np.linalg.norm(hv))
        if lam == 0:
            break
        v = hv / lam
    step = 1.0 / max(lam, 1e-300)

    y = x.copy()
    tk = 1.0
    Dx, _ = dual(x)
    best_lower, best_upper, best_nu, best_f, best_kmin = -math.inf, math.inf, x, None, 1.0
    it = 0
    for it in range(1, prob.max_iter + 1):
        Dy, pot = dual(y)
        grad = p * (1.0 - op.forward(pot ** (pc - 1.0)))
        while True:
            xn = np.maximum(y + step * grad, 0.0)
            if not xn.any():
                step *= 0.5
                continue
            Dn, _ = dual(xn)
            d = xn - y
            if Dn >= Dy + grad @ d - (d @ d) / (2.0 * step) - 1e-15 * abs(Dy):
                break
            step *= 0.5
        restarted = Dn < Dx - 1e-13 * abs(Dx) and tk > 1.0
        if restarted:
            # adaptive restart: drop momentum, retry from the last accepted point
            y = x.copy()
            tk = 1.0
        else:
            tn = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * tk * tk))
            y = xn + ((tk - 1.0) / tn) * (xn - x)
            x, Dx, tk = xn, max(Dn, Dx) if tk == 1.0 else Dn, tn
            step *= 1.25
        if it % 10 == 0 or it == prob.max_iter:
            lower, upper, pot, f, Kf, mass, E = _bounds(op, x, p, pc, w)
            if lower > best_lower:
                best_lower, best_nu = lower, x * (mass / E) ** (p - 1.0)
            if upper < best_upper:
                best_upper, best_f, best_kmin = upper, f, float(Kf.min())
            if _converged(best_lower, best_upper, prob.gap_tol):
                break
    nu = best_nu
    grid = prob.grid_points()
    density = op.expand(best_f / best_kmin) if best_f is not None else None
    meas = DiscreteMeasure(prob.constraints.copy(), nu, "ν")
    res = CapacityResult(best_upper, float(nu.sum()), it, h, meas, density, grid,
                         min_potential=1.0, constraints=prob.constraints)
    if not _converged(best_lower, best_upper, prob.gap_tol):
        raise NonConvergedError(
            f"capacity solve hit {prob.max_iter} iterations with bounds "
            f"[{best_lower:.6g}, {best_upper:.6g}]", res)
    return res


# ---------------------------------------------------------------------------
# public operations


def _origin(controls: CapacityControls, N: int) -> np.ndarray:
    return np.zeros(N) if controls.origin is None else np.asarray(controls.origin, dtype=float).reshape(N)


def _problem(points: np.ndarray, params: Params, h: float, origin: np.ndarray,
             controls: CapacityControls, ball=None) -> CapacityProblem:
    N = points.shape[1]
    if ball is None:
        mg = controls.margin_for(N)
        lo = points.min(axis=0) - mg
        hi = points.max(axis=0) + mg
    else:
        c, r = np.asarray(ball[0], dtype=float), float(ball[1])
        lo, hi = c - r, c + r
    klo = np.ceil((lo - origin) / h - 1e-9).astype(np.int64)
    khi = np.floor((hi - origin) / h + 1e-9).astype(np.int64)
    if ball is not None:
        # constraints must sit on density cells
        kc = np.rint((points - origin) / h).astype(np.int64)
        klo = np.minimum(klo, kc.min(axis=0))
        khi = np.maximum(khi, kc.max(axis=0))
    shape = tuple(int(v) for v in (khi - klo + 1))
    return CapacityProblem(points, h, origin, params.cap_order, params.cap_power, klo, shape,
                           None if ball is None else (np.asarray(ball[0], float), float(ball[1])),
                           controls.gap_tol, controls.max_iter, controls.dense_limit)


def capacity_of_points(points: np.ndarray, params: Params, h: float,
                       controls: Optional[CapacityControls] = None, origin=None,
                       ball=None) -> CapacityResult:
    """Capacity of an already discretized constraint set (lattice points)."""
    controls = controls or CapacityControls()
    N = params.N
    points = np.asarray(points, dtype=float).reshape(-1, N)
    if len(points) == 0:
        return _empty_result(N, h)
    o = np.zeros(N) if origin is None else np.asarray(origin, float).reshape(N)
    return solve_capacity_problem(_problem(points, params, h, o, controls, ball))


def _check_dim(F: CompactSet, params: Params):
    if F.dim != params.N:
        raise InvalidParameterError(f"set dimension {F.dim} does not match N={params.N}")


def capacity(F: CompactSet, params: Params, controls: Optional[CapacityControls] = None,
             **overrides) -> CapacityResult:
    """Bessel capacity ``C_{2/q, q'}(F)`` of a compact set."""
    controls = replace(controls or CapacityControls(), **overrides)
    _check_dim(F, params)
    h = controls.spacing_for(F)
    if F.is_empty():
        return _empty_result(params.N, h)
    origin = _origin(controls, params.N)
    pts = discretize(F, h, origin)
    return capacity_of_points(pts, params, h, controls, origin)


def relative_capacity(F: CompactSet, ball, params: Params,
                      controls: Optional[CapacityControls] = None, **overrides) -> CapacityResult:
    """Capacity relative to a ball: densities supported in ``B(center, radius)``."""
    controls = replace(controls or CapacityControls(), **overrides)
    _check_dim(F, params)
    center, radius = np.asarray(ball[0], dtype=float).reshape(params.N), float(ball[1])
    h = controls.spacing_for(F)
    if F.is_empty():
        return _empty_result(params.N, h)
    if F.farthest(center) > radius * (1 + 1e-12):
        raise InvalidParameterError("set is not contained in the ball")
    origin = _origin(controls, params.N)
    pts = discretize(F, h, origin)
    pts = pts[np.linalg.norm(pts - center, axis=1) <= radius * (1 + 1e-12)]
    return capacity_of_points(pts, params, h, controls, origin, ball=(center, radius))


def capacitary_measure(F: CompactSet, params: Params, controls: Optional[CapacityControls] = None,
                       **overrides) -> DiscreteMeasure:
    return capacity(F, params, controls, **overrides).measure


def quasi_additivity_ratio(parts: Sequence[CompactSet], whole: CompactSet, params: Params,
                           controls: Optional[CapacityControls] = None, **overrides) -> float:
    """``Σ_j C(part_j) / C(whole)`` computed on one shared lattice."""
    controls = replace(controls or CapacityControls(), **overrides)
    if controls.h is None:
        controls = replace(controls, h=controls.spacing_for(whole))
    cw = capacity(whole, params, controls)
    total = 0.0
    slack = 0.0
    for part in parts:
        r = capacity(part, params, controls)
        total += r.value
        slack += r.gap
    if cw.value <= 0:
        if total > max(slack, 1e-12):
            raise InconsistentCapacityError("whole set has zero capacity but a part does not")
        return 1.0
    return total / cw.value
