"""Very singular self-similar profiles for ``1 < q < q_c``.

The profile ``f`` of ``u(x, t) = t^{-1/(q-1)} f(|x|/√t)`` solves

    f'' + ((N-1)/r + r/2) f' + f/(q-1) - f^q = 0,   f'(0) = 0,

with ``r^{2/(q-1)} f(r) -> 0``.  Shots from ``f(0) = a`` either cross zero
(``a`` too small) or settle on the slow decay ``c r^{-2/(q-1)}`` (``a`` too
large); bisection on ``a`` separates the two.  For ``q >= q_c`` no shot
crosses zero and the bracket collapses: there is no positive profile.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .capacity import NonConvergedError
from .geometry import CompactSet
from .params import InvalidParameterError, Params


class RegimeError(NonConvergedError):
    pass


@dataclass(frozen=True)
class ShootingControls:
    R: float = 20.0
    rtol: float = 1e-10
    atol: float = 1e-14
    bisection_tol: float = 1e-12
    max_bisections: int = 200
    decay_tol: float = 0.05
    dr: float = 0.01

    def to_dict(self) -> dict:
        return {"R": self.R, "rtol": self.rtol, "atol": self.atol, "bisection_tol": self.bisection_tol,
                "decay_tol": self.decay_tol, "dr": self.dr}

    @classmethod
    def from_dict(cls, d: Optional[dict]) -> "ShootingControls":
        d = dict(d or {})
        keys = ("R", "rtol", "atol", "bisection_tol", "max_bisections", "decay_tol", "dr")
        return cls(**{k: d[k] for k in keys if k in d})


@dataclass
class Profile:
    """Profile values on ``r = 0, dr, ..., R``.

    ``found`` is false when no positive profile exists; then ``f`` vanishes.
    ``decay`` is ``sup_{[R/2, R]} r^{2/(q-1)} f(r)``.
    """

    N: int
    q: float
    r: np.ndarray
    f: np.ndarray
    f0: float
    decay: float
    found: bool
    cutoff: float = math.inf
    message: str = ""
    diagnostics: dict = field(default_factory=dict)

    def __call__(self, r) -> np.ndarray:
        r = np.abs(np.asarray(r, dtype=float))
        out = np.interp(r, self.r, self.f, right=0.0)
        return float(out) if np.ndim(out) == 0 else out

    def to_dict(self) -> dict:
        return {"N": self.N, "q": self.q, "f0": self.f0, "decay": self.decay, "found": self.found,
                "cutoff": self.cutoff if math.isfinite(self.cutoff) else None, "message": self.message,
                "diagnostics": self.diagnostics}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "f"])
        for a, b in zip(self.r, self.f):
            w.writerow([repr(float(a)), repr(float(b))])
        return buf.getvalue()


def _rhs(N: int, q: float):
    k = 1.0 / (q - 1.0)

    def f(r, y):
        u, v = y
        up = max(u, 0.0)
        drift = (N - 1) / r + r / 2 if r > 0 else 0.0
        return [v, -drift * v - k * u + up ** q]
    return f


def _start(N: int, q: float, a: float, r0: float) -> list:
    # Taylor start avoids the (N-1)/r singularity: N f''(0) = a^q - a/(q-1)
    c = (a ** q - a / (q - 1)) / N
    return [a + 0.5 * c * r0 * r0, c * r0]


def _shoot(N: int, q: float, a: float, c: ShootingControls, dense: bool = False):
    """Integrate from ``f(0) = a``; returns ``(crossed, r_cross, solution)``."""
    r0 = 1e-6 if N > 1 else 0.0
    y0 = _start(N, q, a, r0) if N > 1 else [a, 0.0]
    cap = 10.0 * max(a, (q - 1) ** (-1 / (q - 1)))

    def zero(r, y):
        return y[0]
    zero.terminal = True
    zero.direction = -1

    def blow(r, y):
        return cap - y[0]
    blow.terminal = True

    sol = solve_ivp(_rhs(N, q), (r0, c.R), y0, method="DOP853", rtol=c.rtol, atol=c.atol,
                    events=(zero, blow), dense_output=dense)
    crossed = len(sol.t_events[0]) > 0
    r_cross = float(sol.t_events[0][0]) if crossed else math.inf
    return crossed, r_cross, sol


def shoot_profile(params: Params, controls: Optional[ShootingControls] = None) -> Profile:
    """Bisection on ``f(0)`` between a zero-crossing shot and a non-crossing shot."""
    c = controls or ShootingControls()
    N, q = params.N, params.q
    r = np.arange(0.0, c.R + 0.5 * c.dr, c.dr)
    hi = 10.0 * (q - 1) ** (-1 / (q - 1))
    lo = 0.1
    tried = []
    for _ in range(4):
        crossed_lo = _shoot(N, q, lo, c)[0]
        tried.append(lo)
        if crossed_lo:
            break
        lo /= 10.0
    else:
        return Profile(N, q, r, np.zeros_like(r), 0.0, 0.0, False,
                       message="no positive profile: no shot crosses zero, the bracket collapses to f(0) -> 0",
                       diagnostics={"lower_shots": tried})
    for _ in range(4):
        if not _shoot(N, q, hi, c)[0]:
            break
        hi *= 10.0
    else:
        raise RegimeError("no non-crossing shot found for the upper end of the bracket")
    it = 0
    while hi - lo > c.bisection_tol * hi and it < c.max_bisections:
        mid = 0.5 * (lo + hi)
        if _shoot(N, q, mid, c)[0]:
            lo = mid
        else:
            hi = mid
        it += 1
    crossed, r_cross, sol = _shoot(N, q, lo, c, dense=True)
    rr = np.clip(r, sol.t[0], sol.t[-1])
    f = np.maximum(sol.sol(rr)[0], 0.0)
    f[r >= r_cross] = 0.0
    f[r > sol.t[-1]] = 0.0
    sel = (r >= c.R / 2) & (r <= c.R)
    decay = float(np.max(r[sel] ** (2 / (q - 1)) * f[sel])) if sel.any() else 0.0
    prof = Profile(N, q, r, f, lo, decay, True, r_cross,
                   diagnostics={"bisections": it, "bracket": [lo, hi]})
    if decay >= c.decay_tol:
        raise RegimeError(f"profile does not decay: sup r^(2/(q-1)) f = {decay:.3g} on [R/2, R]")
    return prof


def ode_residual(profile: Profile, r_max: float = 10.0, step: float = 1e-3) -> float:
    """Max-norm plug-back residual of the profile equation on ``(0, r_max]``.

    Derivatives by central differences of the stored profile's dense
    re-evaluation at spacing ``step``.
    """
    if not profile.found:
        return 0.0
    N, q = profile.N, profile.q
    c = ShootingControls(R=max(r_max + 1.0, 2.0), rtol=1e-12, atol=1e-15)
    _, r_cross, sol = _shoot(N, q, profile.f0, c, dense=True)
    top = min(r_max, 0.95 * r_cross)
    r = np.arange(step, top, step)
    f = sol.sol(r)[0]
    fm, fp = sol.sol(r - step)[0], sol.sol(r + step)[0]
    d1 = (fp - fm) / (2 * step)
    d2 = (fp - 2 * f + fm) / step ** 2
    res = d2 + ((N - 1) / r + r / 2) * d1 + f / (q - 1) - np.maximum(f, 0.0) ** q
    return float(np.max(np.abs(res)))


@dataclass
class SandwichPoint:
    x: float
    t: float
    lower: float
    value: float
    upper: float

    @property
    def lower_margin(self) -> float:
        return self.value - self.lower

    @property
    def upper_margin(self) -> float:
        return self.upper - self.value


@dataclass
class SandwichReport:
    points: list
    scheme_error: float
    profile_f0: float

    @property
    def passed(self) -> bool:
        return all(p.lower_margin > -self.scheme_error * p.value and p.upper_margin > -self.scheme_error * p.upper
                   for p in self.points)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "scheme_error": self.scheme_error, "profile_f0": self.profile_f0,
                "points": [{"x": p.x, "t": p.t, "lower": p.lower, "value": p.value, "upper": p.upper,
                            "lower_margin": p.lower_margin, "upper_margin": p.upper_margin}
                           for p in self.points]}


def subcritical_lower_check(F: CompactSet, params: Params, a, samples: Sequence, grid=None,
                            profile: Optional[Profile] = None, maximal=None) -> SandwichReport:
    """``t^{-1/(q-1)} f(|x-a|/√t) <= ū_F(x,t) <= ((q-1)t)^{-1/(q-1)}`` at ``samples = [(x, t), ...]``.

    ``scheme_error`` is the largest relative change of ``ū_F`` at the samples
    between ``grid`` and its refinement.
    """
    from .pde import MaximalControls, SpaceTimeGrid, maximal_solution

    if params.N != 1:
        raise InvalidParameterError("the sandwich check is implemented for N = 1")
    if params.supercritical:
        raise InvalidParameterError("the profile lower bound needs 1 < q < q_c")
    a = float(np.asarray(a, dtype=float).reshape(-1)[0])
    if F.distance(np.array([[a]]))[0] > 1e-12:
        raise InvalidParameterError("the centre a must belong to F")
    prof = profile or shoot_profile(params)
    ts = sorted({float(t) for _, t in samples})
    if grid is None:
        L = F.bounding_radius + 6 * math.sqrt(max(ts)) + 2
        h = 0.01
        grid = SpaceTimeGrid(L=math.ceil(L / h) * h, h=h, T=max(ts), dt=h, outputs=tuple(ts))
    else:
        grid = SpaceTimeGrid(**{**grid.to_dict(), "outputs": tuple(ts)})
    ctrl = MaximalControls(t_min=min(ts))
    u = maximal or maximal_solution(F, params, grid, ctrl)
    uf = maximal_solution(F, params, grid.refined(), ctrl)
    pts, err = [], 0.0
    for x, t in samples:
        v = u.at(float(x), float(t))
        vf = uf.at(float(x), float(t))
        err = max(err, abs(v - vf) / max(vf, 1e-300))
        lower = t ** (-1 / (params.q - 1)) * prof(abs(x - a) / math.sqrt(t))
        pts.append(SandwichPoint(float(x), float(t), lower, v, params.flat_solution(t)))
    return SandwichReport(pts, err, prof.f0)
