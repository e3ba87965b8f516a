"""Compact sets, annular slices and sphere covers.

Every set variant supports exact membership, distance queries used by the
lattice discretization, similarity scaling and a lossless JSON round trip.
Annular slices use the half-open convention ``sqrt(n t) <= |x - y| < sqrt((n+1) t)``
so that consecutive slices partition space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .params import InvalidParameterError

# relative slack on lattice/distance comparisons; keeps ties at exactly h/2 inside
_TIE = 1e-9
_SLICE_TIE = 1e-12


class UnsupportedSetError(InvalidParameterError):
    pass


def _as_points(pts, dim: int) -> np.ndarray:
    a = np.asarray(pts, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim == 1:
        a = a.reshape(-1, 1) if dim == 1 else a.reshape(1, -1)
    if a.shape[1] != dim:
        raise InvalidParameterError(f"expected points of dimension {dim}, got shape {a.shape}")
    return a


def _as_center(x, dim: int) -> np.ndarray:
    c = np.asarray(x, dtype=float).reshape(-1)
    if c.size == 1 and dim > 1:
        raise InvalidParameterError(f"center must have {dim} coordinates")
    if c.size != dim:
        raise InvalidParameterError(f"center must have {dim} coordinates, got {c.size}")
    return c


class CompactSet:
    """Base class for the closed bounded sets handled by the laboratory."""

    variant: str = "abstract"
    dim: int

    # -- queries -------------------------------------------------------
    def contains(self, pts) -> np.ndarray:
        raise NotImplementedError

    def distance(self, pts) -> np.ndarray:
        """Euclidean distance from each point to the set (``inf`` if empty)."""
        raise NotImplementedError

    def farthest(self, x) -> float:
        """``max_{y in F} |x - y|``; ``-inf`` for the empty set."""
        raise NotImplementedError

    def bounding_box(self) -> Optional[tuple[np.ndarray, np.ndarray]]:
        raise NotImplementedError

    def is_empty(self) -> bool:
        raise NotImplementedError

    @property
    def bounding_radius(self) -> float:
        """Radius of a ball about the origin containing the set."""
        return max(self.farthest(np.zeros(self.dim)), 0.0)

    @property
    def diameter(self) -> float:
        box = self.bounding_box()
        if box is None:
            return 0.0
        return float(np.linalg.norm(box[1] - box[0]))

    # -- transformations ----------------------------------------------
    def scaled(self, factor: float) -> "CompactSet":
        """Image under ``y -> factor * y`` (about the origin)."""
        raise NotImplementedError

    def translated(self, z) -> "CompactSet":
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.to_dict()!r})"

    def __eq__(self, other):
        return isinstance(other, CompactSet) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(repr(self.to_dict()))


# ---------------------------------------------------------------------------
# one-dimensional interval unions


def _interval_distance(x: np.ndarray, iv: np.ndarray) -> np.ndarray:
    if len(iv) == 0:
        return np.full(x.shape, np.inf)
    a = iv[:, 0][None, :]
    b = iv[:, 1][None, :]
    xx = x[:, None]
    d = np.maximum(np.maximum(a - xx, xx - b), 0.0)
    return d.min(axis=1)


class _IntervalBacked(CompactSet):
    dim = 1

    def intervals(self) -> np.ndarray:
        raise NotImplementedError

    def contains(self, pts):
        x = _as_points(pts, 1)[:, 0]
        iv = self.intervals()
        if len(iv) == 0:
            return np.zeros(x.shape, dtype=bool)
        return ((x[:, None] >= iv[:, 0]) & (x[:, None] <= iv[:, 1])).any(axis=1)

    def distance(self, pts):
        return _interval_distance(_as_points(pts, 1)[:, 0], self.intervals())

    def farthest(self, x):
        iv = self.intervals()
        if len(iv) == 0:
            return -math.inf
        c = float(_as_center(x, 1)[0])
        return float(np.max(np.abs(iv - c)))

    def bounding_box(self):
        iv = self.intervals()
        if len(iv) == 0:
            return None
        return np.array([iv[:, 0].min()]), np.array([iv[:, 1].max()])

    def is_empty(self):
        return len(self.intervals()) == 0


class IntervalUnion(_IntervalBacked):
    """Finite union of closed intervals on the line."""

    variant = "union-of-intervals"

    def __init__(self, intervals):
        iv = np.asarray(intervals, dtype=float).reshape(-1, 2)
        if np.any(iv[:, 1] < iv[:, 0]):
            raise InvalidParameterError("interval endpoints must satisfy a <= b")
        self._iv = iv[np.argsort(iv[:, 0], kind="stable")]

    def intervals(self):
        return self._iv

    def scaled(self, factor):
        iv = self._iv * factor
        if factor < 0:
            iv = iv[:, ::-1]
        return IntervalUnion(iv)

    def translated(self, z):
        return IntervalUnion(self._iv + float(_as_center(z, 1)[0]))

    def to_dict(self):
        return {"variant": self.variant, "intervals": self._iv.tolist()}


class CantorIterate(_IntervalBacked):
    """Depth-``m`` iterate of the middle-removal construction on ``[a, b]``.

    Each interval keeps its two outer pieces of relative length ``ratio``, so the
    iterate is a union of ``2**depth`` closed intervals.
    """

    variant = "cantor-iterate"

    def __init__(self, a: float, b: float, ratio: float = 1.0 / 3.0, depth: int = 1):
        if not b > a:
            raise InvalidParameterError("cantor base interval must have a < b")
        if not 0.0 < ratio < 0.5:
            raise InvalidParameterError("cantor ratio must lie in (0, 1/2)")
        if int(depth) != depth or depth < 0:
            raise InvalidParameterError("cantor depth must be a non-negative integer")
        self.a, self.b, self.ratio, self.depth = float(a), float(b), float(ratio), int(depth)
        iv = np.array([[self.a, self.b]])
        for _ in range(self.depth):
            ln = (iv[:, 1] - iv[:, 0]) * self.ratio
            left = np.stack([iv[:, 0], iv[:, 0] + ln], axis=1)
            right = np.stack([iv[:, 1] - ln, iv[:, 1]], axis=1)
            iv = np.stack([left, right], axis=1).reshape(-1, 2)
        self._iv = iv

    def intervals(self):
        return self._iv

    def scaled(self, factor):
        a, b = sorted((self.a * factor, self.b * factor))
        return CantorIterate(a, b, self.ratio, self.depth)

    def translated(self, z):
        s = float(_as_center(z, 1)[0])
        return CantorIterate(self.a + s, self.b + s, self.ratio, self.depth)

    def to_dict(self):
        return {"variant": self.variant, "a": self.a, "b": self.b,
                "ratio": self.ratio, "depth": self.depth}


# ---------------------------------------------------------------------------
# N-dimensional variants


class PointSet(CompactSet):
    variant = "finite-point-set"

    def __init__(self, points, dim: Optional[int] = None):
        a = np.asarray(points, dtype=float)
        if dim is None:
            dim = 1 if a.ndim <= 1 else a.shape[1]
        if a.size == 0:
            a = np.zeros((0, dim))
        self.dim = int(dim)
        self.points = _as_points(a, self.dim)

    def contains(self, pts):
        y = _as_points(pts, self.dim)
        if len(self.points) == 0:
            return np.zeros(len(y), dtype=bool)
        return (np.abs(y[:, None, :] - self.points[None]).max(axis=2) == 0).any(axis=1)

    def distance(self, pts):
        y = _as_points(pts, self.dim)
        if len(self.points) == 0:
            return np.full(len(y), np.inf)
        return np.linalg.norm(y[:, None, :] - self.points[None], axis=2).min(axis=1)

    def farthest(self, x):
        if len(self.points) == 0:
            return -math.inf
        return float(np.linalg.norm(self.points - _as_center(x, self.dim), axis=1).max())

    def bounding_box(self):
        if len(self.points) == 0:
            return None
        return self.points.min(axis=0), self.points.max(axis=0)

    def is_empty(self):
        return len(self.points) == 0

    def intervals(self):
        if self.dim != 1:
            raise UnsupportedSetError("intervals() is only defined in one dimension")
        x = np.sort(self.points[:, 0])
        return np.stack([x, x], axis=1)

    def scaled(self, factor):
        return PointSet(self.points * factor, self.dim)

    def translated(self, z):
        return PointSet(self.points + _as_center(z, self.dim), self.dim)

    def to_dict(self):
        return {"variant": self.variant, "dim": self.dim, "points": self.points.tolist()}


class BallUnion(CompactSet):
    """Finite union of closed balls."""

    variant = "union-of-balls"

    def __init__(self, centers, radii, dim: Optional[int] = None):
        c = np.asarray(centers, dtype=float)
        if dim is None:
            dim = 1 if c.ndim <= 1 else c.shape[1]
        self.dim = int(dim)
        self.centers = _as_points(c if c.size else np.zeros((0, dim)), self.dim)
        self.radii = np.asarray(radii, dtype=float).reshape(-1)
        if len(self.radii) != len(self.centers):
            raise InvalidParameterError("need one radius per center")
        if np.any(self.radii < 0):
            raise InvalidParameterError("radii must be non-negative")

    def contains(self, pts):
        y = _as_points(pts, self.dim)
        if len(self.radii) == 0:
            return np.zeros(len(y), dtype=bool)
        d = np.linalg.norm(y[:, None, :] - self.centers[None], axis=2)
        return (d <= self.radii[None]).any(axis=1)

    def distance(self, pts):
        y = _as_points(pts, self.dim)
        if len(self.radii) == 0:
            return np.full(len(y), np.inf)
        d = np.linalg.norm(y[:, None, :] - self.centers[None], axis=2) - self.radii[None]
        return np.maximum(d.min(axis=1), 0.0)

    def farthest(self, x):
        if len(self.radii) == 0:
            return -math.inf
        d = np.linalg.norm(self.centers - _as_center(x, self.dim), axis=1) + self.radii
        return float(d.max())

    def bounding_box(self):
        if len(self.radii) == 0:
            return None
        return ((self.centers - self.radii[:, None]).min(axis=0),
                (self.centers + self.radii[:, None]).max(axis=0))

    def is_empty(self):
        return len(self.radii) == 0

    def intervals(self):
        if self.dim != 1:
            raise UnsupportedSetError("intervals() is only defined in one dimension")
        c = self.centers[:, 0]
        iv = np.stack([c - self.radii, c + self.radii], axis=1)
        return iv[np.argsort(iv[:, 0], kind="stable")]

    def scaled(self, factor):
        return BallUnion(self.centers * factor, self.radii * abs(factor), self.dim)

    def translated(self, z):
        return BallUnion(self.centers + _as_center(z, self.dim), self.radii, self.dim)

    def to_dict(self):
        return {"variant": self.variant, "dim": self.dim,
                "centers": self.centers.tolist(), "radii": self.radii.tolist()}


@dataclass(frozen=True)
class _Annulus:
    center: tuple
    inner: float
    outer: float

    def radial(self, y: np.ndarray) -> np.ndarray:
        return np.linalg.norm(y - np.asarray(self.center), axis=1)


@dataclass(frozen=True)
class _Ball:
    center: tuple
    radius: float


class RestrictedSet(CompactSet):
    """A base set cut by a half-open annulus and/or a closed ball.

    This is the variant returned by :func:`slice` and by the secondary slicing
    ``F_n ∩ B(a, ρ)``.  Membership is exact.  In one dimension the set is an
    exact finite union of (closures of) intervals.
    """

    variant = "restricted"

    def __init__(self, base: CompactSet, annulus=None, ball=None):
        self.base = base
        self.dim = base.dim
        self.annulus = None
        self.ball = None
        if annulus is not None:
            c, r0, r1 = annulus
            self.annulus = _Annulus(tuple(_as_center(c, self.dim).tolist()), float(r0), float(r1))
            if not 0.0 <= self.annulus.inner <= self.annulus.outer:
                raise InvalidParameterError("annulus radii must satisfy 0 <= inner <= outer")
        if ball is not None:
            c, r = ball
            self.ball = _Ball(tuple(_as_center(c, self.dim).tolist()), float(r))

    def _in_constraints(self, y: np.ndarray, slack: float = 0.0) -> np.ndarray:
        ok = np.ones(len(y), dtype=bool)
        if self.annulus is not None:
            r = self.annulus.radial(y)
            lo = self.annulus.inner - slack
            if slack > 0:
                ok &= (r >= lo) & (r <= self.annulus.outer + slack)
            else:
                ok &= (r >= lo) & (r < self.annulus.outer)
        if self.ball is not None:
            ok &= np.linalg.norm(y - np.asarray(self.ball.center), axis=1) <= self.ball.radius + slack
        return ok

    def contains(self, pts):
        y = _as_points(pts, self.dim)
        return self.base.contains(y) & self._in_constraints(y)

    # exact interval representation in one dimension (closure of the set)
    def intervals(self):
        if self.dim != 1:
            raise UnsupportedSetError("intervals() is only defined in one dimension")
        iv = self.base.intervals()
        windows = [np.array([[-math.inf, math.inf]])]
        if self.annulus is not None:
            c = self.annulus.center[0]
            r0, r1 = self.annulus.inner, self.annulus.outer
            if r1 <= r0:
                return np.zeros((0, 2))
            if r0 == 0.0:
                windows.append(np.array([[c - r1, c + r1]]))
            else:
                windows.append(np.array([[c - r1, c - r0], [c + r0, c + r1]]))
        if self.ball is not None:
            c, r = self.ball.center[0], self.ball.radius
            windows.append(np.array([[c - r, c + r]]))
        # boundary ties are decided up to rounding, so that a point on a sphere
        # lands in the same slice before and after translation or rescaling
        scale = max([1.0] + [abs(float(v)) for w in windows[1:] for v in w.ravel()])
        tol = _SLICE_TIE * scale
        out = iv
        for w in windows[1:]:
            pieces = []
            for a, b in out:
                for wa, wb in w:
                    lo, hi = max(a, wa), min(b, wb)
                    if lo <= hi:
                        pieces.append((lo, hi))
                    elif lo - hi <= tol:
                        p = a if a > wb else b
                        pieces.append((p, p))
            out = np.array(pieces, dtype=float).reshape(-1, 2)
        out = out[np.argsort(out[:, 0], kind="stable")] if len(out) else out
        if len(out) and self.annulus is not None:
            # drop pieces no wider than the tie tolerance that only touch the excluded outer sphere
            c = self.annulus.center[0]
            keep = []
            for a, b in out:
                if b - a <= tol and abs(0.5 * (a + b) - c) >= self.annulus.outer - 2 * tol:
                    continue
                keep.append((a, b))
            out = np.array(keep, dtype=float).reshape(-1, 2)
        return out

    def distance(self, pts):
        y = _as_points(pts, self.dim)
        if self.dim == 1:
            return _interval_distance(y[:, 0], self.intervals())
        # lower bound of the true distance; adequate for lattice thresholds
        d = self.base.distance(y)
        if self.annulus is not None:
            r = self.annulus.radial(y)
            d = np.maximum(d, np.maximum(self.annulus.inner - r, r - self.annulus.outer))
        if self.ball is not None:
            rb = np.linalg.norm(y - np.asarray(self.ball.center), axis=1) - self.ball.radius
            d = np.maximum(d, rb)
        return np.maximum(d, 0.0)

    def farthest(self, x):
        if self.is_empty():
            return -math.inf
        if self.dim == 1:
            return _IntervalBacked.farthest(self, x)  # type: ignore[arg-type]
        f = self.base.farthest(x)
        xc = _as_center(x, self.dim)
        if self.annulus is not None:
            f = min(f, float(np.linalg.norm(xc - np.asarray(self.annulus.center))) + self.annulus.outer)
        if self.ball is not None:
            f = min(f, float(np.linalg.norm(xc - np.asarray(self.ball.center))) + self.ball.radius)
        return f

    def bounding_box(self):
        if self.dim == 1:
            iv = self.intervals()
            if len(iv) == 0:
                return None
            return np.array([iv[:, 0].min()]), np.array([iv[:, 1].max()])
        box = self.base.bounding_box()
        if box is None:
            return None
        lo, hi = box
        for c, r in self._caps():
            lo = np.maximum(lo, c - r)
            hi = np.minimum(hi, c + r)
        if np.any(hi < lo):
            return None
        return lo, hi

    def _caps(self):
        caps = []
        if self.annulus is not None:
            caps.append((np.asarray(self.annulus.center), self.annulus.outer))
        if self.ball is not None:
            caps.append((np.asarray(self.ball.center), self.ball.radius))
        return caps

    def is_empty(self):
        if self.dim == 1:
            return len(self.intervals()) == 0
        if self.base.is_empty():
            return True
        if isinstance(self.base, PointSet):
            return not bool(self.contains(self.base.points).any())
        if isinstance(self.base, BallUnion) and self.ball is None and self.annulus is not None:
            dc = np.linalg.norm(self.base.centers - np.asarray(self.annulus.center), axis=1)
            near = np.maximum(dc - self.base.radii, 0.0)
            far = dc + self.base.radii
            return not bool(np.any((far >= self.annulus.inner) & (near < self.annulus.outer)))
        if self.bounding_box() is None:
            return True
        # no closed form for ball ∩ ball ∩ annulus: probe a fine lattice
        lo, hi = self.bounding_box()
        h = max(float((hi - lo).max()), 1e-12) / 64.0
        pts = lattice_box(lo, hi, h, np.zeros(self.dim))
        return not bool(self.contains(pts).any()) if len(pts) else True

    def scaled(self, factor):
        ann = None
        if self.annulus is not None:
            a = self.annulus
            ann = (np.asarray(a.center) * factor, a.inner * abs(factor), a.outer * abs(factor))
        ball = None
        if self.ball is not None:
            ball = (np.asarray(self.ball.center) * factor, self.ball.radius * abs(factor))
        return RestrictedSet(self.base.scaled(factor), ann, ball)

    def translated(self, z):
        zc = _as_center(z, self.dim)
        ann = None
        if self.annulus is not None:
            a = self.annulus
            ann = (np.asarray(a.center) + zc, a.inner, a.outer)
        ball = None
        if self.ball is not None:
            ball = (np.asarray(self.ball.center) + zc, self.ball.radius)
        return RestrictedSet(self.base.translated(zc), ann, ball)

    def to_dict(self):
        d = {"variant": self.variant, "base": self.base.to_dict()}
        if self.annulus is not None:
            a = self.annulus
            d["annulus"] = {"center": list(a.center), "inner": a.inner, "outer": a.outer}
        if self.ball is not None:
            d["ball"] = {"center": list(self.ball.center), "radius": self.ball.radius}
        return d


def compact_set_from_dict(d: dict) -> CompactSet:
    """Inverse of ``CompactSet.to_dict``."""
    try:
        v = d["variant"]
        if v == "union-of-intervals":
            return IntervalUnion(d["intervals"])
        if v == "cantor-iterate":
            return CantorIterate(d["a"], d["b"], d.get("ratio", 1.0 / 3.0), d.get("depth", 1))
        if v == "finite-point-set":
            return PointSet(d["points"], d.get("dim"))
        if v == "union-of-balls":
            return BallUnion(d["centers"], d["radii"], d.get("dim"))
        if v == "restricted":
            ann = d.get("annulus")
            ball = d.get("ball")
            return RestrictedSet(
                compact_set_from_dict(d["base"]),
                None if ann is None else (ann["center"], ann["inner"], ann["outer"]),
                None if ball is None else (ball["center"], ball["radius"]),
            )
    except KeyError as exc:
        raise InvalidParameterError(f"compact set is missing field {exc.args[0]!r}") from None
    raise InvalidParameterError(f"unknown compact-set variant {d.get('variant')!r}")


def empty_set(dim: int = 1) -> CompactSet:
    return IntervalUnion(np.zeros((0, 2))) if dim == 1 else PointSet(np.zeros((0, dim)), dim)


# ---------------------------------------------------------------------------
# operations


def slice(F: CompactSet, x, t: float, n: int) -> RestrictedSet:  # noqa: A001
    """``F ∩ {sqrt(n t) <= |x - y| < sqrt((n+1) t)}``."""
    if not t > 0:
        raise InvalidParameterError(f"slice time must be positive, got {t}")
    if int(n) != n or n < 0:
        raise InvalidParameterError(f"slice index must be a non-negative integer, got {n}")
    xc = _as_center(x, F.dim)
    return RestrictedSet(F, annulus=(xc, math.sqrt(n * t), math.sqrt((n + 1) * t)))


def slice_range(F: CompactSet, x, t: float) -> int:
    """``ceil(max_{y in F} |x - y|^2 / t)``; every slice with a larger index is empty.

    Returns ``-1`` for the empty set.
    """
    if not t > 0:
        raise InvalidParameterError(f"slice time must be positive, got {t}")
    d = F.farthest(_as_center(x, F.dim))
    if not math.isfinite(d):
        if d > 0:
            raise UnsupportedSetError("slice_range needs a bounded set")
        return -1
    return int(math.ceil(d * d / t - 1e-12))


def scale_set(F: CompactSet, k: float) -> CompactSet:
    """``F / sqrt(k)``: every generator divided by ``sqrt(k)``."""
    if not k > 0:
        raise InvalidParameterError(f"scale factor must be positive, got {k}")
    return F.scaled(1.0 / math.sqrt(k))


def lattice_box(lo, hi, h: float, origin) -> np.ndarray:
    """Points of ``origin + h Z^N`` inside the box ``[lo, hi]``."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    origin = np.asarray(origin, dtype=float)
    kmin = np.ceil((lo - origin) / h - _TIE).astype(np.int64)
    kmax = np.floor((hi - origin) / h + _TIE).astype(np.int64)
    if np.any(kmax < kmin):
        return np.zeros((0, len(lo)))
    axes = [np.arange(a, b + 1) for a, b in zip(kmin, kmax)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(lo))
    return origin + h * grid


def discretize(F: CompactSet, h: float, origin=None) -> np.ndarray:
    """Lattice points of ``origin + h Z^N`` within ``h sqrt(N)/2`` of ``F``.

    The result has spacing ``h``, its ``h``-neighbourhood covers ``F`` and it is
    monotone under inclusion (``F1 ⊂ F2`` gives a subset), which keeps discrete
    capacities monotone and subadditive.  Returned as an ``(m, N)`` array sorted
    lexicographically.
    """
    if not h > 0:
        raise InvalidParameterError(f"discretization spacing must be positive, got {h}")
    N = F.dim
    origin = np.zeros(N) if origin is None else _as_center(origin, N)
    if F.is_empty():
        return np.zeros((0, N))
    tau = 0.5 * h * math.sqrt(N) * (1.0 + _TIE)
    if N == 1:
        iv = F.intervals()
        o = origin[0]
        ks = [np.arange(math.ceil((a - tau - o) / h), math.floor((b + tau - o) / h) + 1)
              for a, b in iv]
        k = np.unique(np.concatenate(ks)) if ks else np.zeros(0, dtype=np.int64)
        pts = o + h * k.astype(float)
        pts = pts[_interval_distance(pts, iv) <= tau]
        return pts.reshape(-1, 1)
    lo, hi = F.bounding_box()
    cand = lattice_box(lo - tau, hi + tau, h, origin)
    if len(cand) == 0:
        return cand
    if isinstance(F, RestrictedSet):
        keep = (F.base.distance(cand) <= tau) & F._in_constraints(cand, slack=tau)
    else:
        keep = F.distance(cand) <= tau
    pts = cand[keep]
    order = np.lexsort(pts.T[::-1])
    return pts[order]


# ---------------------------------------------------------------------------
# secondary slicing: sphere covers


@dataclass(frozen=True)
class SphereCover:
    n: int
    t: float
    center: np.ndarray
    centers: np.ndarray
    radius: float
    spacing: float
    sphere_radius: float

    @property
    def count(self) -> int:
        return len(self.centers)

    def covers(self, pts) -> np.ndarray:
        y = _as_points(pts, len(self.center))
        d = np.linalg.norm(y[:, None, :] - self.centers[None], axis=2)
        return (d <= self.radius * (1 + 1e-12)).any(axis=1)

    def pieces(self, F: CompactSet) -> list:
        """The secondary slices ``F_n ∩ B(a_j, radius)``."""
        ann = (self.center, math.sqrt(self.n * self.t), math.sqrt((self.n + 1) * self.t))
        return [RestrictedSet(F, annulus=ann, ball=(a, self.radius)) for a in self.centers]


def _sphere_candidates(N: int, count: int, seed: int = 0) -> np.ndarray:
    if N == 2:
        th = 2 * np.pi * np.arange(count) / count
        return np.stack([np.cos(th), np.sin(th)], axis=1)
    if N == 3:
        i = np.arange(count) + 0.5
        z = 1 - 2 * i / count
        phi = np.pi * (1 + 5 ** 0.5) * i
        r = np.sqrt(1 - z * z)
        return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
    g = np.random.default_rng(seed).standard_normal((count, N))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def packing_bound(n: int, N: int) -> float:
    """Volume bound on a ``spacing``-separated set on the mid-sphere (unit time).

    Disjoint balls of radius ``spacing/2`` around the centers all lie in the shell
    of half-width ``spacing/2`` about the sphere.
    """
    rho = (math.sqrt(n + 1) + math.sqrt(n)) / 2
    s = 1.0 / math.sqrt(2 * (n + 1))
    return ((rho + s / 2) ** N - max(rho - s / 2, 0.0) ** N) / (s / 2) ** N


def sphere_cover(x, t: float, n: int, N: int, oversample: int = 24) -> SphereCover:
    """Separated centers on the mid-sphere of ``T_n(x, t)`` whose balls cover the slice.

    In the plane the centers are the fewest equally spaced points that cover;
    in higher dimension they come from a greedy farthest-point packing.
    Centers lie on ``|y - x| = (sqrt(n+1) + sqrt(n)) sqrt(t) / 2`` and are at least
    ``sqrt(t / (2(n+1)))`` apart; balls of radius ``sqrt(t / (n+1))`` around them
    cover the slice.
    """
    if not t > 0:
        raise InvalidParameterError("sphere_cover needs t > 0")
    if int(n) != n or n < 0:
        raise InvalidParameterError("sphere_cover needs an integer n >= 0")
    xc = _as_center(x, N)
    rho = (math.sqrt(n + 1) + math.sqrt(n)) / 2 * math.sqrt(t)
    spacing = math.sqrt(t / (2 * (n + 1)))
    radius = math.sqrt(t / (n + 1))
    if N == 1:
        centers = xc + np.array([[-rho], [rho]])
        return SphereCover(int(n), float(t), xc, centers, radius, spacing, rho)
    if N == 2:
        # fewest equally spaced centres whose balls reach both boundary circles
        # midway between neighbours; uniform overlap keeps counts comparable across n
        a, b = math.sqrt(n * t), math.sqrt((n + 1) * t)
        J = 2
        while True:
            c = math.cos(math.pi / J)
            far = max(rho * rho + r * r - 2 * rho * r * c for r in (a, b))
            if far <= radius * radius * (1 - 1e-12):
                break
            J += 1
        if 2 * rho * math.sin(math.pi / J) < spacing:
            raise InvalidParameterError("uniform cover violates the separation constraint")
        th = 2 * math.pi * np.arange(J) / J
        centers = xc + rho * np.stack([np.cos(th), np.sin(th)], axis=1)
        return SphereCover(int(n), float(t), xc, centers, radius, spacing, rho)
    # |y - a|^2 = (r - rho)^2 + (r / rho) c^2 for a chord c on the mid-sphere; the
    # outer sphere r = b is the worst case, so chords up to c_max keep T_n covered
    b = math.sqrt((n + 1) * t)
    c_max = math.sqrt(max(radius * radius - (b - rho) ** 2, 0.0) * rho / b)
    if n == 0:
        # greedy may stop with antipodal centres; the regular simplex covers when N <= 4
        if N > 4:
            raise UnsupportedSetError("no separated cover of the first slice is implemented for N > 4")
        e = np.eye(N + 1) - 1.0 / (N + 1)
        basis = np.linalg.svd(e)[2][:N]
        verts = e @ basis.T
        verts /= np.linalg.norm(verts, axis=1, keepdims=True)
        return SphereCover(0, float(t), xc, xc + rho * verts, radius, spacing, rho)
    stop = min(spacing, 0.9 * c_max)
    # candidate density: angular step well below the spacing
    ang = spacing / rho
    per_axis = int(math.ceil(2 * math.pi / ang)) * oversample // 4
    count = max(64, per_axis if N == 2 else per_axis * per_axis // 2)
    count = min(count, 200_000)
    cand = xc + rho * _sphere_candidates(N, count)
    chosen = [0]
    dmin = np.linalg.norm(cand - cand[0], axis=1)
    while True:
        j = int(np.argmax(dmin))
        if dmin[j] < stop:
            break
        chosen.append(j)
        dmin = np.minimum(dmin, np.linalg.norm(cand - cand[j], axis=1))
    return SphereCover(int(n), float(t), xc, cand[chosen], radius, spacing, rho)
