import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import gamma, kv

from capwiener import InvalidParameterError, Params
from capwiener.capacity import (BesselKernel, CapacityControls, InconsistentCapacityError, bessel_kernel_eval,
                                capacitary_measure, capacity, capacity_of_points, get_kernel,
                                quasi_additivity_ratio, relative_capacity)
from capwiener.geometry import IntervalUnion, PointSet, discretize, empty_set

P13 = Params(1, 3.0)


def kv_kernel(r, alpha, N):
    nu = (N - alpha) / 2
    c = 1.0 / (2 ** ((N + alpha - 2) / 2) * math.pi ** (N / 2) * gamma(alpha / 2))
    return c * kv(nu, r) * r ** (-nu)


class TestKernel:
    @pytest.mark.parametrize("alpha,N", [(2 / 3, 1), (1.0, 2), (2 / 3, 3), (2.0, 1), (1.5, 2)])
    def test_matches_modified_bessel(self, alpha, N):
        G = BesselKernel(alpha, N)
        r = np.geomspace(1e-3, 30, 40)
        np.testing.assert_allclose(G(r), kv_kernel(r, alpha, N), rtol=1e-7)
        np.testing.assert_allclose(G.quadrature(r), kv_kernel(r, alpha, N), rtol=1e-9)

    def test_decay_and_monotone(self):
        G = get_kernel(2 / 3, 1)
        assert G(10.0) / G(5.0) < math.exp(-2)
        assert G(1.0) > G(2.0) > G(3.0)
        r = np.geomspace(1e-6, 50, 500)
        assert np.all(np.diff(G(r)) < 0)

    def test_cross_quadrature_at_one(self):
        # Gauss-Legendre in log s against adaptive quadrature in s
        alpha, N = 2 / 3, 1
        f = lambda s: s ** ((alpha - N) / 2 - 1) * math.exp(-s - 1 / (4 * s))
        adaptive = quad(f, 0, 1, limit=200)[0] + quad(f, 1, np.inf, limit=200)[0]
        x, w = np.polynomial.legendre.leggauss(200)
        u = 8 * x
        gl = 8 * np.sum(w * np.exp(u) * np.exp(u) ** ((alpha - N) / 2 - 1) * np.exp(-np.exp(u) - np.exp(-u) / 4))
        assert gl == pytest.approx(adaptive, rel=1e-6)
        const = (4 * math.pi) ** (-N / 2) / gamma(alpha / 2)
        assert bessel_kernel_eval(get_kernel(alpha, N), 1.0) == pytest.approx(const * adaptive, rel=1e-6)

    @pytest.mark.parametrize("alpha,N", [(2 / 3, 1), (1.0, 2), (2 / 3, 3)])
    def test_unit_mass_and_ball_integral(self, alpha, N):
        G = get_kernel(alpha, N)
        assert G.total_mass == pytest.approx(1.0, abs=1e-6)
        coarse = BesselKernel(alpha, N, du=0.04)
        assert coarse.ball_mass(1.0) == pytest.approx(G.ball_mass(1.0), rel=1e-3)
        assert 0 < G.ball_mass(1.0) < 1

    def test_invalid_order(self):
        with pytest.raises(InvalidParameterError):
            BesselKernel(2.5, 1)
        with pytest.raises(InvalidParameterError):
            bessel_kernel_eval(get_kernel(1.0, 1), -1.0)


class TestCapacity:
    def test_empty(self):
        r = capacity(empty_set(1), P13)
        assert r.value == 0.0
        assert len(r.measure.weights) == 0

    def test_monotone_nested(self):
        c = CapacityControls(h=1 / 64, origin=(0.0,))
        assert capacity(IntervalUnion([(0, 0.5)]), P13, c).value <= capacity(IntervalUnion([(0, 1)]), P13, c).value

    def test_oracle_same_resolution(self, oracles):
        # the dense conic solve uses the same piecewise-constant model; values agree to the gap
        r = capacity(IntervalUnion([(0.0, 1.0)]), P13, CapacityControls(h=1 / 64, origin=(0.0,), gap_tol=1e-4))
        assert r.value == pytest.approx(oracles["capacity_oracle"]["capacity_unit_interval_h64"], rel=2e-3)

    def test_oracle_fine_resolution(self, oracles):
        r = capacity(IntervalUnion([(0.0, 1.0)]), P13)
        assert abs(r.value / oracles["capacity_oracle"]["capacity_unit_interval_h256"] - 1) < 0.05

    def test_duality_sandwich_and_feasibility(self):
        h = 1 / 16
        F = IntervalUnion([(0.0, 0.5)])
        r = capacity(F, P13, CapacityControls(h=h, origin=(0.0,)))
        assert r.dual_bound <= r.value
        assert r.rel_gap <= 1e-3
        assert r.measure.mass == pytest.approx(r.dual_bound, rel=1e-12)
        # independent potential of the density: cell integrals of the kv kernel
        x = r.grid_points.ravel()
        f = r.density.ravel()
        xs = discretize(F, h, [0.0]).ravel()
        g = lambda z: kv_kernel(abs(z), 2 / 3, 1)
        pot = [sum(fj * (quad(g, xj - h / 2 - xi, xj + h / 2 - xi, points=[0.0] if abs(xj - xi) < h else None)[0])
                   for xj, fj in zip(x, f) if fj > 0) for xi in xs]
        assert min(pot) >= 1 - 1e-3
        assert h * np.sum(f ** 1.5) == pytest.approx(r.value, rel=1e-6)

    def test_measure_support_and_mass(self):
        F = IntervalUnion([(-1.0, 1.0)])
        c = CapacityControls(h=1 / 32, origin=(0.0,))
        r = capacity(F, P13, c)
        nu = capacitary_measure(F, P13, c)
        pts = set(np.round(discretize(F, 1 / 32, [0.0]).ravel() * 32).astype(int))
        assert set(np.round(nu.atoms.ravel() * 32).astype(int)) <= pts
        assert abs(nu.mass - r.value) <= r.gap + 1e-12

    def test_measure_symmetric(self):
        nu = capacitary_measure(IntervalUnion([(-1.0, 1.0)]), P13, CapacityControls(h=1 / 32, origin=(0.0,),
                                                                                 gap_tol=1e-4))
        w = nu.weights[np.argsort(nu.atoms.ravel())]
        big = w > 1e-3 * w.max()
        assert np.all(np.abs(w - w[::-1])[big] <= 0.02 * w[big])

    def test_point_capacity_vanishes_under_refinement(self):
        # (2/q) q' = 1 <= N = 3: points are removable
        P = Params(3, 3.0)
        vals = [capacity_of_points(np.zeros((1, 3)), P, h, CapacityControls(margin=1.0)).value
                for h in (1 / 4, 1 / 8, 1 / 16)]
        assert vals[0] > vals[1] > vals[2]
        assert vals[2] < 0.1 * vals[0]

    def test_refinement_consistency(self):
        F = IntervalUnion([(-1.0, 1.0)])
        a = capacity(F, P13, CapacityControls(h=1 / 32, origin=(0.0,))).value
        b = capacity(F, P13, CapacityControls(h=1 / 64, origin=(0.0,))).value
        assert abs(a / b - 1) < 0.05

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidParameterError):
            capacity(PointSet([[0.0, 0.0]]), P13)


@st.composite
def interval_unions(draw):
    k = draw(st.integers(1, 3))
    out = []
    for _ in range(k):
        a = draw(st.floats(-1.0, 0.9))
        ln = draw(st.floats(0.0, 0.6))
        out.append((a, min(a + ln, 1.0)))
    return out


CTRL = CapacityControls(h=1 / 32, origin=(0.0,))


@given(interval_unions(), interval_unions())
def test_monotone_and_subadditive(a, b):
    A, B, U = IntervalUnion(a), IntervalUnion(b), IntervalUnion(a + b)
    ca, cb, cu = (capacity(S, P13, CTRL) for S in (A, B, U))
    assert ca.value <= cu.value + 2 * (ca.gap + cu.gap)
    assert cu.value <= ca.value + cb.value + 2 * (ca.gap + cb.gap + cu.gap)


class TestRelative:
    F = IntervalUnion([(-0.5, 0.5)])

    def test_empty(self):
        assert relative_capacity(empty_set(1), ([0.0], 1.0), P13).value == 0.0

    def test_not_inside(self):
        with pytest.raises(InvalidParameterError):
            relative_capacity(self.F, ([0.0], 0.4), P13)

    def test_radius_sweep(self):
        c = CapacityControls(h=1 / 64, origin=(0.0,))
        whole = capacity(self.F, P13, c).value
        rel = [relative_capacity(self.F, ([0.0], R), P13, c).value for R in (0.75, 2.0, 5.0)]
        assert all(v >= whole * (1 - 2e-3) for v in rel)
        assert rel[0] >= rel[1] * (1 - 2e-3) >= rel[2] * (1 - 4e-3)
        assert abs(rel[2] / whole - 1) < 0.05


class TestQuasiAdditivity:
    def test_single_part(self):
        F = IntervalUnion([(0.0, 1.0)])
        assert quasi_additivity_ratio([F], F, P13) == pytest.approx(1.0, abs=2e-3)

    def test_separated_parts(self):
        A, B = IntervalUnion([(-2.0, -1.0)]), IntervalUnion([(1.0, 2.0)])
        r = quasi_additivity_ratio([A, B], IntervalUnion([(-2.0, -1.0), (1.0, 2.0)]), P13, h=1 / 32)
        assert 1 - 2e-3 <= r <= 2

    def test_inconsistent(self):
        with pytest.raises(InconsistentCapacityError):
            quasi_additivity_ratio([IntervalUnion([(0.0, 1.0)])], empty_set(1), P13, h=1 / 32)
