import math

import numpy as np
import pytest

from capwiener import InvalidParameterError, Params
from capwiener.capacity import NonConvergedError
from capwiener.fixtures import fixture
from capwiener.geometry import BallUnion, IntervalUnion, PointSet, UnsupportedSetError, empty_set
from capwiener.heat import NonlinearControls, heat_kernel, heat_of_measure, lower_solution
from capwiener.measure import DiscreteMeasure
from capwiener.pde import (Field, MaximalControls, SaturationError, SpaceTimeGrid, fattened_indicator,
                           mass_balance_residual, maximal_solution, monotone_measure_sequence,
                           solve_semilinear, solve_with_measure)
from capwiener.verify import default_grid

P13 = Params(1, 3.0)


def flat(q, t):
    return ((q - 1) * t) ** (-1 / (q - 1))


def ode(q, c, t):
    return (c ** (1 - q) + (q - 1) * t) ** (-1 / (q - 1))


class TestGrid:
    def test_nodes(self):
        g = SpaceTimeGrid(L=1.0, h=0.25, T=1.0, dt=0.25)
        assert np.allclose(g.nodes, [-1, -0.75, -0.5, -0.25, 0, 0.25, 0.5, 0.75, 1])

    def test_radial_nodes(self):
        g = SpaceTimeGrid(L=1.0, h=0.5, T=1.0, dt=0.5, N=3)
        assert g.radial and np.allclose(g.nodes, [0, 0.5, 1])

    @pytest.mark.parametrize("kw", [dict(dt=0.2), dict(L=1.05), dict(h=-0.1), dict(N=0), dict(growth=0.5),
                                    dict(scheme="cn")])
    def test_invalid(self, kw):
        base = dict(L=1.0, h=0.1, T=1.0, dt=0.1)
        base.update(kw)
        with pytest.raises(InvalidParameterError):
            SpaceTimeGrid(**base)

    def test_outputs(self):
        g = SpaceTimeGrid(L=1.0, h=0.1, T=1.0, dt=0.1, n_out=4)
        assert np.allclose(g.output_times(), [0.25, 0.5, 0.75, 1.0])
        assert np.allclose(g.output_times(0.5), [0.75, 1.0])
        with pytest.raises(InvalidParameterError):
            SpaceTimeGrid(L=1.0, h=0.1, T=1.0, dt=0.1, outputs=(2.0,)).output_times()

    def test_refined(self):
        g = SpaceTimeGrid(L=1.0, h=0.1, T=1.0, dt=0.1).refined()
        assert g.h == 0.05 and g.dt == 0.05

    def test_dict_round_trip(self):
        g = SpaceTimeGrid(L=2.0, h=0.1, T=1.0, dt=0.05, outputs=(0.5, 1.0))
        assert SpaceTimeGrid.from_dict(g.to_dict()) == g
        with pytest.raises(InvalidParameterError, match="'dt'"):
            SpaceTimeGrid.from_dict({"L": 1, "h": 0.1, "T": 1})

    def test_domain_ok(self):
        F = IntervalUnion([(-1.0, 1.0)])
        assert SpaceTimeGrid(L=8.0, h=0.1, T=1.0, dt=0.1).domain_ok(F)
        assert not SpaceTimeGrid(L=4.0, h=0.1, T=1.0, dt=0.1).domain_ok(F)


class TestSolveSemilinear:
    def test_zero_data(self):
        g = SpaceTimeGrid(L=2.0, h=0.1, T=0.5, dt=0.1, n_out=3)
        f = solve_semilinear(np.zeros(len(g.nodes)), P13, g)
        assert not f.u.any()

    @pytest.mark.parametrize("q,c", [(3.0, 1.0), (2.0, 5.0), (1.5, 0.3)])
    def test_constant_data_matches_ode(self, q, c):
        g = SpaceTimeGrid(L=12.0, h=0.05, T=1.0, dt=0.05, outputs=(0.1, 0.5, 1.0))
        f = solve_semilinear(np.full(len(g.nodes), c), Params(1, q), g)
        for t in g.output_times():
            assert f.at(0.0, t) == pytest.approx(ode(q, c, t), rel=0.01)

    def test_linear_matches_heat_of_measure(self):
        mu = DiscreteMeasure([[-0.5], [0.7]], [1.0, 2.0])
        g = SpaceTimeGrid(L=10.0, h=0.01, T=1.0, dt=0.01, outputs=(0.02, 0.1, 1.0))
        f = solve_with_measure(mu, P13, g, 1e-3, absorption=False, check=False)
        for t in (0.02, 0.1, 1.0):
            ref = heat_of_measure(mu, g.nodes.reshape(-1, 1), t)
            assert np.abs(f.u[f.time_index(t)] - ref).max() <= 0.005 * ref.max()

    def test_radial_linear_matches_kernel(self):
        g = SpaceTimeGrid(L=8.0, h=0.02, T=0.5, dt=0.02, N=3, outputs=(0.1, 0.5))
        f = solve_with_measure(DiscreteMeasure([[0.0, 0.0, 0.0]], [1.0]), Params(3, 3.0), g, 1e-2,
                               absorption=False, check=False)
        for t in (0.1, 0.5):
            ref = np.array([heat_kernel(np.array([r, 0, 0]), t) for r in g.nodes])
            assert np.abs(f.u[f.time_index(t)] - ref).max() <= 0.005 * ref.max()

    def test_convergence_order(self):
        # smooth bump, errors against a fine reference; second-order scheme gives ratios near 4
        def run(h):
            g = SpaceTimeGrid(L=8.0, h=h, T=0.5, dt=h, outputs=(0.5,))
            return solve_semilinear(2 * np.exp(-g.nodes ** 2), P13, g).u[-1]

        h_ref = 0.1 / 16
        ref = run(h_ref)
        errs = [np.abs(run(h) - ref[::round(h / h_ref)]).max() for h in (0.1, 0.05, 0.025)]
        assert errs[0] / errs[1] >= 1.8 and errs[1] / errs[2] >= 1.8

    def test_absorption_lowers_solution(self):
        g = SpaceTimeGrid(L=6.0, h=0.05, T=1.0, dt=0.05, n_out=4)
        u0 = 3 * np.exp(-g.nodes ** 2)
        a = solve_semilinear(u0, P13, g)
        b = solve_semilinear(u0, P13, g, absorption=False)
        assert np.all(a.u <= b.u + 1e-14)

    def test_comparison(self):
        g = SpaceTimeGrid(L=6.0, h=0.05, T=1.0, dt=0.05, n_out=4)
        u0 = np.exp(-g.nodes ** 2)
        a = solve_semilinear(u0, P13, g)
        b = solve_semilinear(u0 + 0.5 * np.exp(-(g.nodes - 1) ** 2), P13, g)
        assert np.all(a.u <= b.u + 1e-14) and np.all(a.u >= 0)

    def test_bad_input(self):
        g = SpaceTimeGrid(L=1.0, h=0.1, T=1.0, dt=0.1)
        with pytest.raises(InvalidParameterError):
            solve_semilinear(np.zeros(3), P13, g)
        with pytest.raises(InvalidParameterError):
            solve_semilinear(-np.ones(len(g.nodes)), P13, g)
        with pytest.raises(InvalidParameterError):
            solve_semilinear(np.zeros(len(g.nodes)), Params(2, 3.0), g)


class TestMaximal:
    def test_empty_set(self):
        g = SpaceTimeGrid(L=4.0, h=0.05, T=0.5, dt=0.05, n_out=3)
        f = maximal_solution(empty_set(1), P13, g)
        assert not f.u.any() and f.diagnostics["k"] == 0

    @pytest.mark.parametrize("q", [2.0, 3.0])
    def test_flat(self, q):
        F = IntervalUnion([(-10.0, 10.0)])
        g = SpaceTimeGrid(L=14.0, h=0.02, T=0.5, dt=0.02, outputs=(0.01, 0.05, 0.1, 0.5))
        f = maximal_solution(F, Params(1, q), g)
        for t in g.output_times():
            assert f.at(0.0, t) == pytest.approx(flat(q, t), rel=0.02)
            # barrier: bounded by the flat solution everywhere
            assert f.u[f.time_index(t)].max() <= flat(q, t) * 1.02

    def test_monotone_in_set(self):
        g = SpaceTimeGrid(L=8.0, h=0.02, T=0.5, dt=0.02, outputs=(0.05, 0.2, 0.5))
        a = maximal_solution(IntervalUnion([(-0.5, 0.5)]), P13, g)
        b = maximal_solution(IntervalUnion([(-0.5, 0.5), (1.0, 1.5)]), P13, g)
        assert np.all(a.u <= b.u * (1 + 2e-3) + 1e-12)

    def test_self_similarity(self):
        # k^{1/(q-1)} ū_{√k F}(√k x, k t) = ū_F(x, t)
        k = 4.0
        F = fixture("interval")
        Fk = IntervalUnion([(-2.0, 2.0)])
        ts = (0.05, 0.125, 0.25)
        a = maximal_solution(F, P13, default_grid(F, 0.25, ts))
        b = maximal_solution(Fk, P13, default_grid(Fk, k * 0.25, tuple(k * t for t in ts)))
        for t in ts:
            for x in (0.0, 0.9, 1.5):
                lhs = k ** 0.5 * b.at(2 * x, k * t)
                assert lhs == pytest.approx(a.at(x, t), rel=0.05)

    def test_point_in_supercritical_dimension_vanishes(self):
        # {0} is removable for N=3, q=3: the maximal solution shrinks under refinement
        vals = []
        for h in (0.1, 0.05):
            g = SpaceTimeGrid(L=4.0, h=h, T=0.25, dt=h, N=3, outputs=(0.25,))
            vals.append(maximal_solution(PointSet([[0.0, 0.0, 0.0]]), Params(3, 3.0), g).at(0.0, 0.25))
        assert vals[1] < vals[0]

    def test_saturation_failure(self):
        g = SpaceTimeGrid(L=4.0, h=0.05, T=0.5, dt=0.05, n_out=2)
        with pytest.raises(SaturationError) as exc:
            maximal_solution(fixture("interval"), P13, g, MaximalControls(max_doublings=1, tol=1e-12))
        assert len(exc.value.fields) == 2

    def test_radial_needs_symmetric_set(self):
        g = SpaceTimeGrid(L=4.0, h=0.1, T=0.5, dt=0.1, N=2)
        with pytest.raises(UnsupportedSetError):
            fattened_indicator(BallUnion([[1.0, 0.0]], [0.5]), g)

    def test_controls_round_trip(self):
        c = MaximalControls(k0=5.0, tol=1e-4)
        assert MaximalControls.from_dict(c.to_dict()) == c


class TestMeasureData:
    def test_zero_measure(self):
        g = SpaceTimeGrid(L=4.0, h=0.05, T=0.5, dt=0.05, n_out=3)
        f = solve_with_measure(DiscreteMeasure(np.zeros((0, 1)), []), P13, g, 1e-3)
        assert not f.u.any()

    def test_between_lower_solution_and_heat(self):
        # subcritical q: atoms are admissible traces
        P = Params(1, 2.0)
        mu = DiscreteMeasure([[0.0]], [1.0])
        g = SpaceTimeGrid(L=8.0, h=0.01, T=1.0, dt=0.01, outputs=(0.1, 0.5, 1.0))
        eps0 = 1e-3
        f = solve_with_measure(mu, P, g, eps0)
        assert f.diagnostics["eps0_change"] < 0.01
        for t in (0.1, 0.5, 1.0):
            for x in (0.0, 0.5):
                u = f.at(x, t)
                assert u <= heat_of_measure(mu, [x], t) * (1 + 5e-3)
                low = lower_solution(mu, P, [x], t, NonlinearControls(eps0_rel=eps0 / t)).value
                assert u >= low * (1 - 5e-3)

    def test_eps0_check_failure(self):
        g = SpaceTimeGrid(L=4.0, h=0.05, T=0.5, dt=0.05, outputs=(0.1, 0.5))
        with pytest.raises(NonConvergedError):
            solve_with_measure(DiscreteMeasure([[0.0]], [50.0]), P13, g, 0.2, tol=1e-6)

    def test_invalid(self):
        g = SpaceTimeGrid(L=4.0, h=0.05, T=0.5, dt=0.05)
        with pytest.raises(InvalidParameterError):
            solve_with_measure(DiscreteMeasure([[0.0]], [1.0]), P13, g, 0.0)
        with pytest.raises(InvalidParameterError):
            solve_with_measure(DiscreteMeasure([[5.0]], [1.0]), P13, g, 1e-3)

    def test_monotone_sequence_saturates(self):
        F = fixture("interval")
        g = SpaceTimeGrid(L=8.0, h=0.01, T=1.0, dt=0.01, outputs=(0.25, 0.5, 1.0))
        ub = maximal_solution(F, P13, g)
        seq = monotone_measure_sequence(F, P13, g, 6)
        for a, b in zip(seq, seq[1:]):
            assert np.all(a.u <= b.u * (1 + 1e-3) + 1e-12)
        # the initial layer e^{ε₀Δ}μ reaches about 2√(4ε₀) beyond F, so compare with that fattening
        delta = 2 * math.sqrt(4e-3)
        ub_fat = maximal_solution(IntervalUnion([(-1 - delta, 1 + delta)]), P13, g)
        for f in seq:
            assert np.all(f.u <= ub_fat.u + 1e-12)
        assert seq[-1].at(0.0, 1.0) >= 0.9 * ub.at(0.0, 1.0)

    def test_sequence_subcritical(self):
        g = SpaceTimeGrid(L=4.0, h=0.05, T=0.5, dt=0.05)
        with pytest.raises(InvalidParameterError):
            monotone_measure_sequence(fixture("interval"), Params(1, 2.0), g, 2)


class TestMassBalance:
    def test_zero_field(self):
        g = SpaceTimeGrid(L=2.0, h=0.1, T=0.5, dt=0.1, outputs=(0.25, 0.5))
        f = solve_semilinear(np.zeros(len(g.nodes)), P13, g)
        assert mass_balance_residual(f, 0.25, 0.5) == 0.0

    def test_linear_conserves(self):
        g = SpaceTimeGrid(L=10.0, h=0.02, T=1.0, dt=0.02, outputs=(0.1, 1.0))
        f = solve_semilinear(np.exp(-g.nodes ** 2), P13, g, absorption=False)
        assert mass_balance_residual(f, 0.1, 1.0) < 1e-6

    def test_flat_balance_decreases(self):
        res = []
        for h in (0.04, 0.02):
            g = SpaceTimeGrid(L=14.0, h=h, T=0.5, dt=h, outputs=(0.1, 0.5))
            f = maximal_solution(IntervalUnion([(-10.0, 10.0)]), P13, g)
            res.append(mass_balance_residual(f, 0.1, 0.5))
        assert res[0] < 0.01 and res[1] < res[0]

    def test_times_must_be_stored(self):
        g = SpaceTimeGrid(L=2.0, h=0.1, T=0.5, dt=0.1, outputs=(0.25, 0.5))
        f = solve_semilinear(np.exp(-g.nodes ** 2), P13, g)
        with pytest.raises(InvalidParameterError):
            mass_balance_residual(f, 0.5, 0.25)
        with pytest.raises(InvalidParameterError):
            mass_balance_residual(f, 0.1234, 0.5)


class TestField:
    def test_csv_and_summary(self):
        g = SpaceTimeGrid(L=0.5, h=0.25, T=0.5, dt=0.25, outputs=(0.5,))
        f = solve_semilinear(np.array([0, 1.0, 2.0, 1.0, 0]), P13, g)
        lines = f.to_csv().splitlines()
        assert lines[0] == "t,x,u" and len(lines) == 1 + 5
        s = f.summary()
        assert s["times"] == [0.5] and s["mass"][0] == pytest.approx(f.mass(0.5))
        assert s["max"][0] == pytest.approx(f.u.max())

    def test_time_lookup(self):
        g = SpaceTimeGrid(L=1.0, h=0.1, T=0.5, dt=0.1, outputs=(0.5,))
        f = solve_semilinear(np.zeros(len(g.nodes)), P13, g)
        with pytest.raises(InvalidParameterError):
            f.at(0.0, 0.4)
