import math

import numpy as np
import pytest

from capwiener import InvalidParameterError, Params
from capwiener.fixtures import fixture
from capwiener.geometry import IntervalUnion, empty_set
from capwiener.pde import SpaceTimeGrid, maximal_solution, monotone_measure_sequence
from capwiener.verify import (RatioReport, _add, bilateral_ratio, capacity_equivalence_check, default_grid,
                              est5_experiment, lower_bound_experiment, ring_quasi_additivity, sample_grid,
                              uplem_bound, uplem_experiment)

P13 = Params(1, 3.0)
HALF = IntervalUnion([(-0.5, 0.5)])
UPLEM_SAMPLES = {0.25: (1.6, 3.2), 0.5: (4.0, 6.4)}


def within_drift(value, pinned, drift=2.0):
    return pinned / drift <= value <= pinned * drift


@pytest.fixture(scope="module")
def lower_interval():
    return lower_bound_experiment(fixture("interval"), P13, 0.0, 1.0)


class TestRatioReport:
    def test_threshold_exclusion(self):
        rep = RatioReport("x", {}, threshold=1e-3)
        _add(rep, P13, 0.0, 1.0, 0.5, 1.0)
        _add(rep, P13, 0.0, 1.0, 1e-9, 1.0)
        s = rep.summary()
        assert s["count"] == 1 and s["excluded"] == 1 and s["min"] == 0.5
        assert rep.to_csv().splitlines()[2].endswith(",")

    def test_sample_grid_scales(self):
        a = sample_grid(fixture("interval"))
        b = sample_grid(IntervalUnion([(-2.0, 2.0)]), T=2.0)
        assert len(a) == 25
        for (x1, t1), (x2, t2) in zip(a, b):
            assert x2 == pytest.approx(2 * x1) and t2 == pytest.approx(4 * t1)

    def test_default_grid(self):
        g = default_grid(fixture("interval"), 0.5, (0.1, 0.5))
        assert g.domain_ok(fixture("interval")) and g.h == pytest.approx(0.01)


class TestEmpty:
    def test_bilateral(self):
        rep = bilateral_ratio(empty_set(1), P13)
        assert rep.vacuous and rep.summary()["vacuous"] and rep.excluded == 2

    def test_uplem(self):
        assert uplem_experiment(empty_set(1), P13, 0.5, 0.25, [(0.0, 1.6)]).vacuous

    def test_est5(self):
        assert est5_experiment(empty_set(1), P13, 0.0, 1.0)["vacuous"]

    def test_lower_bound(self):
        rep = lower_bound_experiment(empty_set(1), P13, 0.0, 1.0)
        assert rep.chain_holds and rep.W == rep.lower == rep.solution == 0

    def test_equivalence(self):
        assert capacity_equivalence_check(empty_set(1), [0.0], 2, P13) == (0.0, 0.0)


class TestBilateral:
    def test_preconditions(self):
        with pytest.raises(InvalidParameterError):
            bilateral_ratio(fixture("interval"), Params(1, 2.0))
        with pytest.raises(InvalidParameterError):
            bilateral_ratio(fixture("ball"), Params(2, 3.0))

    def test_ratios_positive_with_budget(self):
        rep = bilateral_ratio(fixture("interval"), P13, samples=[(0.0, 0.1), (1.5, 0.5)])
        assert np.all(rep.ratios > 0) and np.all(np.isfinite(rep.ratios))
        assert rep.budget["capacity_rel_gap_max"] < 0.05
        assert set(rep.to_dict()) >= {"id", "fixture", "samples", "summary", "budget"}


class TestLowerBound:
    def test_chain(self, lower_interval, pinned):
        r = lower_interval
        assert r.chain_holds and r.c > 0
        assert r.solution >= r.lower and r.lower >= 0.5 * r.heat_eps
        assert within_drift(r.c, pinned["lowerbound"]["interval"])
        assert r.est4["holds"]

    def test_two_intervals_stable(self, lower_interval, pinned):
        r = lower_bound_experiment(fixture("two-intervals"), P13, 0.0, 0.5)
        assert r.chain_holds
        assert 1 / 3 <= r.c / lower_interval.c <= 3
        assert within_drift(r.c, pinned["lowerbound"]["two-intervals"])

    def test_report_fields(self, lower_interval):
        d = lower_interval.to_dict()
        for key in ("solution", "lower", "W", "eps", "budget", "j1", "j2"):
            assert key in d


@pytest.fixture(scope="module")
def reports():
    return {rho: uplem_experiment(HALF, P13, 0.5, rho, [(x, t) for t in ts for x in (0.0, 1.0, 2.0)])
            for rho, ts in UPLEM_SAMPLES.items()}


class TestUplem:
    def test_pinned(self, reports, pinned):
        for rho, rep in reports.items():
            assert within_drift(rep.summary()["max"], pinned["uplem"][str(rho)])

    def test_rho_sweep(self, reports):
        a, b = (reports[r].summary()["max"] for r in (0.25, 0.5))
        assert max(a, b) / min(a, b) < 3

    def test_bound_formula(self):
        v = uplem_bound(P13, 0.5, 0.25, 2.0, 1.6, 1.0)
        assert v == pytest.approx(3 ** 0.5 * 1.6 ** -0.5 * math.exp(-(2 - 1.25) ** 2 / 6.4))

    def test_preconditions(self):
        with pytest.raises(InvalidParameterError, match="t >="):
            uplem_experiment(HALF, P13, 0.5, 0.25, [(0.0, 1.0)])
        with pytest.raises(InvalidParameterError, match="B_r"):
            uplem_experiment(fixture("interval"), P13, 0.5, 0.25, [(0.0, 2.0)])
        with pytest.raises(InvalidParameterError):
            uplem_experiment(HALF, P13, 0.5, 0.0, [(0.0, 2.0)])


class TestEquivalence:
    @pytest.mark.parametrize("F", [IntervalUnion([(-0.2, 0.2)]), IntervalUnion([(-0.4, 0.1)])])
    def test_stable_in_n(self, F):
        ratios = {}
        for n in (0, 1, 3):
            lhs, rhs = capacity_equivalence_check(F, [0.0], n, P13)
            ratios[n] = lhs / rhs
        assert 0.5 <= ratios[0] <= 2
        assert max(ratios.values()) / min(ratios.values()) <= 2

    def test_precondition(self):
        with pytest.raises(InvalidParameterError):
            capacity_equivalence_check(fixture("interval"), [0.0], 3, P13)


class TestRing:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_bounded_by_pinned(self, n, pinned):
        r = ring_quasi_additivity(fixture("ring"), Params(2, 2.0), n)
        assert r["pieces"] >= 1
        # the capacity gap allows a sum slightly below the whole
        assert 1 - 1e-2 <= r["ratio"] <= 2 * pinned["ring"][str(n)]


class TestEst5:
    def test_family(self, pinned):
        rep = est5_experiment(fixture("interval"), P13, 0.0, 1.0)
        assert not rep["vacuous"] and rep["spread"] < 0.25
        assert within_drift(rep["rows"][1]["ratio"], pinned["est5"]["interval"])

    def test_one_dimensional_only(self):
        with pytest.raises(InvalidParameterError):
            est5_experiment(fixture("ball"), Params(2, 3.0), 0.0, 1.0)


def test_saturation_trend():
    # the sup ratio of the maximal solution to the measure-sequence solutions decreases
    F = fixture("interval")
    g = SpaceTimeGrid(L=8.0, h=0.01, T=1.0, dt=0.01, outputs=(0.5, 1.0))
    ub = maximal_solution(F, P13, g)
    seq = monotone_measure_sequence(F, P13, g, 5)
    sel = np.abs(g.nodes) <= 1.0
    sups = [float((ub.u[:, sel] / f.u[:, sel]).max()) for f in seq]
    assert all(b < a for a, b in zip(sups, sups[1:]))
