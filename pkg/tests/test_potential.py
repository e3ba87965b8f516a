import csv
import io
import math

import numpy as np
import pytest
from hypothesis import example, given
from hypothesis import strategies as st

from capwiener import Params
from capwiener.capacity import CapacityControls, capacity
from capwiener.fixtures import fixture
from capwiener.geometry import IntervalUnion, empty_set, slice
from capwiener.potential import (DEFAULT_SLICE_SPACING, UnsupportedRegimeError, similarity_pair, w_potential)

P13 = Params(1, 3.0)


def test_empty():
    assert w_potential(empty_set(1), P13, [0.0], 1.0).total == 0.0


def test_interval_two_terms_resummed():
    F = fixture("interval")
    W = w_potential(F, P13, [0.0], 1.0)
    assert [r.n for r in W.terms] == [0, 1]
    assert all(r.capacity > 0 for r in W.terms)
    total = 0.0
    for n in (0, 1):
        s = math.sqrt(n + 1)
        piece = slice(F, [0.0], 1.0, n).scaled(1 / s)
        c = capacity(piece, P13, CapacityControls(h=DEFAULT_SLICE_SPACING, origin=(0.0,))).value
        total += (n + 1) ** (0.5 - 0.5) * math.exp(-n / 4) * c
    assert W.prefactor == 1.0
    assert W.total == pytest.approx(total, rel=1e-12)
    assert W.total == pytest.approx(W.prefactor * math.fsum(r.weight * r.capacity for r in W.terms), rel=1e-12)


def test_subcritical_rejected():
    with pytest.raises(UnsupportedRegimeError, match="vss"):
        w_potential(fixture("interval"), Params(1, 2.0), [0.0], 1.0)


def test_similarity_identity():
    a, b = similarity_pair(fixture("interval"), P13, [0.0], 1.0, 1.0)
    assert a == b


@pytest.mark.parametrize("k", [0.25, 4.0])
def test_similarity(k):
    a, b = similarity_pair(fixture("interval"), P13, [0.0], 1.0, k)
    assert abs(a - b) / b < 0.05


def test_point_refinement():
    # (2/q) q' <= N: the potential of a point vanishes in the refinement limit
    F = fixture("point")
    vals = [w_potential(F, P13, [0.0], 1.0, CapacityControls(h=h)).total for h in (1 / 16, 1 / 64, 1 / 256)]
    assert vals[0] > vals[1] > vals[2] > 0


@given(st.floats(-2.5, 2.5), st.floats(0.05, 2.0))
def test_monotone_in_set(x, t):
    small = IntervalUnion([(-0.5, 0.25)])
    big = IntervalUnion([(-0.75, 0.5)])
    a = w_potential(small, P13, [x], t, tail_rtol=1e-10)
    b = w_potential(big, P13, [x], t, tail_rtol=1e-10)
    assert a.total <= b.total + 2 * (a.gap + b.gap)


def test_distance_decay():
    F = fixture("interval")
    t = 0.5
    Ws = [w_potential(F, P13, [1.0 + d], t) for d in (0.5, 1.0, 2.0)]
    assert Ws[0].total > Ws[1].total > Ws[2].total
    # the first nonempty slice moves out by at least floor(dist^2/t) as the point recedes
    for d, W in zip((0.5, 1.0, 2.0), Ws):
        first = min(r.n for r in W.terms if r.capacity > 0)
        assert first >= math.floor(d * d / t) - 1
        assert W.total <= t ** -0.5 * math.exp(-first / 4) * sum(
            (r.n + 1) ** P13.slice_exponent * math.exp(-(r.n - first) / 4) * r.capacity for r in W.terms) + 1e-15


@given(st.floats(-3, 3), st.floats(-2, 2), st.floats(0.1, 2.0))
@example(0.75, 0.0, 0.5)  # an endpoint lies on a slice sphere
@example(0.1, -2.0, 1.0)  # the same, with a one-ulp piece inside the outer sphere
def test_translation(z, x, t):
    F = IntervalUnion([(-1.0, -0.25), (0.5, 1.0)])
    a = w_potential(F, P13, [x], t, tail_rtol=1e-10).total
    b = w_potential(F.translated([z]), P13, [x + z], t, tail_rtol=1e-10).total
    assert b == pytest.approx(a, rel=1e-6, abs=1e-12)


def test_tail_truncation_is_certified():
    F = fixture("two-intervals")
    full = w_potential(F, P13, [0.0], 0.05)
    cut = w_potential(F, P13, [0.0], 0.05, tail_rtol=1e-6)
    assert len(cut.terms) < len(full.terms)
    assert 0 <= full.total - cut.total <= cut.prefactor * cut.omitted + 1e-12


def test_jobs_do_not_change_result():
    F = fixture("cantor-2")
    a = w_potential(F, P13, [0.3], 0.2, jobs=1)
    b = w_potential(F, P13, [0.3], 0.2, jobs=3)
    assert a.to_dict() == b.to_dict()


def test_csv():
    W = w_potential(fixture("interval"), P13, [0.0], 1.0)
    rows = list(csv.reader(io.StringIO(W.to_csv())))
    assert rows[0] == ["n", "weight", "capacity", "contribution"]
    assert rows[-1][0] == "total"
    assert float(rows[-1][3]) == W.total
    assert len(rows) == len(W.terms) + 2


def test_contributions_nonnegative():
    W = w_potential(fixture("cantor-3"), P13, [1.5], 0.3)
    assert all(r.contribution >= 0 for r in W.terms)
    assert np.isfinite(W.total)
