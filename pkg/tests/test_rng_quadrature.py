import math

import numpy as np
import pytest
from scipy import stats

from mcupdate import density as D
from mcupdate.quadrature import QuadratureError, integrate
from mcupdate.rng import child_seed, substream


def test_substreams_reproducible_and_distinct():
    a = substream(7, "tables", "case1").random(5)
    b = substream(7, "tables", "case1").random(5)
    c = substream(7, "tables", "case2").random(5)
    d = substream(8, "tables", "case1").random(5)
    np.testing.assert_array_equal(a, b)
    assert not np.allclose(a, c) and not np.allclose(a, d)


def test_seed_required():
    with pytest.raises(ValueError):
        substream(None, "x")


def test_child_seed_is_stable_63_bit():
    s = child_seed(1, "stage", 3)
    assert s == child_seed(1, "stage", 3)
    assert 0 <= s < 2**63


def test_integrate_normalization():
    assert integrate(D.normal(0, 1).pdf, (-math.inf, math.inf)) == pytest.approx(1.0, abs=1e-10)
    assert integrate(D.beta(4, 2).pdf, (0.0, 1.0)) == pytest.approx(1.0, abs=1e-10)


def test_integrate_l1_distance_closed_form():
    p, q = D.normal(10, 1), D.normal(10.2, 1)
    got = integrate(lambda x: abs(q.pdf(x) - p.pdf(x)), (-math.inf, math.inf), points=[10.1])
    assert got == pytest.approx(2 * (2 * stats.norm.cdf(0.1) - 1), abs=1e-9)
    assert got == pytest.approx(0.1594, abs=2e-4)


def test_integrate_failure_carries_estimate():
    with pytest.raises(QuadratureError) as err:
        integrate(lambda x: 1.0 / x, (0.0, 1.0), limit=5)
    assert math.isfinite(err.value.estimate)
