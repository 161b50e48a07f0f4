import json
import math

import mpmath
import numpy as np
import pytest
from scipy import stats

from mcupdate import density as D
from mcupdate.density import Density, Family, SupportInterval


def test_normal_mode_height():
    assert D.normal(10, 1).pdf(10.0) == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-14)


def test_beta_boundary_is_zero():
    assert D.beta(4, 2).pdf(0.0) == 0.0
    assert D.beta(4, 2).logpdf(0.0) == -math.inf


def test_gamma_pdf_against_high_precision():
    k, theta, x = 224.6, 0.1565, 35.15
    mpmath.mp.dps = 40
    ref = mpmath.exp((k - 1) * mpmath.log(x) - x / theta - mpmath.loggamma(k) - k * mpmath.log(theta))
    got = D.gamma(k, theta).pdf(x)
    assert got == pytest.approx(float(ref), rel=1e-11)


def test_nonfinite_input_raises():
    with pytest.raises(ValueError):
        D.normal(0, 1).pdf(np.nan)
    with pytest.raises(ValueError):
        D.normal(0, 1).logpdf([0.0, np.inf])


@pytest.mark.parametrize("bad", [
    lambda: D.normal(0, 0),
    lambda: D.beta(-1, 2),
    lambda: D.gamma(1, -1),
    lambda: D.mixture([0.5, 0.6], [D.normal(0, 1), D.normal(1, 1)]),
])
def test_invalid_parameters(bad):
    with pytest.raises(ValueError):
        bad()


def test_supports():
    assert D.normal(0, 1).support.kind == D.SupportKind.INFINITE
    s = D.beta(4, 2).support
    assert (s.lower, s.upper) == (0.0, 1.0)
    assert D.lognormal(0, 1).support.lower == 0.0
    m = D.mixture([0.5, 0.5], [D.beta(2, 2), D.gamma(2, 1)])
    assert m.support.lower == 0.0 and m.support.upper == math.inf


def test_support_interval_json_sentinels():
    s = SupportInterval(-math.inf, 1.0)
    assert s.to_json() == ["-inf", 1.0]
    assert SupportInterval.from_json(s.to_json()) == s


def test_draw_empty(rng):
    assert D.normal(0, 1).draw(0, rng).shape == (0,)


def test_draw_means(rng):
    assert abs(D.normal(10, 1).draw(100_000, rng).mean() - 10) < 0.02
    assert abs(D.beta(4, 2).draw(100_000, rng).mean() - 4 / 6) < 0.004


def test_mixture_pdf_and_draws(rng):
    m = D.mixture([0.4, 0.6], [D.normal(9, 0.5), D.normal(11, 0.5)])
    x = np.linspace(7, 13, 7)
    ref = 0.4 * stats.norm.pdf(x, 9, 0.5) + 0.6 * stats.norm.pdf(x, 11, 0.5)
    np.testing.assert_allclose(m.pdf(x), ref, rtol=1e-12)
    draws = m.draw(20_000, rng)
    assert stats.kstest(draws, m.cdf).pvalue > 0.001
    assert m.mean() == pytest.approx(0.4 * 9 + 0.6 * 11)


@pytest.mark.parametrize("d", [
    D.normal(1, 2), D.lognormal(-0.44, 0.2627), D.gamma(3, 2), D.beta(4, 2), D.weibull(2, 3),
    D.logistic(0, 1), D.loglogistic(4, 2), D.nakagami(2, 3),
])
def test_families_normalized_and_sampled(d, rng):
    lo, hi = d.support.lower, d.support.upper
    from scipy.integrate import quad
    assert quad(d.pdf, lo, hi, limit=200)[0] == pytest.approx(1.0, abs=1e-8)
    assert stats.kstest(d.draw(5000, rng), d.cdf).pvalue > 0.001


def test_nakagami_convention():
    # Omega is the second moment
    d = D.nakagami(2.0, 3.0)
    from scipy.integrate import quad
    assert quad(lambda x: x * x * d.pdf(x), 0, np.inf)[0] == pytest.approx(3.0, rel=1e-9)


def test_json_round_trip_and_hash():
    m = D.mixture([0.4, 0.6], [D.normal(9, 0.5), D.beta(4, 2)])
    text = json.dumps(m.to_json())
    back = Density.from_json(json.loads(text))
    assert back == m and hash(back) == hash(m)
    assert Density.from_json({"family": "Normal", "params": [0, 1]}).family is Family.NORMAL


def test_tail_order_ranks():
    # larger tuples decay faster
    assert D.normal(0, 0.5).tail_order("upper") > D.normal(0, 1).tail_order("upper")
    assert D.normal(0, 1).tail_order("upper") > D.gamma(2, 1).tail_order("upper")
    assert D.gamma(2, 1).tail_order("upper") > D.lognormal(0, 1).tail_order("upper")
    assert D.lognormal(0, 1).tail_order("upper") > D.loglogistic(3, 1).tail_order("upper")
