import math

import numpy as np
import pytest
from scipy import stats

from mcupdate import inference as I
from mcupdate import standin
from mcupdate.density import Family
from mcupdate.rng import substream


def normal_entry(lo, hi, prob=1.0):
    return I.CatalogEntry(Family.NORMAL, I.PriorBox(lo, hi), prob)


def test_evidence_against_tensor_quadrature():
    entry = normal_entry((-1.0, 0.5), (1.0, 2.0))
    ev = I.evidence([0.0], entry, 100_000, substream(1, "ev"))
    # 400 x 400 midpoint rule over the prior box
    mu = -1 + (np.arange(400) + 0.5) * 2 / 400
    sd = 0.5 + (np.arange(400) + 0.5) * 1.5 / 400
    M, S = np.meshgrid(mu, sd)
    ref = stats.norm.pdf(0.0, M, S).mean()
    assert ev.estimate > 0 and math.isfinite(ev.estimate)
    assert ev.estimate == pytest.approx(ref, rel=5 * ev.std_error / ev.estimate + 1e-4)
    assert ev.log_estimate == pytest.approx(math.log(ev.estimate))


def test_evidence_error_shrinks_with_nk():
    data = np.full(5, 5.0)
    entry = normal_entry((4.9, 0.05), (5.1, 0.5))
    small = I.evidence(data, entry, 1_000, substream(1, "a"))
    large = I.evidence(data, entry, 100_000, substream(1, "b"))
    assert large.std_error < small.std_error / 5
    assert large.estimate == pytest.approx(small.estimate, rel=6 * small.std_error / small.estimate)


def test_prior_box_zero_volume():
    with pytest.raises(ValueError):
        I.PriorBox((0.0, 1.0), (0.0, 2.0))


def test_evidence_underflow_flag():
    ev = I.evidence([1e6], normal_entry((-1.0, 0.1), (1.0, 0.2)), 1000, substream(1, "u"))
    assert ev.estimate == 0.0 and ev.underflow


def test_posteriors_single_and_symmetric():
    data = stats.norm.rvs(size=20, random_state=1)
    one = I.ModelCatalog((normal_entry((-1.0, 0.5), (1.0, 2.0)),))
    post, _, _ = I.model_posteriors(data, one, 1000, substream(1, "p"))
    assert post[0] == 1.0
    two = I.ModelCatalog((normal_entry((-1.0, 0.5), (1.0, 2.0), 0.5), normal_entry((-1.0, 0.5), (1.0, 2.0), 0.5)))
    lev = [I.evidence(data, e, 1000, substream(1, "same")).log_estimate for e in two]
    post, flat = I.posteriors_from_log_evidence(lev, [0.5, 0.5])
    np.testing.assert_allclose(post, [0.5, 0.5])
    assert not flat


def test_posteriors_all_zero_is_uniform():
    post, flat = I.posteriors_from_log_evidence([-math.inf] * 3, [0.2, 0.3, 0.5])
    np.testing.assert_allclose(post, [1 / 3] * 3)
    assert flat


def test_normal_data_prefers_normal_family():
    data = stats.norm.rvs(size=10_000, random_state=2)
    cat = I.default_catalog(data)
    assert {e.family for e in cat} == {Family.NORMAL, Family.LOGISTIC}
    post, evs, _ = I.model_posteriors(data, cat, 2000, substream(2, "fam"))
    assert dict(zip([e.family for e in cat], post))[Family.NORMAL] > 0.99
    # on a small subsample the Monte Carlo evidences agree with tensor quadrature
    sub = data[:30]
    sub_cat = I.default_catalog(sub)
    _, sub_evs, _ = I.model_posteriors(sub, sub_cat, 100_000, substream(2, "sub"))
    for e, ev in zip(sub_cat, sub_evs):
        a = np.linspace(e.prior.lower[0], e.prior.upper[0], 801)
        b = np.linspace(e.prior.lower[1], e.prior.upper[1], 801)
        A, B = np.meshgrid(0.5 * (a[1:] + a[:-1]), 0.5 * (b[1:] + b[:-1]))
        ll = I.log_likelihood(e.family, np.column_stack([A.ravel(), B.ravel()]), sub)
        ref = np.log(np.mean(np.exp(ll - ll.max()))) + ll.max()
        assert ev.log_estimate == pytest.approx(ref, abs=4 * ev.std_error / ev.estimate + 0.01)


def test_map_normal_closed_form():
    params, degenerate = I.map_fit([1.0, 2.0, 3.0], Family.NORMAL)
    assert params[0] == pytest.approx(2.0, abs=1e-6)
    assert params[1] == pytest.approx(math.sqrt(2 / 3), abs=1e-6)
    assert not degenerate


def test_map_lognormal_degenerate_data():
    params, degenerate = I.map_fit([math.e] * 3, Family.LOGNORMAL)
    box = I.default_prior(Family.LOGNORMAL, [math.e] * 3)
    assert params[0] == pytest.approx(1.0, abs=1e-9)
    assert params[1] == pytest.approx(box.lower[1], rel=1e-6)
    assert degenerate


def test_map_rejects_unsupported_data():
    with pytest.raises(I.FitError, match="Lognormal"):
        I.map_fit([-1.0, 2.0], Family.LOGNORMAL)


def test_gamma_fit_matches_sample_mean():
    data = standin.stages()[0]
    (k, theta), _ = I.map_fit(data, Family.GAMMA)
    assert k * theta == pytest.approx(np.mean(data), rel=0.01)


@pytest.mark.parametrize("family", I.FAMILIES)
def test_map_matches_scipy_mle(family):
    data = standin.stages()[-1]
    params, _ = I.map_fit(data, family)
    ours = I.log_likelihood(family, np.array([params]), data)[0]
    start = I.moment_start(family, data)
    ref = I.log_likelihood(family, np.array([start]), data)[0]
    assert ours >= ref - 1e-9


def test_fit_is_reproducible():
    data = standin.stages()[1]
    a = I.fit(data, n_k=2000, rng=substream(3, "fit"))
    b = I.fit(data, n_k=2000, rng=substream(3, "fit"))
    assert a.to_json() == b.to_json()
    assert sum(a.posteriors.values()) == pytest.approx(1.0)


def test_select_tie_breaks_on_parameter_count_then_name():
    cat = I.ModelCatalog((
        I.CatalogEntry(Family.WEIBULL, I.PriorBox((1.0, 1.0), (2.0, 2.0)), 0.5),
        I.CatalogEntry(Family.GAMMA, I.PriorBox((1.0, 1.0), (2.0, 2.0)), 0.5),
    ))
    assert I.select(cat, [0.5, 0.5]).family is Family.GAMMA
