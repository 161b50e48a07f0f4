import math

import numpy as np
import pytest

from mcupdate import buckling as B
from mcupdate import density as D
from mcupdate.rng import substream
from mcupdate.samples import SampleSet


def hand_carlsen(b, t, s0, E, d0, eta):
    lam = b / t * math.sqrt(s0 / E)
    return (2.1 / lam - 0.9 / lam**2) * (1 - 0.75 * d0 / lam) * (1 - 2 * eta * t / b)


def test_slenderness():
    assert B.slenderness(B.PlateSpec(2.0, 2.0, 5.0, 5.0, 0.1, 0.1)) == 1.0
    assert B.slenderness(B.NOMINAL) == pytest.approx(1.6436, abs=1e-4)
    wide = B.PlateSpec(72.0, 0.75, 34.0, 29000.0, 0.35, 5.25)
    assert B.slenderness(wide) == pytest.approx(2 * B.slenderness(B.NOMINAL), rel=1e-15)


def test_pristine():
    assert B.strength_pristine(1.0) == 1.0
    assert B.strength_pristine(2.0) == 0.75
    assert 0 < B.strength_pristine(1e9) < 1e-8
    with pytest.raises(ValueError):
        B.strength_pristine(0.0)


def test_pristine_decreasing_above_one():
    lam = np.linspace(1.0001, 10, 2000)
    assert np.all(np.diff(B.strength_pristine(lam)) < 0)


def test_carlsen_nominal_hand_value():
    got = B.strength_carlsen(B.NOMINAL)
    assert got == pytest.approx(hand_carlsen(36.0, 0.75, 34.0, 29000.0, 0.35, 5.25), abs=1e-10)
    assert got == pytest.approx(0.6201, abs=1e-4)


def test_carlsen_collapses_to_1_2():
    # delta0 and eta are tiny; b = t and sigma0 = E give lambda = 1
    spec = B.PlateSpec(1.0, 1.0, 1.0, 1.0, 1e-300, 1e-300)
    assert B.strength_carlsen(spec) == pytest.approx(1.2, abs=1e-12)


def test_carlsen_decreases_in_eta():
    vals = [B.strength_carlsen(B.PlateSpec(36.0, 0.75, 34.0, 29000.0, 0.35, e)) for e in (1, 3, 5, 7)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_carlsen_decreasing_in_lambda_on_range():
    for lam in np.linspace(1.2, 2.5, 50):
        s0 = (lam * 0.75 / 36.0) ** 2 * 29000.0
        s1 = ((lam + 1e-3) * 0.75 / 36.0) ** 2 * 29000.0
        a = B.strength_carlsen(B.PlateSpec(36.0, 0.75, s0, 29000.0, 0.35, 5.25))
        b = B.strength_carlsen(B.PlateSpec(36.0, 0.75, s1, 29000.0, 0.35, 5.25))
        assert b < a


def test_inadmissible_specs():
    with pytest.raises(B.InadmissibleSpec):
        B.PlateSpec(0.0, 1.0, 1.0, 1.0, 1.0, 1.0)
    with pytest.raises(B.InadmissibleSpec):
        B.strength_carlsen(B.PlateSpec(1.0, 1.0, 1.0, 1.0, 0.1, 0.6))


def test_mean_values():
    assert B.MEAN.b == pytest.approx(0.992 * 36)
    assert B.MEAN.delta0 == 0.35 and B.MEAN.eta == 5.25


def test_spec_override(tmp_path):
    path = tmp_path / "spec.json"
    path.write_text('{"eta": 4.0}')
    spec = B.PlateSpec.load(path, B.NOMINAL)
    assert spec.eta == 4.0 and spec.b == 36.0


def test_degenerate_cdf():
    prop = B.propagate(np.full(100, 34.0))
    expect = B.strength_carlsen(B.PlateSpec(B.MEAN.b, B.MEAN.t, 34.0, B.MEAN.E, B.MEAN.delta0, B.MEAN.eta))
    np.testing.assert_allclose(prop.psi, expect)
    np.testing.assert_array_equal(prop.table[1], 1.0)


def test_higher_yield_shifts_cdf():
    x = D.gamma(224.6, 0.1565).draw(1000, substream(1, "b"))
    lo, hi = B.propagate(x), B.propagate(x * 1.05)
    assert np.all(hi.psi < lo.psi)


def test_cdf_table_properties(tmp_path):
    s = SampleSet.draw(D.gamma(224.6, 0.1565), 10_000, substream(1, "b"))
    prop = B.propagate(s)
    v, c = prop.table
    assert len(v) == 10_000 and np.all(np.diff(v) >= 0) and np.all(np.diff(c) >= 0)
    assert c[0] > 0 and c[-1] == pytest.approx(1.0, abs=1e-12)
    prop.to_csv(tmp_path / "cdf.csv")
    v2, c2 = B.read_cdf_csv(tmp_path / "cdf.csv")
    np.testing.assert_array_equal(v2, v)
    np.testing.assert_array_equal(c2, c)


def test_weighted_ecdf_ties_and_weights():
    v, c = B.weighted_ecdf([2.0, 1.0, 2.0], [1.0, 2.0, 1.0])
    np.testing.assert_array_equal(v, [1.0, 2.0, 2.0])
    np.testing.assert_allclose(c, [0.5, 1.0, 1.0])


def test_kolmogorov_distance():
    assert B.kolmogorov_distance([1.0, 2.0], None, [1.0, 2.0], None) == 0.0
    assert B.kolmogorov_distance([0.0], None, [1.0], None) == 1.0


def test_full_joint_needs_rng():
    with pytest.raises(ValueError):
        B.propagate(np.full(10, 34.0), full_joint=True)
    prop = B.propagate(np.full(10, 34.0), full_joint=True, rng=substream(1, "j"))
    assert len(np.unique(prop.psi)) == 10
