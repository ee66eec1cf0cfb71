"""Criterion functionals against closed forms and quadrature oracles."""

import math

import mpmath as mp
import numpy as np
import pytest

from stable_ergo import measure
from stable_ergo.errors import NotErgodic, TailUndetermined
from stable_ergo.sigma import ExpressionSigma, PolynomialSigma

mp.mp.dps = 30

ALPHAS = [1.2, 1.5, 1.8]
GAMMAS = [1.5, 2.0, 3.0]


def closed_delta_plus(g, a):
    if g == 1.0:
        return 1.0 / (a - 1.0)
    return (
        (a - 1.0) ** (a - 1.0)
        * (a * (g - 1.0)) ** (a * (g - 1.0))
        / (a * g - 1.0) ** (a * g)
    )


def test_mu_total_poly2():
    v = measure.mu_total(PolynomialSigma(2.0), 1.5)
    assert v.value == pytest.approx(1.0, rel=1e-9)


def test_mu_total_divergent_constant():
    v = measure.mu_total(ExpressionSigma("1"), 1.5)
    assert not v.is_finite
    assert "exponent" in v.reason


@pytest.mark.parametrize("g,a", [(0.5, 1.5), (0.7, 1.5), (2.0, 1.2)])
def test_mu_total_finite_iff_gamma_above_inverse_alpha(g, a):
    v = measure.mu_total(PolynomialSigma(g), a)
    assert v.is_finite == (g > 1.0 / a)
    if v.is_finite:
        assert v.value == pytest.approx(2.0 / (a * g - 1.0), rel=1e-9)


def test_I_integral_beta_identity():
    v = measure.I_integral(PolynomialSigma(2.0), 1.5)
    assert v.value == pytest.approx(math.pi / 4.0, rel=1e-10)
    # independent brute quadrature
    brute = float(
        2 * mp.quad(lambda x: x ** 0.5 * (1 + x) ** -3, [0, 1, mp.inf])
    )
    assert v.value == pytest.approx(brute, rel=1e-9)


def test_I_integral_divergent_cases():
    assert not measure.I_integral(PolynomialSigma(1.0), 1.5).is_finite
    assert not measure.I_integral(PolynomialSigma(1.0), 1.8).is_finite
    assert not measure.I_integral(ExpressionSigma("1"), 1.5).is_finite


@pytest.mark.parametrize("a", ALPHAS)
@pytest.mark.parametrize("g", GAMMAS)
def test_delta_plus_closed_form(g, a):
    got = measure.delta_plus(PolynomialSigma(g), a)
    assert got.value == pytest.approx(closed_delta_plus(g, a), rel=1e-6)
    assert got.argsup == pytest.approx(
        (a - 1.0) / (a * (g - 1.0)), rel=1e-4
    )


@pytest.mark.parametrize("a", ALPHAS)
def test_delta_plus_boundary_gamma_one(a):
    got = measure.delta_plus(PolynomialSigma(1.0), a)
    assert got.value == 1.0 / (a - 1.0)
    assert got.argsup is None  # supremum attained in the limit


def test_delta_plus_divergent():
    got = measure.delta_plus(PolynomialSigma(0.8), 1.5)
    assert not got.is_finite


def test_delta_even_profile():
    dp = measure.delta_plus(PolynomialSigma(2.0), 1.5)
    dm = measure.delta_minus(PolynomialSigma(2.0), 1.5)
    d = measure.delta(PolynomialSigma(2.0), 1.5)
    assert dm.value == pytest.approx(dp.value, rel=1e-12)
    assert d.value == pytest.approx(2.0 * dp.value, rel=1e-12)
    assert d.value == pytest.approx(0.32475952641916445, rel=1e-8)


def test_delta_constant_profile_infinite():
    assert not measure.delta(ExpressionSigma("1"), 1.5).is_finite


def test_delta_asymmetric_direct_search():
    prof = ExpressionSigma("1 + abs(x) + 0.5*x")  # ~1.5|x| right, 0.5|x| left
    a = 1.5
    d = measure.delta(prof, a)
    dp = measure.delta_plus(prof, a)
    dm = measure.delta_minus(prof, a)
    assert d.is_finite and dp.is_finite and dm.is_finite
    # direct two-sided supremum is dominated by the one-sided sum
    assert d.value <= (dp.value + dm.value) * (1.0 + 1e-6)
    # both sides have linear tails, so the limit values add up
    lim = (1.5 ** -a + 0.5 ** -a) / (a - 1.0)
    assert d.value == pytest.approx(lim, rel=1e-2)


def test_delta_le_I_for_shipped_profiles():
    for prof in (
        PolynomialSigma(1.5),
        PolynomialSigma(2.0),
        PolynomialSigma(3.0),
        ExpressionSigma("exp(abs(x))"),
    ):
        for a in ALPHAS:
            d = measure.delta(prof, a)
            i = measure.I_integral(prof, a)
            if d.is_finite and i.is_finite:
                assert d.value <= i.value * (1.0 + 1e-9)


def test_tail_mass_monotone():
    prof = PolynomialSigma(2.0)
    ys = np.geomspace(0.01, 100.0, 25)
    vals = [measure.tail_mass(prof, 1.5, y) for y in ys]
    assert all(b <= a * (1 + 1e-12) for a, b in zip(vals, vals[1:]))
    assert measure.tail_mass(ExpressionSigma("1"), 1.5, 1.0) == math.inf


def test_scaling_relation():
    # scaling sigma by c multiplies each criterion by c**(-alpha)
    a = 1.5
    base = PolynomialSigma(2.0)
    scaled = ExpressionSigma("2*(1+abs(x))^2")
    factor = 2.0 ** (-a)
    for fn in (measure.delta_plus, measure.delta, measure.I_integral,
               measure.mu_total):
        v0 = fn(base, a).value
        v1 = fn(scaled, a).value
        assert v1 == pytest.approx(factor * v0, rel=1e-5)


def test_criterion_value_json():
    v = measure.delta_plus(PolynomialSigma(2.0), 1.5)
    d = v.to_json()
    assert set(d) == {"value", "abs_error", "argsup"}
    inf = measure.delta(ExpressionSigma("1"), 1.5).to_json()
    assert inf["infinite"] is True and inf["reason"]


def test_undetermined_propagates():
    prof = ExpressionSigma("(1+abs(x))^(1 + 1/(1+log(1+abs(x))))")
    with pytest.raises(TailUndetermined):
        measure.mu_total(prof, 1.5)


def test_pi_cdf_closed_form():
    prof = PolynomialSigma(2.0)
    xs = np.array([-20.0, -2.0, -0.5, 0.0, 0.5, 2.0, 20.0])
    got = measure.pi_cdf(prof, 1.5, xs)
    want = 0.5 + np.sign(xs) * (1.0 - (1.0 + np.abs(xs)) ** -2.0) / 2.0
    np.testing.assert_allclose(got, want, atol=1e-6)
    with pytest.raises(NotErgodic):
        measure.pi_cdf(ExpressionSigma("1"), 1.5, xs)
