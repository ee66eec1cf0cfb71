"""Constants and special functions against arbitrary-precision oracles."""

import math

import mpmath as mp
import numpy as np
import pytest

from stable_ergo import errors, special

mp.mp.dps = 30

ALPHAS = [1.2, 1.5, 1.8]


def mp_omega(a):
    a = mp.mpf(repr(a))
    return float(-1 / (mp.cos(mp.pi * a / 2) * mp.gamma(a)))


def mp_C(a):
    a = mp.mpf(repr(a))
    return float(
        a * 2 ** (a - 1) * mp.gamma((a + 1) / 2)
        / (mp.sqrt(mp.pi) * mp.gamma(1 - a / 2))
    )


def mp_c(a):
    a = mp.mpf(repr(a))
    return float(2 ** (1 - a) / mp.gamma(a / 2) ** 2)


def mp_h(x, a):
    a = mp.mpf(repr(a))
    x = abs(mp.mpf(repr(x)))
    if x <= 1:
        return 0.0
    pts = [1, min(x, 2), x] if x > 2 else [1, x]
    return float(mp.quad(lambda z: (z * z - 1) ** (a / 2 - 1), pts))


def mp_J(t, a):
    a = mp.mpf(repr(a))
    t = mp.mpf(repr(t))
    if t == 0:
        return 0.0
    pts = [0, min(t, 1), t] if t > 1 else [0, t]
    return float(mp.quad(lambda s: (s * (s + 1)) ** (a / 2 - 1), pts))


def mp_K(a):
    # tail of the defining integral desingularized exactly: v = 1/w,
    # then w = q**(1/(2-a)) flattens the w**(1-a) endpoint factor
    a = mp.mpf(repr(a))
    p = 1 / (2 - a)
    head = mp.quad(
        lambda v: (v * v - 1) ** (a / 2 - 1) / (1 + v), [1, mp.mpf(3) / 2, 2]
    )
    tail = mp.quad(
        lambda q: (1 - q ** (2 * p)) ** (a / 2 - 1) / (1 + q ** p) * p,
        [0, (mp.mpf(1) / 2) ** (1 / p)],
    )
    ca = 2 ** (1 - a) / mp.gamma(a / 2) ** 2
    pref = 2 * ca * (1 - a / 2) * mp.gamma(a / 2) / mp.gamma(1 - a / 2)
    return float(pref * (head + tail))


def test_gamma_tabulated_values():
    # reference values of the gamma function at the probe points
    for x in (1.2, 1.5, 1.8, 0.25, 0.75):
        assert special.gamma(x) == pytest.approx(float(mp.gamma(repr(x))),
                                                 rel=1e-13)


@pytest.mark.parametrize("a", ALPHAS)
def test_constants_match_oracle(a):
    assert special.omega_alpha(a) == pytest.approx(mp_omega(a), rel=1e-10)
    assert special.frac_kernel_constant(a) == pytest.approx(mp_C(a), rel=1e-10)
    assert special.interval_green_constant(a) == pytest.approx(
        mp_c(a), rel=1e-10
    )
    assert special.K_alpha(a) == pytest.approx(mp_K(a), rel=1e-10)


def test_omega_reference_points():
    assert special.omega_alpha(1.5) == pytest.approx(1.5957691, rel=1e-7)
    assert special.omega_alpha(1.2) == pytest.approx(3.5245, rel=1e-4)
    assert special.omega_alpha(1.8) == pytest.approx(1.1289, rel=1e-4)


def test_omega_positive_on_dense_grid():
    for a in np.linspace(1.001, 1.999, 200):
        assert special.omega_alpha(float(a)) > 0.0


def test_alpha_range_rejected():
    for bad in (1.0, 2.0, 0.5, 2.5):
        with pytest.raises(errors.AlphaOutOfRange):
            special.omega_alpha(bad)
        with pytest.raises(errors.AlphaOutOfRange):
            special.frac_kernel_constant(bad)
        with pytest.raises(errors.AlphaOutOfRange):
            special.K_alpha(bad)


def test_kernel_constant_continuity_at_one():
    assert special.frac_kernel_constant(1.0 + 1e-6) == pytest.approx(
        1.0 / math.pi, rel=1e-4
    )


def test_harmonic_h_values_and_symmetry():
    assert special.harmonic_h(1.0, 1.5) == 0.0
    assert special.harmonic_h(-3.0, 1.5) == special.harmonic_h(3.0, 1.5)
    for x, a in [(2.0, 1.5), (3.0, 1.5), (10.0, 1.2), (1.5, 1.8), (1e4, 1.5)]:
        assert special.harmonic_h(x, a) == pytest.approx(mp_h(x, a),
                                                         rel=1e-10)


def test_harmonic_h_monotone_and_domain():
    vals = [special.harmonic_h(x, 1.5) for x in (1.0, 1.2, 2.0, 5.0, 50.0)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    with pytest.raises(errors.DomainError):
        special.harmonic_h(0.5, 1.5)


def test_J_alpha_values():
    assert special.J_alpha(0.0, 1.5) == 0.0
    for t, a in [(1.0, 1.5), (0.3, 1.2), (7.0, 1.8), (1e6, 1.5)]:
        assert special.J_alpha(t, a) == pytest.approx(mp_J(t, a), rel=1e-10)
    with pytest.raises(errors.DomainError):
        special.J_alpha(-1.0, 1.5)


def test_J_alpha_small_t_asymptote():
    # J(t) ~ (2/alpha) t**(alpha/2) as t -> 0, ratio converging upward
    a = 1.5
    ratios = [
        special.J_alpha(t, a) / ((2.0 / a) * t ** (a / 2.0))
        for t in (1e-4, 1e-6, 1e-8)
    ]
    assert abs(ratios[0] - 1.0) < 1e-2
    assert abs(ratios[1] - 1.0) < 1e-3
    assert abs(ratios[2] - 1.0) < 1e-4
    assert special.J_alpha(1e-6, a) == pytest.approx(
        (2.0 / a) * 1e-6 ** 0.75, rel=1e-3
    )


def test_J_alpha_strictly_increasing():
    ts = [0.0, 1e-4, 0.1, 1.0, 10.0, 1e3]
    vals = [special.J_alpha(t, 1.7) for t in ts]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_K_alpha_finite_across_alpha():
    for a in np.arange(1.1, 1.95, 0.1):
        v = special.K_alpha(float(a))
        assert math.isfinite(v) and v > 0.0


def test_alpha_constants_bundle():
    c = special.AlphaConstants.for_alpha(1.5)
    assert c.omega_alpha == special.omega_alpha(1.5)
    assert c.C_alpha == special.frac_kernel_constant(1.5)
    assert c.c_alpha == special.interval_green_constant(1.5)
    assert c.K_alpha == special.K_alpha(1.5)
    assert c.gamma_half_sq == pytest.approx(special.gamma(0.75) ** 2)
    with pytest.raises(errors.AlphaOutOfRange):
        special.AlphaConstants.for_alpha(2.3)
