"""Coefficient profiles: evaluation, tails, loading."""

import json
import math

import numpy as np
import pytest

from stable_ergo import sigma
from stable_ergo.errors import (
    DomainError,
    NonPositiveSigma,
    TailUndetermined,
)


def test_polynomial_values():
    p = sigma.PolynomialSigma(2.0)
    assert p.eval(1.0) == 4.0
    assert p.eval(-1.0) == 4.0
    assert p.is_even()
    assert p.tail_exponents() == (2.0, 2.0)
    assert p.tail_coefficients() == (1.0, 1.0)
    with pytest.raises(DomainError):
        sigma.PolynomialSigma(0.0)


def test_expression_positivity_guard():
    e = sigma.ExpressionSigma("x")
    with pytest.raises(NonPositiveSigma):
        e.eval(0.0)
    with pytest.raises(NonPositiveSigma):
        e.eval(np.array([1.0, 0.0]))
    assert sigma.eval_sigma(e, 2.0) == 2.0


def test_expression_tail_fit_power_law():
    e = sigma.ExpressionSigma("(1+abs(x))^2")
    gm, gp = e.tail_exponents()
    assert gm == pytest.approx(2.0, abs=1e-3)
    assert gp == pytest.approx(2.0, abs=1e-3)
    cm, cp = e.tail_coefficients()
    assert cm == pytest.approx(1.0, rel=1e-3)
    assert e.is_even()


def test_expression_super_polynomial_flag():
    e = sigma.ExpressionSigma("exp(abs(x))")
    gm, gp = e.tail_exponents()
    assert math.isinf(gp) and gp > 0
    assert math.isinf(gm) and gm > 0


def test_expression_asymmetric_tails():
    e = sigma.ExpressionSigma("1 + abs(x) + 0.5*x")
    gm, gp = e.tail_exponents()
    assert gm == pytest.approx(1.0, abs=1e-3)
    assert gp == pytest.approx(1.0, abs=1e-3)
    cm, cp = e.tail_coefficients()
    assert cm == pytest.approx(0.5, rel=1e-2)
    assert cp == pytest.approx(1.5, rel=1e-2)
    assert not e.is_even()


def test_expression_undetermined_tail():
    # slope keeps drifting on log-log, but not monotonically enough to
    # certify super-polynomial growth
    e = sigma.ExpressionSigma("(1+abs(x))^(1 + 1/(1+log(1+abs(x))))")
    with pytest.raises(TailUndetermined):
        e.tail_exponents()


def test_tabulated_profile():
    xs = np.array([0.0, 1.0, 10.0, 100.0])
    vals = (1.0 + xs) ** 1.5
    t = sigma.TabulatedSigma(xs, vals, tail_exponents=(1.5, 1.5), even=True)
    assert t.tail_exponents() == (1.5, 1.5)
    assert t.eval(10.0) == pytest.approx(11.0 ** 1.5)
    assert t.eval(-10.0) == t.eval(10.0)
    # log-linear interpolation stays between node values
    v = t.eval(5.0)
    assert vals[1] < v < vals[2]
    # declared-exponent extrapolation beyond the last node
    assert t.eval(1000.0) == pytest.approx(vals[-1] * 10.0 ** 1.5)
    cm, cp = t.tail_coefficients()
    assert cp == pytest.approx(vals[-1] / 100.0 ** 1.5)


def test_tabulated_validation():
    with pytest.raises(DomainError):
        sigma.TabulatedSigma([0, 1], [1, 1], tail_exponents=(1, 1))
    with pytest.raises(NonPositiveSigma):
        sigma.TabulatedSigma([-1, 1], [1.0, 0.0], tail_exponents=(1, 1))
    with pytest.raises(DomainError):
        sigma.TabulatedSigma([1, 0], [1, 1], tail_exponents=(1, 1),
                             even=True)


def test_load_profile_shorthand(tmp_path):
    assert isinstance(sigma.load_profile("poly:2"), sigma.PolynomialSigma)
    e = sigma.load_profile("expr:(1+abs(x))^2")
    assert e.eval(1.0) == 4.0
    csv_path = tmp_path / "sigma.csv"
    csv_path.write_text("x,sigma\n-5,6\n0,1\n5,6\n")
    spec = {"kind": "table", "file": "sigma.csv", "tail_exponents": [1, 1]}
    spec_path = tmp_path / "profile.json"
    spec_path.write_text(json.dumps(spec))
    t = sigma.load_profile(str(spec_path), base_dir=str(tmp_path))
    assert t.eval(0.0) == 1.0
    assert t.eval(5.0) == 6.0
    with pytest.raises(DomainError):
        sigma.load_profile("nonsense:1")


def test_profile_spec_round_trip():
    for spec in (
        {"kind": "polynomial", "gamma": 2.0},
        {"kind": "expression", "text": "(1 + abs(x))^2"},
    ):
        prof = sigma.load_profile(dict(spec))
        again = sigma.load_profile(prof.to_spec())
        xs = np.linspace(-3, 3, 11)
        np.testing.assert_allclose(prof.eval(xs), again.eval(xs))
