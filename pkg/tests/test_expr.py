"""Parser, printer and evaluator of the expression mini-language."""

import math

import numpy as np
import pytest

from stable_ergo import expr
from stable_ergo.errors import EvalError, ParseError

CORPUS = [
    "1",
    "x",
    "-x",
    "--x",
    "1 + 2",
    "1 + 2 * 3",
    "(1 + 2) * 3",
    "2 ^ 3 ^ 2",
    "(2 ^ 3) ^ 2",
    "-x ^ 2",
    "(-x) ^ 2",
    "1 - 2 - 3",
    "1 - (2 - 3)",
    "8 / 4 / 2",
    "8 / (4 / 2)",
    "abs(x)",
    "exp(-abs(x))",
    "log(1 + abs(x))",
    "min(x, 1)",
    "max(-x, x)",
    "min(exp(x), 10)",
    "(1 + abs(x)) ^ 2",
    "(1 + abs(x)) ^ 1.5",
    "(1 + abs(x)) ^ 0.7",
    "2 * (1 + abs(x)) ^ 2",
    "1 + abs(x) + 0.5 * x",
    "x * x + 1",
    "x ^ 2 + 2 * x + 1",
    "1 / (1 + x ^ 2)",
    "abs(x - 1) + abs(x + 1)",
    "max(1, min(x ^ 2, 100))",
    "exp(x / 10)",
    "exp(abs(x))",
    "1.5e3 + x",
    "2.5e-2 * x",
    "0.125",
    "x / 3 + 4",
    "-(x + 1)",
    "-x * -x",
    "3 ^ -x",
    "abs(x) ^ (x / (1 + abs(x)))",
    "min(max(x, -1), 1)",
    "log(exp(x))",
    "1 + 1 / (1 + abs(x))",
    "(x - 1) * (x + 1)",
    "max(abs(x), 1e-3)",
    "exp(log(1 + abs(x)) * 2)",
    "x ^ 2 ^ 0.5",
    "abs(min(x, 0))",
    "1 + x ^ 4 / (1 + abs(x) ^ 3)",
]


@pytest.mark.parametrize("text", CORPUS)
def test_print_parse_round_trip(text):
    tree = expr.parse(text)
    printed = expr.to_text(tree)
    assert expr.parse(printed) == tree


@pytest.mark.parametrize("text", CORPUS)
def test_round_trip_evaluates_identically(text):
    tree = expr.parse(text)
    again = expr.parse(expr.to_text(tree))
    xs = np.array([-2.7, -1.0, -0.3, 0.0, 0.4, 1.0, 3.9])
    try:
        a = expr.evaluate(tree, xs)
    except EvalError:
        with pytest.raises(EvalError):
            expr.evaluate(again, xs)
        return
    b = expr.evaluate(again, xs)
    np.testing.assert_array_equal(a, b)


def test_polynomial_identity_on_grid():
    tree = expr.parse("(1+abs(x))^2")
    xs = np.linspace(-7, 7, 101)
    np.testing.assert_allclose(
        expr.evaluate(tree, xs), (1 + np.abs(xs)) ** 2, rtol=1e-14
    )


def test_min_call_saturates():
    tree = expr.parse("min(exp(x), 10)")
    assert expr.evaluate(tree, 5.0) == 10.0
    assert expr.evaluate(tree, 0.0) == 1.0


def test_power_right_associative():
    assert expr.evaluate(expr.parse("2^3^2"), 0.0) == 512.0
    assert expr.evaluate(expr.parse("(2^3)^2"), 0.0) == 64.0


def test_unary_minus_binds_below_power():
    assert expr.evaluate(expr.parse("-2^2"), 0.0) == -4.0
    assert expr.evaluate(expr.parse("(-2)^2"), 0.0) == 4.0


def test_parse_error_offsets():
    with pytest.raises(ParseError) as exc:
        expr.parse("1+")
    assert exc.value.offset == 2
    assert len(exc.value.expected) > 0
    with pytest.raises(ParseError) as exc:
        expr.parse("min(x 1)")
    assert exc.value.offset == 6
    with pytest.raises(ParseError) as exc:
        expr.parse("2 $ 3")
    assert exc.value.offset == 2
    with pytest.raises(ParseError) as exc:
        expr.parse("foo(x)")
    assert exc.value.offset == 0
    with pytest.raises(ParseError):
        expr.parse("")
    with pytest.raises(ParseError) as exc:
        expr.parse("1 2")
    assert exc.value.offset == 2


def test_eval_domain_faults():
    with pytest.raises(EvalError):
        expr.evaluate(expr.parse("log(x)"), -1.0)
    with pytest.raises(EvalError):
        expr.evaluate(expr.parse("log(x)"), 0.0)
    with pytest.raises(EvalError):
        expr.evaluate(expr.parse("1/x"), 0.0)
    with pytest.raises(EvalError):
        expr.evaluate(expr.parse("x^0.5"), -2.0)
    # array input: one bad element poisons the call
    with pytest.raises(EvalError):
        expr.evaluate(expr.parse("log(x)"), np.array([1.0, -1.0]))


def test_eval_array_shape_and_values():
    tree = expr.parse("max(-x, x)")
    xs = np.array([[-1.0, 2.0], [3.0, -4.0]])
    out = expr.evaluate(tree, xs)
    assert out.shape == xs.shape
    np.testing.assert_array_equal(out, np.abs(xs))


def test_overflow_is_inf_not_error():
    out = expr.evaluate(expr.parse("exp(x)"), 1e4)
    assert math.isinf(out) and out > 0
