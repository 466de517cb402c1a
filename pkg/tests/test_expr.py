import math

import numpy as np
import pytest

from beambvp.errors import (
    ArityError,
    EvalDomainError,
    ExprSyntaxError,
    NonFiniteError,
    UnknownIdentifierError,
)
from beambvp.expr import diff_u, evaluate, parse, to_string


@pytest.mark.parametrize("text,t,u,expected", [
    ("1 + 2 * 3", 0.0, 0.0, 7.0),
    ("(1 + 2) * 3", 0.0, 0.0, 9.0),
    ("2 ^ 3 ^ 2", 0.0, 0.0, 512.0),      # right-associative
    ("-u ^ 2", 0.0, 3.0, 9.0),           # unary binds before the caret
    ("-(u ^ 2)", 0.0, 3.0, -9.0),
    ("6528e9", 0.0, 0.0, 6.528e12),
    (".5 + 2.", 0.0, 0.0, 2.5),
    ("t + abs(cos(u))", 0.25, math.pi, 1.25),
    ("pi - e", 0.0, 0.0, math.pi - math.e),
    ("u / t", 2.0, 6.0, 3.0),
    ("2 - 3 - 4", 0.0, 0.0, -5.0),       # left-associative
    ("sqrt(u + 1)", 0.0, 3.0, 2.0),
    ("exp(0) + ln(e)", 0.0, 0.0, 2.0),
])
def test_parse_and_evaluate(text, t, u, expected):
    assert evaluate(parse(text), t, u) == pytest.approx(expected, rel=1e-15)


def test_evaluate_broadcasts_over_arrays():
    node = parse("t + u ^ 2")
    t = np.linspace(0.0, 1.0, 5)
    out = evaluate(node, t, 2.0)
    assert np.allclose(out, t + 4.0)
    out2 = evaluate(node, 0.5, t)
    assert np.allclose(out2, 0.5 + t**2)


def test_to_string_round_trips():
    texts = [
        "u^2 * exp(u) * ln(1 + t + u)",
        "t + abs(cos(u))",
        "-u ^ 2 + t / (1 + u)",
        "6528000000000 * u^2 * exp(1 - u)",
    ]
    rng = np.random.default_rng(3)
    for text in texts:
        node = parse(text)
        again = parse(to_string(node))
        for _ in range(5):
            t, u = rng.uniform(0.0, 1.0), rng.uniform(0.0, 2.0)
            assert evaluate(again, t, u) == pytest.approx(
                evaluate(node, t, u), rel=1e-15)


@pytest.mark.parametrize("text,offset", [
    ("2 +", 3),
    ("(u", 2),
    ("u @ t", 2),
    ("", 0),
    ("3 * * 4", 4),
])
def test_syntax_errors_carry_offsets(text, offset):
    with pytest.raises(ExprSyntaxError) as err:
        parse(text)
    assert err.value.offset == offset


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifierError):
        parse("foo(u)")
    with pytest.raises(UnknownIdentifierError):
        parse("t + x")


def test_function_arity():
    with pytest.raises(ArityError):
        parse("abs(u, t)")


@pytest.mark.parametrize("text,t,u", [
    ("ln(u - 2)", 0.0, 1.0),
    ("sqrt(-1 - t)", 0.5, 0.0),
    ("u ^ -1", 0.0, 0.0),
])
def test_domain_errors(text, t, u):
    with pytest.raises(EvalDomainError):
        evaluate(parse(text), t, u)


@pytest.mark.parametrize("text,t,u", [
    ("exp(u)", 0.0, 1e9),
    ("ln(0)", 0.0, 0.0),
    ("1 / t", 0.0, 0.0),
])
def test_nonfinite_raises(text, t, u):
    with pytest.raises(NonFiniteError):
        evaluate(parse(text), t, u)


@pytest.mark.parametrize("text", [
    "u^2 * exp(u) * ln(1 + t + u)",
    "t + abs(cos(u))",
    "(1 + t) * exp(u)",
    "sqrt(u + 1) / (1 + u)",
    "u ^ 3 - 2 * u",
])
def test_diff_u_matches_finite_differences(text):
    node = parse(text)
    deriv = diff_u(node)
    rng = np.random.default_rng(11)
    h = 1e-6
    for _ in range(8):
        t, u = rng.uniform(0.1, 0.9), rng.uniform(0.2, 2.0)
        numeric = (evaluate(node, t, u + h) - evaluate(node, t, u - h)) / (2 * h)
        assert evaluate(deriv, t, u) == pytest.approx(numeric, rel=2e-8, abs=2e-8)


def test_abs_derivative_uses_sign_zero_at_kink():
    deriv = diff_u(parse("abs(u)"))
    assert evaluate(deriv, 0.0, 0.0) == 0.0
    assert evaluate(deriv, 0.0, 2.0) == 1.0
    assert evaluate(deriv, 0.0, -2.0) == -1.0
