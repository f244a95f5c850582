import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fint.errors import DomainError, ParseError
from fint.scalar import (Add, Call, Const, Div, Mul, Neg, Pow, Sub, T, TimeVar, eval_scalar,
                         format_scalar, integral, parse_scalar, scalar_from_json, scalar_to_json)


def test_parse_function_call():
    e = parse_scalar("sin(t)")
    assert isinstance(e, Call) and e.fn == "sin" and isinstance(e.arg, TimeVar)


def test_parse_polynomial_entry():
    e = parse_scalar("1+t^2")
    assert isinstance(e, Add)
    assert e.left == Const(1.0)
    assert isinstance(e.right, Pow) and isinstance(e.right.left, TimeVar)
    assert e.right.right == Const(2.0)


def test_product_value():
    assert eval_scalar(parse_scalar("2*t*exp(t^2)"), 1.0) == pytest.approx(2 * math.e, rel=1e-15)


def test_constant_and_odd_sum():
    assert eval_scalar(Const(5.0), 3.0) == 5.0
    assert eval_scalar(parse_scalar("tanh(t)+3*t^2"), 0.0) == 0.0


@pytest.mark.parametrize("text", ["1/t", "ln(t)", "ln(t-1)", "sqrt(t-1)"])
def test_domain_errors_at_zero(text):
    with pytest.raises(DomainError):
        eval_scalar(parse_scalar(text), 0.0)


def test_tan_pole():
    with pytest.raises(DomainError):
        eval_scalar(parse_scalar("tan(t)"), math.pi / 2)


def test_precedence():
    # ^ binds tighter than unary minus, which binds tighter than * and /
    assert eval_scalar(parse_scalar("-t^2"), 3.0) == -9.0
    assert eval_scalar(parse_scalar("2^3^2"), 0.0) == 512.0
    assert eval_scalar(parse_scalar("2^-1"), 0.0) == 0.5
    assert eval_scalar(parse_scalar("1-2-3"), 0.0) == -4.0
    assert eval_scalar(parse_scalar("8/2/2"), 0.0) == 2.0
    assert eval_scalar(parse_scalar("-2*-3"), 0.0) == 6.0


@pytest.mark.parametrize("text,offset", [("1+*2", 2), ("sin(t", 5), ("foo(t)", 0), ("", 0),
                                         ("t t", 2), ("2 $ 3", 2), ("sin t", 4)])
def test_parse_errors_carry_offset(text, offset):
    with pytest.raises(ParseError) as info:
        parse_scalar(text)
    assert info.value.offset == offset


def test_unknown_function_is_named():
    with pytest.raises(ParseError, match="gamma"):
        parse_scalar("gamma(t)")


def test_all_functions_parse():
    for fn in ["sin", "cos", "tan", "exp", "ln", "sinh", "cosh", "tanh", "atan", "sqrt", "abs"]:
        v = eval_scalar(parse_scalar(f"{fn}(0.5)"), 0.0)
        assert math.isfinite(v)


def test_scientific_literals():
    assert eval_scalar(parse_scalar("1.5e-3*t"), 2.0) == pytest.approx(3e-3)
    assert eval_scalar(parse_scalar(".5"), 0.0) == 0.5


def test_vectorized_matches_scalar():
    e = parse_scalar("sin(t)*exp(-t)+t^3/(1+t^2)")
    ts = np.linspace(-2, 2, 33)
    v = e.evaluate_array(ts)
    for t, vv in zip(ts, v):
        assert vv == pytest.approx(e.evaluate(t), rel=1e-14, abs=1e-15)


def test_integral_node_and_json():
    q = integral(parse_scalar("cos(t)"), 0.0)
    assert q.evaluate(1.0) == pytest.approx(math.sin(1.0), abs=1e-10)
    e = Mul(q, T)
    back = scalar_from_json(scalar_to_json(e))
    assert back.evaluate(0.7) == pytest.approx(e.evaluate(0.7), abs=1e-12)


# random expression trees for the format/parse round trip

_leaf = st.one_of(st.just(T), st.floats(-5, 5, allow_nan=False).map(lambda v: Const(round(v, 3))))


def _extend(children):
    safe_fns = ["sin", "cos", "atan", "tanh", "exp"]
    return st.one_of(
        st.tuples(children, children).map(lambda p: Add(*p)),
        st.tuples(children, children).map(lambda p: Sub(*p)),
        st.tuples(children, children).map(lambda p: Mul(*p)),
        children.map(Neg),
        st.tuples(st.sampled_from(safe_fns), children).map(lambda p: Call(p[0], Call("atan", p[1]))),
        st.tuples(children, st.integers(0, 3)).map(lambda p: Pow(p[0], Const(p[1]))),
        st.tuples(children, children).map(lambda p: Div(p[0], Add(Const(2.0), Call("sin", p[1])))),
    )


exprs = st.recursive(_leaf, _extend, max_leaves=12)


@settings(max_examples=150, deadline=None)
@given(exprs)
def test_format_parse_round_trip(e):
    text = format_scalar(e)
    back = parse_scalar(text)
    ts = np.random.default_rng(0).uniform(-1.5, 1.5, 100)
    for t in ts:
        a, b = e.evaluate(t), back.evaluate(t)
        assert abs(a - b) <= np.spacing(max(abs(a), abs(b))), (text, t, a, b)


@settings(max_examples=100, deadline=None)
@given(st.floats(-1e6, 1e6, allow_nan=False), st.floats(1e-9, 1e3))
def test_full_precision_constants_round_trip(a, b):
    e = Add(Mul(Const(a), T), Div(Const(1.0), Const(b)))
    back = parse_scalar(format_scalar(e))
    assert back.evaluate(0.37) == e.evaluate(0.37)
