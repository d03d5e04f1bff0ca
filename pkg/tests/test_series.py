from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oneturn import (
    DulacSeries,
    ExactnessError,
    OrderError,
    ParseError,
    PreconditionError,
    conj_affine_by_exp,
    format_series,
    is_identity,
    parse_series,
    series_compose,
    series_eval,
    series_eval_derivative,
    series_invert,
)

from .oracles import a_conj_coefficient, compose_numeric_residual


def test_self_composition_pinned():
    f = DulacSeries(0, {1: 1}, order=3)
    assert format_series(series_compose(f, f, 3)) == "z + 2*E^-1 - 1*E^-2 + 1/2*E^-3"


def test_inverse_pinned():
    f = DulacSeries(0, {1: 1}, order=3)
    assert format_series(series_invert(f, 3)) == "z - 1*E^-1 - 1*E^-2 - 3/2*E^-3"


def test_inverse_cancels_exactly():
    f = parse_series("z + 2*E^-1 - 1/3*E^-2 + 5*E^-4", order=8)
    g = series_invert(f, 8)
    assert series_compose(f, g, 8).is_identity
    assert series_compose(g, f, 8).is_identity


def test_conjugated_affine_coefficients():
    for c in (Fraction(1), Fraction(-2), Fraction(3, 7)):
        ser = conj_affine_by_exp(1, c, 10)
        assert not ser.shift_inexact
        for n in range(1, 11):
            assert ser.coeff(n) == a_conj_coefficient(n, c)


def test_conjugated_affine_with_scaling():
    ser = conj_affine_by_exp(2, 3, 4)
    assert ser.shift_inexact
    assert ser.shift_log_arg == 2
    # the tail sees the ratio beta/alpha, not beta itself
    assert ser.coeff(1) == Fraction(3, 2)
    assert ser.coeff(2) == -Fraction(9, 8)
    with pytest.raises(ValueError):
        conj_affine_by_exp(0, 1, 4)
    with pytest.raises(ValueError):
        conj_affine_by_exp(-3, 1, 4)


def test_scaled_conjugate_still_inverts():
    f = conj_affine_by_exp(Fraction(5, 3), Fraction(-1, 2), 6)
    g = series_invert(f, 6)
    assert series_compose(f, g, 6).is_identity


def test_parse_format_roundtrip():
    text = "z + 3 + 1/2*E^-1 - 3*E^-2 + E^-5"
    ser = parse_series(text)
    assert ser.c0 == 3
    assert ser.order == 5
    assert ser.coeff(5) == 1
    assert parse_series(format_series(ser)) == ser


def test_parse_order_padding():
    ser = parse_series("z + E^-1", order=6)
    assert ser.order == 6
    assert ser.coeff(3) == 0


def test_parse_rejections():
    for bad in ("", "E^-1", "z + z", "-z", "z + ", "z + q*E^-1", "z + E^-0"):
        with pytest.raises(ParseError):
            parse_series(bad)
    with pytest.raises(OrderError):
        parse_series("z + E^-4", order=2)


def test_format_refuses_log_shift():
    with pytest.raises(ValueError):
        format_series(conj_affine_by_exp(2, 1, 3))
    assert "ln(2)" in str(conj_affine_by_exp(2, 1, 3))


def test_with_order_view():
    ser = parse_series("z + E^-2")
    assert ser.with_order(7).order == 7
    with pytest.raises(OrderError):
        ser.with_order(1)
    with pytest.raises(OrderError):
        ser.with_order(513)


def test_compose_order_guard():
    f = parse_series("z + E^-1", order=4)
    g = parse_series("z + E^-1", order=2)
    with pytest.raises(OrderError):
        series_compose(f, g, 4)


def test_compose_requires_exact_inner_shift():
    f = parse_series("z + E^-1", order=3)
    g = parse_series("z + 1 + E^-1", order=3)
    with pytest.raises(ExactnessError):
        series_compose(f, g, 3)


def test_compose_with_identity_keeps_shift():
    f = parse_series("z + 2 + E^-1", order=3)
    ident = DulacSeries.identity(3)
    assert series_compose(f, ident, 3) == f
    assert series_compose(ident, f, 3) == f


def test_invert_preconditions():
    with pytest.raises(PreconditionError):
        series_invert(parse_series("z + 1 + E^-1"), 1)
    with pytest.raises(OrderError):
        series_invert(parse_series("z + E^-1", order=2), 5)


def test_identity_predicate():
    assert is_identity(DulacSeries.identity())
    assert not is_identity(parse_series("z + E^-1"))
    assert not is_identity(parse_series("z + 1"))
    assert not is_identity(conj_affine_by_exp(2, 0, 3))


def test_coefficient_inspection():
    ser = parse_series("z + 5*E^-2 - 1/3*E^-4")
    assert ser.leading() == (2, Fraction(5))
    assert ser.as_dict() == {2: Fraction(5), 4: Fraction(-1, 3)}
    assert ser.coeff(3) == 0
    assert DulacSeries.identity().leading() is None


coeff_strategy = st.dictionaries(
    st.integers(1, 5),
    st.fractions(min_value=-8, max_value=8, max_denominator=4),
    max_size=3,
)


@settings(max_examples=50, deadline=None)
@given(fa=coeff_strategy, fb=coeff_strategy, fc=coeff_strategy)
def test_associativity_exact(fa, fb, fc):
    N = 7
    f = DulacSeries(0, fa, N)
    g = DulacSeries(0, fb, N)
    h = DulacSeries(0, fc, N)
    left = series_compose(series_compose(f, g, N), h, N)
    right = series_compose(f, series_compose(g, h, N), N)
    assert left == right


@settings(max_examples=50, deadline=None)
@given(fa=coeff_strategy)
def test_two_sided_inverse_exact(fa):
    N = 7
    f = DulacSeries(0, fa, N)
    g = series_invert(f, N)
    assert series_compose(f, g, N).is_identity
    assert series_compose(g, f, N).is_identity


def test_composition_against_numeric_evaluation():
    """The graded-algebra composite must agree with composing values."""
    f = parse_series("z + 2*E^-1 - 1/3*E^-2", order=6)
    g = parse_series("z + E^-1 + 7/2*E^-3", order=6)
    fg = series_compose(f, g, 6)
    for x in (12.0, 15.0, 20.0):
        # truncation error is exp(-7x) at worst, far below the gate
        res = compose_numeric_residual(
            lambda z: series_eval(f, z),
            lambda z: series_eval(g, z),
            lambda z: series_eval(fg, z),
            x,
        )
        assert res < mpmath.mpf(10) ** -30


def test_eval_variants_agree():
    ser = parse_series("z + 2 + 3*E^-1")
    x = 1.75
    as_float = series_eval(ser, x)
    as_complex = series_eval(ser, complex(x))
    as_mp = series_eval(ser, mpmath.mpf(x))
    assert abs(as_float - as_complex.real) < 1e-14
    assert abs(as_float - float(as_mp)) < 1e-14
    shifted = series_eval(conj_affine_by_exp(2, 0, 2), 0.0)
    assert abs(shifted - mpmath.log(2)) < 1e-15


def test_eval_survives_deep_tail_underflow():
    ser = parse_series("z + 7*E^-1")
    assert series_eval(ser, 1e4) == 1e4


def test_derivative_matches_formula():
    ser = parse_series("z + 2*E^-1 - 5*E^-3")
    z = 0.9 + 0.4j
    import cmath

    expected = 1 - 2 * cmath.exp(-z) + 15 * cmath.exp(-3 * z)
    assert abs(series_eval_derivative(ser, z) - expected) < 1e-14
    real_val = series_eval_derivative(ser, 0.9)
    assert isinstance(real_val, float)
