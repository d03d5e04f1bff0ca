from fractions import Fraction

import mpmath
import pytest
from mpmath import mpf

from oneturn import (
    Affine,
    Compose,
    EvalDomainError,
    EvalRangeError,
    Exp,
    GrammarError,
    Log,
    NC,
    Tln,
    deviation,
    eval_with_derivative,
    expr_eval,
    expr_normalize,
    flatten,
    max_series_order,
    node_label,
    parse_series,
    sum_jump_scales,
)


def _wrap(depth, *inner):
    return Compose(tuple([Log] * depth) + tuple(inner) + tuple([Exp] * depth))


def test_direct_eval_pinned():
    e = Compose((Log, Affine(1, 1), Exp))
    assert mpmath.nstr(expr_eval(e, mpf(5)), 8) == "5.0067153"


def test_direct_eval_matches_closed_form():
    e = Compose((Log, Affine(1, 1), Exp))
    for x in (0.0, 1.5, 7.0):
        want = mpmath.log(mpmath.exp(x) + 1)
        assert abs(expr_eval(e, mpf(x)) - want) < mpf("1e-15")


def test_normalize_depths():
    _, form = expr_normalize(NC(parse_series("z + E^-1", order=4)))
    assert form.peak == 0
    _, form = expr_normalize(_wrap(1, NC(parse_series("z + E^-1", order=4))))
    assert (form.peak, form.depths) == (1, (0, 1, 0))
    _, form = expr_normalize(_wrap(3, NC(parse_series("z + E^-2", order=4))))
    assert form.peak == 3
    assert form.depths == (0, 1, 2, 3, 2, 1, 0)


def test_identity_wrap_keeps_written_depth():
    """Identity vertex maps must not collapse the tower height."""
    e = _wrap(2, NC(parse_series("z", order=3)))
    _, form = expr_normalize(e)
    assert form.peak == 2


def test_affine_sinks_below_log():
    e = Compose((Log, Affine(2, 3), Exp))
    norm, form = expr_normalize(e)
    assert form.peak == 1
    lowered = [f for f in flatten(norm) if isinstance(f, NC) and f.series.shift_inexact]
    assert lowered and lowered[0].series.shift_log_arg == 2
    # the unnormalized walk is exact; the normal form carries the
    # conjugation series truncated at order 8, so its tail
    # ((beta/alpha)e^-x)^9/9 only drops below 1e-12 for larger x
    for x in (1.0, 4.0, 8.0):
        want = mpmath.log(2 * mpmath.exp(x) + 3)
        assert abs(expr_eval(e, mpf(x)) - want) < mpf("1e-15")
    for x in (4.0, 8.0):
        want = mpmath.log(2 * mpmath.exp(x) + 3)
        assert abs(expr_eval(norm, mpf(x)) - want) < mpf("1e-12")
    assert abs(expr_eval(norm, mpf(1)) - mpmath.log(2 * mpmath.e + 3)) < mpf("1e-3")


def test_pure_shift_conjugation_stays_exact():
    e = Compose((Log, Affine(1, Fraction(1, 2)), Exp))
    norm, _ = expr_normalize(e)
    assert not any(
        f.series.shift_inexact for f in flatten(norm) if isinstance(f, NC)
    )


def test_grammar_rejections():
    ser = NC(parse_series("z + E^-1"))
    with pytest.raises(GrammarError):
        expr_normalize(Compose((ser, Affine(1, 2), ser)))
    with pytest.raises(GrammarError):
        expr_normalize(Compose((Exp, ser)))
    with pytest.raises(GrammarError):
        expr_normalize(Compose((Log, Exp, Log, Exp)))
    with pytest.raises(GrammarError):
        expr_normalize(Compose((Exp, ser, Log)))
    with pytest.raises(GrammarError):
        Compose(())
    with pytest.raises(GrammarError):
        Compose((ser, "not a node"))
    with pytest.raises(GrammarError):
        NC(parse_series("z + 1 + E^-1"))
    with pytest.raises(GrammarError):
        Affine(0, 1)


def test_node_rendering():
    assert node_label(Exp) == "Exp"
    assert node_label(Log) == "Log"
    assert str(Affine(2, 3)) == "Affine(2, 3)"
    assert str(NC(parse_series("z + E^-1"))) == "NC(z + 1*E^-1)"
    from oneturn import conj_affine_by_exp

    dressed = NC(conj_affine_by_exp(2, 1, 2))
    assert "ln(2)" in str(dressed)


def test_flatten_and_bookkeeping():
    inner = Compose((Log, NC(parse_series("z + E^-3"), jump_scale=1e-9), Exp))
    e = Compose((NC(parse_series("z + E^-1", order=5), jump_scale=2e-9), inner))
    nodes = flatten(e)
    assert len(nodes) == 4
    assert max_series_order(e) == 5
    assert abs(sum_jump_scales(e) - 3e-9) < 1e-24


def test_eval_guard_violation():
    e = Compose((Log, NC(parse_series("z - 5*E^-1")), Exp))
    with pytest.raises(EvalDomainError):
        # exp(x) - 5 e^{-exp(x)} ... fine; force the guard with an affine
        expr_eval(Compose((Log, Affine(1, -10), Exp)), mpf(0.5), guard=1.0)


def test_eval_range_refusal_unbalanced():
    with pytest.raises(EvalRangeError):
        expr_eval(Compose((Exp, Exp, Exp)), mpf(20))


def test_balanced_tower_eval_falls_back_to_level_index():
    e = _wrap(3, NC(parse_series("z", order=2)))
    assert expr_eval(e, mpf(20)) == 20
    e2 = _wrap(3, NC(parse_series("z + E^-1", order=2)))
    v = expr_eval(e2, mpf(20))
    # the series correction at depth 3 is far below every ulp of 20
    assert v == 20


def test_deviation_exact_zero_on_identities():
    for depth in (0, 1, 2, 3):
        e = _wrap(depth, NC(parse_series("z", order=4)))
        assert deviation(e, mpf(7)).sign == 0


def test_deviation_sign_tracks_leading_coefficient():
    up = _wrap(2, NC(parse_series("z + E^-1", order=3)))
    down = _wrap(2, NC(parse_series("z - E^-1", order=3)))
    for x in (3.0, 9.0, 14.0):
        assert deviation(up, mpf(x)).sign == 1
        assert deviation(down, mpf(x)).sign == -1


def test_deviation_matches_direct_gap_at_shallow_depth():
    e = _wrap(1, NC(parse_series("z + E^-1", order=3)))
    x = mpf(2)
    with mpmath.workprec(200):
        direct = expr_eval(e, x) - x
        dev = deviation(e, x).to_mpf()
    assert abs(dev - direct) / abs(direct) < mpf("1e-30")


def test_deviation_survives_coarse_tower_collapse():
    """Terms whose towers the payload cannot separate must be dropped,
    not cancelled.

    At depth 3 and x >= 8 the payload ulp exceeds ln of the coefficient
    scale, so 2*E^-4 and -3/2*E^-6 land on bitwise-equal towers; the
    engine has to keep the leading term's sign instead of returning an
    exact zero.
    """
    ser = parse_series("z + 2*E^-4 - 3/2*E^-6", order=6)
    e = _wrap(3, NC(ser))
    for x in (5.0, 8.0, 12.0):
        dev = deviation(e, mpf(x))
        assert dev.sign == 1
    flipped = _wrap(3, NC(parse_series("z - 2*E^-4 + 3/2*E^-6", order=6)))
    assert deviation(flipped, mpf(8)).sign == -1


def test_deviation_magnitude_bracket_at_depth_three():
    ser = parse_series("z + 2*E^-4 - 3/2*E^-6", order=6)
    e = _wrap(3, NC(ser))
    dev = deviation(e, mpf(8))
    hi = Tln.tower(3, mpf(8)).scale(mpf(-3))
    lo = Tln.tower(3, mpf(8)).scale(mpf(-5))
    assert dev.lnmag.cmp(hi) <= 0
    assert dev.lnmag.cmp(lo) >= 0


def test_forward_derivative():
    e = Compose((Log, Affine(1, 1), Exp))
    x = mpf(1.5)
    v, dv = eval_with_derivative(e, x)
    ex = mpmath.exp(x)
    assert abs(v - mpmath.log(ex + 1)) < mpf("1e-15")
    assert abs(dv - ex / (ex + 1)) < mpf("1e-15")


def test_forward_derivative_through_series():
    ser = parse_series("z + 2*E^-1")
    e = NC(ser)
    x = mpf(0.75)
    v, dv = eval_with_derivative(e, x)
    assert abs(v - (x + 2 * mpmath.exp(-x))) < mpf("1e-15")
    assert abs(dv - (1 - 2 * mpmath.exp(-x))) < mpf("1e-15")
