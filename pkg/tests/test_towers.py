"""Level-index arithmetic checks.

Values at iterated-exponential scale cannot be compared through mpf
directly, so these tests exercise the canonicalization bands, the
dominant-term addition rules, and the exact-sign contract that the
dichotomy scans depend on.
"""

import mpmath
from mpmath import mpf

from oneturn import Tln, TReal


def test_small_towers_materialize_to_level_zero():
    t = Tln.tower(3, mpf(2))
    assert t.m == 0
    assert abs(t.q - mpmath.exp(mpmath.exp(mpmath.exp(2)))) < mpf("1e690")
    assert t.magnitude_mpf() == t.q


def test_tall_tower_stays_symbolic():
    t = Tln.tower(3, mpf(8))
    assert (t.s, t.m) == (1, 1)
    # payload is exp^2(8), itself an mpf with a four-digit ulp exponent
    assert mpmath.log(t.q) - 2980 < 1.0
    assert t.magnitude_mpf() is None


def test_tower_comparison_is_value_order():
    assert Tln.tower(3, mpf(5)).cmp(Tln.tower(3, mpf(6))) < 0
    assert Tln.tower(4, mpf(5)).cmp(Tln.tower(3, mpf(6))) > 0
    assert Tln.tower(2, mpf(9)).cmp(Tln.tower(2, mpf(9))) == 0
    assert Tln.from_mpf(-3).cmp(Tln.from_mpf(2)) < 0
    assert Tln.from_mpf(-3).cmp(Tln.from_mpf(-2)) < 0
    assert Tln.zero().cmp(Tln.from_mpf(1)) < 0


def test_plain_scale_addition_is_mpf_accurate():
    a = Tln.from_mpf(5)
    assert abs(a.add(Tln.from_mpf(3)).to_mpf() - 8) < mpf("1e-14")
    assert abs(a.add(Tln.from_mpf(-3)).to_mpf() - 2) < mpf("1e-14")
    assert a.add(a.neg()).is_zero
    assert Tln.zero().add(a).cmp(a) == 0


def test_subdominant_term_is_dropped():
    big = Tln.tower(1, mpf(10) ** 7)
    out = big.add(Tln.from_mpf(1))
    assert out == big
    # same-magnitude same-sign doubles instead
    twice = big.add(big)
    assert twice.cmp(big) > 0


def test_equal_magnitude_opposite_signs_cancel():
    t = Tln.tower(2, mpf(50))
    assert t.add(t.neg()).is_zero


def test_scale_flips_sign_and_shifts_log():
    t = Tln.from_mpf(100)
    half = t.scale(mpf("0.5"))
    assert half.s == 1 and abs(half.to_mpf() - 50) < mpf("1e-12")
    neg = t.scale(-2)
    assert neg.s == -1 and abs(neg.to_mpf() + 200) < mpf("1e-12")
    assert t.scale(0).is_zero


def test_scale_absorption_rounds_away_on_coarse_payloads():
    """Documented loss: ln(c) vanishes into a payload with a huge ulp.

    The callers in the expression evaluator compensate by dropping
    series terms whose scaled towers compare equal, so this contract is
    pinned rather than papered over.
    """
    t = Tln.tower(3, mpf(8))
    assert t.scale(-4).neg() == t.scale(-6).neg() == t


def test_describe_is_compact_and_signed():
    assert Tln.zero().describe() == "0"
    assert Tln.tower(3, mpf(8), sign=-1).describe().startswith("-exp^1(")
    assert Tln.from_mpf(mpf("2.5")).describe() == "2.5"


def test_treal_roundtrip_and_zero():
    x = TReal.from_mpf(mpf("-0.375"))
    assert x.sign == -1
    assert abs(x.to_mpf() + mpf("0.375")) < mpf("1e-18")
    assert TReal.zero().is_zero
    assert TReal.from_mpf(0).is_zero
    assert TReal.from_ln(0, Tln.from_mpf(3)).is_zero


def test_treal_plain_addition_resolves_cancellation():
    a = TReal.from_mpf(mpf("1.5"))
    b = TReal.from_mpf(mpf("-1.25"))
    assert abs(a.add(b).to_mpf() - mpf("0.25")) < mpf("1e-18")
    assert a.add(a.neg()).is_zero


def test_treal_tower_scale_addition():
    huge = TReal.from_ln(1, Tln.tower(2, mpf(9)))
    tiny = TReal.from_mpf(1)
    assert huge.add(tiny) == huge
    assert huge.add(huge.neg()).is_zero
    # opposite signs with a resolvable ratio subtract through logs
    a = TReal.from_ln(1, Tln.from_mpf(10))
    b = TReal.from_ln(-1, Tln.from_mpf(9))
    out = a.add(b)
    expected = mpmath.exp(10) - mpmath.exp(9)
    assert out.sign == 1
    assert abs(out.to_mpf() - expected) / expected < mpf("1e-12")


def test_treal_multiplication():
    x = TReal.from_mpf(3)
    assert abs(x.mul_mpf(-2).to_mpf() + 6) < mpf("1e-14")
    assert x.mul_mpf(0).is_zero
    y = x.mul_ln(Tln.from_mpf(mpmath.log(4)))
    assert abs(y.to_mpf() - 12) < mpf("1e-12")


def test_treal_magnitude_comparison():
    small = TReal.from_mpf(mpf("1e-9"))
    large = TReal.from_ln(-1, Tln.tower(2, mpf(9)))
    assert small.cmp_magnitude(large) < 0
    assert large.cmp_magnitude(small) > 0
    assert TReal.zero().cmp_magnitude(small) < 0
    assert TReal.zero().cmp_magnitude(TReal.zero()) == 0
    assert small.cmp_magnitude(TReal.zero()) > 0


def test_value_tln_splice():
    assert TReal.from_mpf(mpf("0.5")).value_tln() is None
    assert TReal.zero().value_tln() is None
    v = TReal.from_mpf(mpmath.exp(2)).value_tln()
    assert v is not None
    assert abs(v.to_mpf() - mpmath.exp(2)) < mpf("1e-12")


def test_from_tln_reifies_tower_logs():
    t = Tln.tower(2, mpf(7), sign=-1)
    x = TReal.from_tln(t)
    assert x.sign == -1
    # exp^2(7) is about 3e476, still a plain mpf
    assert abs(x.to_mpf() + mpmath.exp(mpmath.exp(7))) < mpf("1e460")
    tall = TReal.from_tln(Tln.tower(3, mpf(7), sign=-1))
    assert tall.to_mpf() is None  # ln|x| = exp^2(7), far past mpf reach
    assert tall.describe().startswith("-exp(")
    assert TReal.from_tln(Tln.zero()).is_zero
    plain = TReal.from_tln(Tln.from_mpf(-3))
    assert abs(plain.to_mpf() + 3) < mpf("1e-14")


def test_unmaterializable_magnitudes_report_none():
    x = TReal.from_ln(1, Tln.tower(1, mpf(10) ** 10))
    assert x.to_mpf() is None
    assert x.lnmag.magnitude_mpf() is None or x.lnmag.magnitude_mpf() > 0
