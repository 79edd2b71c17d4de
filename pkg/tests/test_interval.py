from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heptagonal.interval import RigorousInterval, format_outward, mpf_to_fraction

rationals = st.fractions(min_value=Fraction(-10 ** 6), max_value=Fraction(10 ** 6), max_denominator=10 ** 6)
positive = st.fractions(min_value=Fraction(1, 10 ** 6), max_value=Fraction(10 ** 6), max_denominator=10 ** 6)
precisions = st.sampled_from([53, 64, 128, 256])


@given(rationals, precisions)
def test_exact_encloses_value(x, prec):
    assert RigorousInterval.exact(x, prec).contains(x)


@given(rationals, rationals, precisions)
def test_field_operations_enclose_exact_results(x, y, prec):
    X, Y = RigorousInterval.exact(x, prec), RigorousInterval.exact(y, prec)
    assert (X + Y).contains(x + y)
    assert (X - Y).contains(x - y)
    assert (X * Y).contains(x * y)
    if y != 0:
        assert (X / Y).contains(x / y)


@given(rationals, precisions)
def test_mixed_operands_are_coerced(x, prec):
    X = RigorousInterval.exact(x, prec)
    assert (X + 3).contains(x + 3)
    assert (2 * X).contains(2 * x)
    assert (1 - X).contains(1 - x)
    assert (X * Fraction(1, 7)).contains(x / 7)


@given(positive, precisions)
def test_sqrt_square_roundtrip(x, prec):
    r = RigorousInterval.exact(x, prec).sqrt()
    assert (r * r).contains(x)


@given(positive)
def test_exp_log_roundtrip(x):
    assert RigorousInterval.exact(x).log().exp().contains(x)


@settings(max_examples=50)
@given(positive, st.sampled_from([Fraction(1, 10), Fraction(3, 5), Fraction(5, 2)]))
def test_rational_power_encloses_high_precision_value(x, e):
    enclosure = RigorousInterval.exact(x, 128) ** e
    with mpmath.workprec(600):
        reference = mpmath.power(mpmath.mpf(x.numerator) / x.denominator, mpmath.mpf(e.numerator) / e.denominator)
        assert enclosure.lo <= reference <= enclosure.hi


@settings(max_examples=50)
@given(positive)
def test_refinement_nests(x):
    coarse = RigorousInterval.exact(x, 64).sqrt().log()
    fine = RigorousInterval.exact(x, 512).sqrt().log()
    assert coarse.lo <= fine.lo <= fine.hi <= coarse.hi
    assert fine.width <= coarse.width


def test_pi_enclosure():
    enclosure = RigorousInterval.pi(128)
    with mpmath.workprec(600):
        assert enclosure.lo <= +mpmath.pi <= enclosure.hi


def test_decimal_literal_is_exact():
    x = RigorousInterval.from_decimal("6.95e18")
    assert x.contains(Fraction(695 * 10 ** 16))


def test_empty_interval_rejected():
    with pytest.raises(ValueError):
        RigorousInterval(mpmath.mpf(2), mpmath.mpf(1))


def test_comparisons_use_conservative_endpoints():
    third = RigorousInterval.exact(Fraction(1, 3))
    assert third.certainly_lt(Fraction(1, 2))
    assert not third.certainly_le(Fraction(1, 3))
    hull = RigorousInterval.hull([RigorousInterval.exact(1), RigorousInterval.exact(2)])
    assert hull.contains(Fraction(3, 2))


@given(rationals.filter(lambda q: q != 0), st.integers(1, 8))
def test_format_outward_bounds_value(q, digits):
    up = Fraction(format_outward(q, digits, up=True))
    down = Fraction(format_outward(q, digits, up=False))
    assert down <= q <= up


def test_format_outward_examples():
    assert format_outward(Fraction(9650, 1000) * 10 ** 24, 3) == "9.65e+24"
    assert format_outward(Fraction(96501, 10000) * 10 ** 24, 3) == "9.66e+24"
    assert format_outward(Fraction(999999), 4) == "1.000e+6"
    assert format_outward(Fraction(10) ** 500 * 3 / 7, 4) == "4.286e+499"


def test_mpf_to_fraction_is_exact():
    assert mpf_to_fraction(mpmath.mpf(0.375)) == Fraction(3, 8)
    assert mpf_to_fraction(mpmath.mpf(0)) == 0


def test_rel_diff_and_sig():
    x = RigorousInterval.exact(Fraction(101, 100))
    assert x.rel_diff(1) == pytest.approx(0.01)
    assert x.sig(2) == "1.1e+0"


@given(rationals, st.sampled_from([128, 256, 512]))
def test_negation_does_not_round_to_ambient_precision(x, prec):
    X = RigorousInterval.exact(x, prec)
    assert (-X).contains(-x)
    assert (-X).width == X.width
    assert X.symmetric().contains(x) and X.symmetric().contains(-x)
