from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from holistic_fd.algebra import (
    BiSeries,
    PowerSeries,
    XiPoly,
    apply_xi_operator,
    format_rational,
    parse_rational,
    xi_shift,
)

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=50)
polys = st.lists(fractions, max_size=6).map(XiPoly)


@given(fractions)
def test_rational_text_round_trip(q):
    assert parse_rational(format_rational(q)) == q


@pytest.mark.parametrize(
    "text,value",
    [("1/2", Fraction(1, 2)), ("-3", Fraction(-3)), (" 4/6 ", Fraction(2, 3)), ("0.25", Fraction(1, 4))],
)
def test_parse_rational(text, value):
    assert parse_rational(text) == value


def test_format_integral_has_no_denominator():
    assert format_rational(Fraction(6, 3)) == "2"
    assert format_rational(Fraction(-1, 12)) == "-1/12"


@pytest.mark.parametrize("bad", ["", "1/0", "abc", "1//2"])
def test_parse_rational_rejects(bad):
    with pytest.raises((ValueError, ZeroDivisionError)):
        parse_rational(bad)


@given(polys, polys, fractions)
def test_poly_ring_matches_pointwise(p, q, x):
    assert (p + q)(x) == p(x) + q(x)
    assert (p * q)(x) == p(x) * q(x)
    assert (p - q)(x) == p(x) - q(x)


@given(polys, fractions, fractions)
def test_shift_is_translation(p, s, x):
    assert xi_shift(p, s)(x) == p(x + s)


@given(polys, fractions)
def test_xi_difference_operators(p, x):
    h = Fraction(1, 2)
    assert apply_xi_operator(p, "delta2")(x) == p(x + 1) - 2 * p(x) + p(x - 1)
    assert apply_xi_operator(p, "mu_delta")(x) == (p(x + 1) - p(x - 1)) / 2
    assert apply_xi_operator(p, "delta")(x) == p(x + h) - p(x - h)
    assert apply_xi_operator(p, "mu")(x) == (p(x + h) + p(x - h)) / 2


def test_poly_degree_and_parity():
    assert XiPoly(()).degree == -1
    p = XiPoly((0, 1, 0, 2))
    assert p.degree == 3 and p.is_odd() and not p.is_even()
    assert p.derivative(2) == XiPoly((0, 12))


@given(st.lists(fractions, min_size=2, max_size=7).filter(lambda c: c[1] != 0))
@settings(max_examples=40)
def test_reversion_inverts_composition(coeffs):
    coeffs = [Fraction(0)] + coeffs[1:]
    f = PowerSeries(tuple(coeffs), len(coeffs))
    g = f.reversion()
    ident = f.compose(g)
    assert ident[1] == 1
    assert all(ident[i] == 0 for i in range(2, ident.order))


def test_power_series_product_truncates():
    a = PowerSeries((1, 1), 3)
    assert (a * a).coeffs == (1, 2, 1)
    assert (a**3).coeffs == (1, 3, 3)


def test_biseries_truncation_and_product():
    a = BiSeries({(0, 0): Fraction(1), (1, 0): Fraction(2), (0, 1): Fraction(3)}, 2, 2)
    prod = a * a
    assert prod[(0, 0)] == 1
    assert prod[(1, 0)] == 4
    assert prod[(1, 1)] == 12
    assert (2, 0) not in prod
    assert BiSeries({(3, 0): Fraction(1)}, 2, 2) == BiSeries({}, 2, 2)


def test_biseries_evaluate():
    a = BiSeries({(0, 0): Fraction(1), (1, 1): Fraction(2)}, 3, 3)
    assert a.evaluate(Fraction(1, 2), Fraction(3)) == 1 + 2 * Fraction(1, 2) * 3
