import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from holistic_fd.equivalent import equivalent_pde
from holistic_fd.stencil import (
    OperatorSeries,
    Stencil,
    basis_operator,
    compose,
    decompose,
    derivative_to_series,
    grid_operator,
    operator_name,
    symbol,
)

fractions = st.fractions(min_value=-3, max_value=3, max_denominator=12)
stencils = st.dictionaries(st.integers(-4, 4), fractions, max_size=5).map(Stencil)


def test_basic_operators():
    assert grid_operator("delta", 2).taps == {-1: 1, 0: -2, 1: 1}
    assert grid_operator("mu_delta", 1).taps == {-1: Fraction(-1, 2), 1: Fraction(1, 2)}
    assert grid_operator("mu_delta", 3).taps == {
        -2: Fraction(-1, 2), -1: 1, 1: -1, 2: Fraction(1, 2)
    }
    assert grid_operator("nabla", 2).taps == {-2: 1, -1: -2, 0: 1}
    assert grid_operator("delta", 4).taps == {-2: 1, -1: -4, 0: 6, 1: -4, 2: 1}


def test_odd_delta_powers_are_refused():
    with pytest.raises(ValueError, match="half"):
        grid_operator("delta", 1)
    with pytest.raises(ValueError):
        grid_operator("mu_delta", 2)


@given(stencils, stencils, stencils)
@settings(max_examples=50)
def test_composition_is_commutative_and_associative(a, b, c):
    assert compose(a, b) == compose(b, a)
    assert compose(compose(a, b), c) == compose(a, compose(b, c))
    assert a * (b + c) == a * b + a * c


@given(stencils, stencils, st.floats(-math.pi, math.pi))
@settings(max_examples=50)
def test_symbol_is_multiplicative(a, b, theta):
    assert cmath.isclose(symbol(a * b, theta), symbol(a, theta) * symbol(b, theta), abs_tol=1e-9)


@given(stencils)
def test_decompose_reconstructs(s):
    parts = decompose(s)
    rebuilt = Stencil()
    for (kind, m, p), c in parts.items():
        rebuilt = rebuilt + (basis_operator(kind, m) * c).times_h(p)
    assert rebuilt == s


def test_decompose_backward_operator():
    s = grid_operator("nabla", 1) + grid_operator("nabla", 2) * Fraction(1, 2)
    assert s.taps == {-2: Fraction(1, 2), -1: -2, 0: Fraction(3, 2)}
    assert decompose(s) == {
        ("odd", 1, 0): 1,
        ("odd", 2, 0): Fraction(-1, 2),
        ("even", 2, 0): Fraction(1, 4),
    }


@given(stencils, st.integers(-3, 3))
def test_json_round_trip(s, p):
    s = s.times_h(p)
    if not s.is_homogeneous:
        return
    assert Stencil.from_json(s.to_json()) == s


def test_json_format():
    s = Stencil({-2: Fraction(1, 2), 0: -1}, hpower=-1)
    assert s.to_json_obj() == {"hpower": -1, "taps": {"-2": "1/2", "0": "-1"}}


def test_mixed_hpowers_keep_components():
    s = Stencil({0: 1}, hpower=-2) + Stencil({1: 1}, hpower=0)
    assert list(s.hpowers) == [-2, 0]
    assert not s.is_homogeneous
    with pytest.raises(ValueError):
        _ = s.hpower


def test_transpose_and_constants():
    d2 = grid_operator("delta", 2)
    assert d2.annihilates_constants()
    nab = grid_operator("nabla", 1)
    assert nab.transpose().taps == {1: -1, 0: 1}


def test_operator_names():
    assert operator_name("even", 1) == "δ²"
    assert operator_name("odd", 2) == "μδ³"


# classical central-difference tables (h = 1)
KNOWN = {
    1: ["1", "-1/6", "1/30", "-1/140", "1/630"],
    2: ["1", "-1/12", "1/90", "-1/560", "1/3150"],
    3: ["1", "-1/4", "7/120", "-41/3024"],
    4: ["1", "-1/6", "7/240", "-41/7560"],
}


@pytest.mark.parametrize("order", sorted(KNOWN))
def test_derivative_series_tables(order):
    ser = derivative_to_series(order, len(KNOWN[order]))
    start = (order + 1) // 2
    got = [ser.coefficient(start + i)[-order] for i in range(len(KNOWN[order]))]
    assert got == [Fraction(x) for x in KNOWN[order]]
    assert ser.max_index == start + len(KNOWN[order]) - 1


@pytest.mark.parametrize("order", [1, 2, 3, 4, 5, 6])
def test_derivative_series_expands_back_to_derivative(order):
    terms = 4
    st_ = derivative_to_series(order, terms).to_stencil()
    eq = equivalent_pde(st_, max_h_order=2 * terms - 1)
    # d^n plus an O(h^{2 terms}) remainder
    assert eq.terms == {(order, 0, 0): 1}


def test_operator_series_truncation():
    a = OperatorSeries.from_coefficients("even", [1, 2], exact=False)
    assert a.max_index == 1
    assert a.known_through(1) and not a.known_through(2)
    with pytest.raises(ValueError):
        a.coefficient(2)
    exact = OperatorSeries.from_coefficients("even", [1, 2])
    assert exact.coefficient(5) == {}
    assert (a + exact).max_index == 1
