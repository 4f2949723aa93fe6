from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from fekete.exactalg import (
    QuotientAlgebra,
    TowerField,
    as_tower,
    format_scalar,
    numeric_value,
    parse_scalar,
    sqrt,
)


def test_sqrt_squares_back():
    for m in (2, 5, 6, -1, Fraction(3, 7)):
        assert sqrt(m) * sqrt(m) == m


def test_negative_radicand_branch():
    i = sqrt(-1)
    assert complex(i) == 1j
    assert i * i == -1
    assert not i.is_real()
    assert sqrt(-5) == sqrt(-1) * sqrt(5)


def test_square_factors_pulled_out():
    assert sqrt(12) == 2 * sqrt(3)
    assert sqrt(Fraction(1, 4)) == Fraction(1, 2)
    assert sqrt(0) == 0


def test_join_of_fields():
    a = sqrt(2) + sqrt(3)
    assert a * a == 5 + 2 * sqrt(6)
    assert (sqrt(2) * sqrt(3)) == sqrt(6)


def test_inverse_against_sympy():
    a = 3 + 2 * sqrt(5) - sqrt(6)
    s = 3 + 2 * sympy.sqrt(5) - sympy.sqrt(6)
    got = complex(a.inverse())
    want = complex(sympy.N(1 / s, 30))
    assert abs(got - want) < 1e-14


def test_rational_detection():
    x = (1 + sqrt(5)) * (1 - sqrt(5))
    assert x.is_rational() and x.to_fraction() == -4
    with pytest.raises(ValueError):
        (1 + sqrt(5)).to_fraction()


def test_sign_and_order():
    assert 36 - 15 * sqrt(6) < 0
    assert sqrt(5) - 2 > 0
    assert abs(2 - sqrt(5)) == sqrt(5) - 2


def test_interval_encloses():
    a = 36 - 15 * sqrt(6)
    box = numeric_value(a, precision=200)
    with mpmath.workdps(60):
        assert (36 - 15 * mpmath.sqrt(6)) in box.re
    assert box.real_sign() == -1
    assert box.width < 1e-50


def test_format_parse_round_trip():
    for a in (as_tower(Fraction(-3, 7)), (1 + sqrt(5)) / 4, sqrt(-1) / sqrt(5), 36 - 15 * sqrt(6)):
        assert parse_scalar(format_scalar(a)) == a


def test_parse_rejects_calls():
    with pytest.raises(ValueError):
        parse_scalar("__import__('os')")
    with pytest.raises(ValueError):
        parse_scalar("sqrt(x)")


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        1 / (sqrt(5) - sqrt(5))


def test_quotient_algebra_normal_forms():
    Q = QuotientAlgebra(["t"], ["t^2 - 2"])
    t = Q.gen("t")
    assert Q.dim == 2
    assert (t * t).is_rational() and (t * t).to_fraction() == 2
    pts = sorted(float(p[0][0].real) for p in Q.points())
    assert abs(pts[0] + 2**0.5) < 1e-12 and abs(pts[1] - 2**0.5) < 1e-12


def test_tower_field_is_cached():
    assert TowerField((5, -1)) is TowerField((5, -1))
    assert TowerField((5, -1)).dim == 4


small = st.fractions(min_value=-9, max_value=9, max_denominator=6)


@settings(max_examples=60, deadline=None)
@given(small, small, small, small)
def test_quadratic_field_matches_sympy(a, b, c, d):
    x = a + b * sqrt(5)
    y = c + d * sqrt(5)
    sx = sympy.Rational(a.numerator, a.denominator) + sympy.Rational(b.numerator, b.denominator) * sympy.sqrt(5)
    sy = sympy.Rational(c.numerator, c.denominator) + sympy.Rational(d.numerator, d.denominator) * sympy.sqrt(5)
    assert abs(float(x * y) - float(sympy.N(sx * sy, 30))) < 1e-9
    if not y.is_zero():
        assert abs(float(x / y) - float(sympy.N(sx / sy, 30))) < 1e-9


@settings(max_examples=40, deadline=None)
@given(small, small)
def test_interval_always_contains_float(a, b):
    x = a + b * sqrt(6)
    with mpmath.workdps(50):
        exact = mpmath.mpf(a.numerator) / a.denominator + mpmath.mpf(b.numerator) / b.denominator * mpmath.sqrt(6)
        assert exact in numeric_value(x, precision=160).re
