from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graevlab.numeric import Enclosure, as_fraction, precision_bits, precision_digits


def test_as_fraction():
    assert as_fraction("3/4") == Fraction(3, 4)
    assert as_fraction(" 5 ") == 5
    assert as_fraction(Fraction(1, 3)) == Fraction(1, 3)
    with pytest.raises(TypeError):
        as_fraction(0.5)
    with pytest.raises(TypeError):
        as_fraction(True)


def test_precision_from_environment(monkeypatch):
    monkeypatch.delenv("GRAEV_PRECISION_DIGITS", raising=False)
    assert precision_digits() == 50
    monkeypatch.setenv("GRAEV_PRECISION_DIGITS", "80")
    assert precision_digits() == 80
    assert precision_bits() > 80 * 3.32
    monkeypatch.setenv("GRAEV_PRECISION_DIGITS", "5")
    with pytest.raises(ValueError):
        precision_digits()


@given(st.integers(1, 10 ** 6))
def test_sqrt_encloses_and_is_tight(n):
    e = Enclosure.sqrt_int(n)
    assert e.lo ** 2 <= n <= e.hi ** 2
    assert e.width < Fraction(1, 10 ** 40)


def test_perfect_squares_are_exact():
    assert Enclosure.sqrt(Fraction(9, 4)) == Enclosure.exact(Fraction(3, 2))
    assert Enclosure.sqrt(0).is_exact


@given(st.integers(-50, 50), st.integers(1, 50), st.integers(2, 97))
def test_arithmetic_keeps_enclosure(a, b, p):
    q = Fraction(a, b)
    s = Enclosure.sqrt_int(p).scale(q) + Enclosure.exact(q) - Enclosure.sqrt_int(p)
    with mpmath.workdps(90):
        true = (mpmath.mpf(a) / b) * mpmath.sqrt(p) + mpmath.mpf(a) / b - mpmath.sqrt(p)
        slop = mpmath.mpf(10) ** -80  # mpmath's own rounding on exact cases
        assert mpmath.mpf(s.lo.numerator) / s.lo.denominator <= true + slop
        assert true <= mpmath.mpf(s.hi.numerator) / s.hi.denominator + slop


def test_certain_comparisons():
    root2 = Enclosure.sqrt_int(2)
    assert root2.certainly_gt(Fraction(141, 100))
    assert root2.certainly_lt(Fraction(142, 100))
    assert not root2.certainly_lt(root2)
    assert Enclosure.exact(1).certainly_le(1)
    assert Enclosure.exact(1).certainly_ge(Enclosure.exact(1))
    assert (root2 - root2).certainly_lt(Fraction(1, 10 ** 30))


def test_json_forms():
    assert Enclosure.exact(Fraction(1, 2)).to_json() == {"exact": "1/2"}
    j = Enclosure.sqrt_int(2).to_json()
    assert set(j) == {"lo", "hi", "approx"}
    assert j["approx"].startswith("1.41421356")
