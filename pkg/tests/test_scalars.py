from fractions import Fraction

import pytest

from mcde.scalars import GaussianRational, as_scalar, format_scalar, gauss

I = gauss(0, 1)


def test_gauss_collapses_to_fraction():
    assert isinstance(gauss(3, 0), Fraction)
    assert isinstance(I, GaussianRational)


def test_arithmetic_is_exact():
    assert I * I == -1
    assert isinstance(I * I, Fraction)
    assert (1 + I) * (1 - I) == 2
    assert 1 / I == -I
    assert (gauss(1, 1) ** 4) == -4
    assert gauss(Fraction(1, 2), 3) - Fraction(1, 2) == 3 * I


def test_formatting():
    assert format_scalar(Fraction(3)) == "3"
    assert format_scalar(Fraction(-3, 2)) == "-3/2"
    assert format_scalar(gauss(Fraction(1, 2), 3)) == "(1/2+3i)"
    assert format_scalar(-I) == "(0-1i)"


def test_floats_rejected():
    with pytest.raises(TypeError):
        as_scalar(0.5)
    with pytest.raises(TypeError):
        as_scalar(1j)


def test_hash_matches_equality():
    assert hash(gauss(2, 0)) == hash(Fraction(2))
    assert len({gauss(1, 1), GaussianRational(1, 1)}) == 1
