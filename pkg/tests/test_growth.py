from fractions import Fraction

import pytest

from slowent.growth import GrowthSequence, ScalingFunction, floor_rational_power, pow_lt


def test_floor_rational_power_integer_cases():
    assert floor_rational_power(Fraction(8), Fraction(1, 3)) == 2
    assert floor_rational_power(Fraction(9), Fraction(1, 2)) == 3
    assert floor_rational_power(Fraction(10), Fraction(1, 2)) == 3
    assert floor_rational_power(Fraction(5, 2), Fraction(2)) == 6  # (5/2)^2 = 6.25
    assert floor_rational_power(Fraction(2), Fraction(10)) == 1024


def test_floor_rational_power_large():
    # floor((10^30)^(1/3)) = 10^10
    assert floor_rational_power(Fraction(10**30), Fraction(1, 3)) == 10**10
    assert floor_rational_power(Fraction(10**30 - 1), Fraction(1, 3)) == 10**10 - 1


def test_pow_lt_exact():
    assert pow_lt(Fraction(2), Fraction(10), Fraction(3), Fraction(7))  # 1024 < 2187
    assert not pow_lt(Fraction(3), Fraction(7), Fraction(2), Fraction(10))
    # 2^(3/2) vs 17/6: 2.828 < 2.833
    assert pow_lt(Fraction(2), Fraction(3, 2), Fraction(17, 6), Fraction(1))


def test_polynomial_growth_values():
    b = GrowthSequence(kind="polynomial", exponent=Fraction(2))
    assert b.value(7) == 49
    assert b.floor_value(7) == 49
    b2 = GrowthSequence(kind="polynomial", exponent=Fraction(1, 2), scale=2, offset=1)
    # b_3 = (2*4)^(1/2) = sqrt(8)
    assert b2.floor_value(3) == 2


def test_growth_lt_power():
    b = GrowthSequence(kind="polynomial", exponent=Fraction(2))
    # L^2 < 4^(0.982 L) at L = 10: 100 < 4^9.82 ~ 8.2e5
    assert b.lt_power(10, 4, Fraction(982, 1000) * 10)
    assert not b.lt_power(1, 4, Fraction(0))


def test_table_growth():
    b = GrowthSequence(kind="table", table=(1, 2, 4, 8))
    assert b.value(3) == 4
    assert b.max_n == 4
    with pytest.raises(ValueError):
        b.value(5)
    with pytest.raises(ValueError):
        GrowthSequence(kind="table", table=(2, 1))


def test_scaling_polynomial():
    a = ScalingFunction()
    assert a.value(5, Fraction(2)) == 25
    assert a.value(5, Fraction(1, 2)) == pytest.approx(5**0.5)
    g = a.growth_at(Fraction(3), scale=4, offset=1)
    # b_k = (4(k+1))^3
    assert g.value(1) == 512
