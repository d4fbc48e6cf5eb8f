import random
from fractions import Fraction

import pytest

from qharmonic.exact import (
    CycloNumber,
    DivisionByZero,
    IrrationalCoefficient,
    TPoly,
    binomial,
    cyclotomic_polynomial,
    euler_phi,
    is_rational,
    parse_rational,
    render_rational,
    scalar_eq,
    scalar_from_json,
    scalar_pow,
    scalar_to_json,
)


def test_cyclotomic_polynomials():
    # coefficient tuples are low-to-high degree
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(2) == (1, 1)
    assert cyclotomic_polynomial(3) == (1, 1, 1)
    assert cyclotomic_polynomial(4) == (1, 0, 1)
    assert cyclotomic_polynomial(6) == (1, -1, 1)
    assert cyclotomic_polynomial(12) == (1, 0, -1, 0, 1)


def test_euler_phi():
    assert [euler_phi(n) for n in range(1, 13)] == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]


def test_zeta_powers_cycle():
    for n in (2, 3, 4, 5, 6, 12):
        zeta = CycloNumber.zeta(n)
        assert zeta ** n == CycloNumber.from_rational(n, Fraction(1))
        assert zeta ** (n + 3) == zeta ** 3
        # all proper powers differ from 1
        for m in range(1, n):
            assert zeta ** m != CycloNumber.from_rational(n, Fraction(1))


def test_geometric_sum_vanishes():
    for n in (3, 4, 5, 7):
        zeta = CycloNumber.zeta(n)
        total = CycloNumber.from_rational(n, Fraction(0))
        for m in range(n):
            total = total + zeta ** m
        flag, value = is_rational(total)
        assert flag and value == 0


def test_cyclo_inverse_random():
    rng = random.Random(7)
    for n in (3, 4, 5, 8):
        for _ in range(20):
            a = CycloNumber(n, [Fraction(rng.randint(-5, 5), rng.randint(1, 4))
                               for _ in range(euler_phi(n))])
            if a == CycloNumber.from_rational(n, Fraction(0)):
                continue
            assert a * a.inverse() == CycloNumber.from_rational(n, Fraction(1))


def test_inverse_of_zero_raises():
    with pytest.raises(DivisionByZero):
        CycloNumber.from_rational(5, Fraction(0)).inverse()


def test_one_minus_zeta_inverse():
    # 1/(1-zeta_3) = (2+zeta_3)/3
    zeta = CycloNumber.zeta(3)
    inv = (CycloNumber.from_rational(3, Fraction(1)) - zeta).inverse()
    assert inv * (CycloNumber.from_rational(3, Fraction(1)) - zeta) == CycloNumber.from_rational(3, Fraction(1))
    assert inv == (CycloNumber.from_rational(3, Fraction(2)) + zeta) * Fraction(1, 3)


def test_mixed_scalar_ops():
    zeta = CycloNumber.zeta(5)
    assert scalar_eq(zeta * Fraction(0), Fraction(0))
    assert scalar_eq(Fraction(2) + zeta - zeta, Fraction(2))
    assert scalar_eq(scalar_pow(Fraction(2, 3), -2), Fraction(9, 4))
    assert scalar_eq(scalar_pow(zeta, 0), Fraction(1))


def test_rational_round_trip():
    assert parse_rational("-3/7") == Fraction(-3, 7)
    assert parse_rational("4") == Fraction(4)
    assert render_rational(Fraction(10, 4)) == "5/2"
    assert render_rational(Fraction(-2)) == "-2"


def test_scalar_json_round_trip():
    samples = [Fraction(3, 4), Fraction(-2),
               CycloNumber.zeta(5), CycloNumber.zeta(3) * Fraction(1, 6) + Fraction(2)]
    for s in samples:
        assert scalar_eq(scalar_from_json(scalar_to_json(s)), s)


def test_rational_valued_cyclo_collapses_in_json():
    zeta = CycloNumber.zeta(4)
    val = zeta * zeta  # equals -1
    assert scalar_to_json(val) == "-1"


def test_tpoly_arithmetic():
    t = TPoly.t()
    p = (t + 1) * (t - 1)
    assert p == TPoly({2: Fraction(1), 0: Fraction(-1)})
    assert p.eval(Fraction(3)) == 8
    assert p.degree() == 2
    assert (p - p).is_zero()


def test_tpoly_affine_substitution():
    t = TPoly.t()
    p = t * t + t * 2 + 1
    # t -> 1 - t
    q = p.affine_t(-1, 1)
    assert q.eval(Fraction(1, 3)) == p.eval(Fraction(2, 3))
    # involution
    assert q.affine_t(-1, 1) == p


def test_tpoly_divexact():
    t = TPoly.t()
    num = (t * 2 + 3) * (t * t - t + 5)
    assert num.divexact(t * 2 + 3) == t * t - t + 5
    with pytest.raises(ArithmeticError):
        (num + 1).divexact(t * 2 + 3)


def test_tpoly_rationalized_guards():
    zeta = CycloNumber.zeta(3)
    ok = TPoly({0: zeta * Fraction(0) + Fraction(1, 2)})
    assert ok.rationalized() == TPoly({0: Fraction(1, 2)})
    bad = TPoly({1: zeta})
    with pytest.raises(IrrationalCoefficient):
        bad.rationalized()


def test_tpoly_json_key_order():
    p = TPoly({0: Fraction(1, 3), 1: Fraction(1, 3)})
    assert list(p.to_json()) == ["t^0", "t^1"]
    assert TPoly.from_json(p.to_json()) == p


def test_binomial_outside_triangle():
    assert binomial(5, 2) == 10
    assert binomial(5, -1) == 0
    assert binomial(3, 7) == 0
    assert binomial(0, 0) == 1
