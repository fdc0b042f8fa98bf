import random
from fractions import Fraction

import pytest

from lambertseq.errors import ConfigError, DomainError
from lambertseq.numerics.algebraic import (
    AlgebraicNumber,
    Classification,
    classify_pisot,
    field_norm,
)

from _oracles import contains_value, intersects, quad_roots_bracket

rng = random.Random(61803)

GOLDEN = [-1, -1, 1]


def test_golden_ratio_is_pisot():
    a = AlgebraicNumber(GOLDEN)
    assert classify_pisot(a) is Classification.PISOT
    assert a.is_real
    (lo, hi), _ = quad_roots_bracket(-1, -1)
    assert intersects(a.alpha_real, lo, hi)
    assert a.admissible


def test_smallest_pisot_cubic_classification():
    a = AlgebraicNumber([-1, -1, 0, 1], prec=192)
    assert a.classification is Classification.PISOT
    # |alpha - 1.3247| < 1e-4
    assert intersects(
        a.alpha_real, Fraction(13247, 10000) - Fraction(1, 10000), Fraction(13247, 10000) + Fraction(1, 10000)
    )


def test_quadratic_pisot_with_small_partner():
    a = AlgebraicNumber([1, -4, 1])  # roots 2 +- sqrt3
    assert a.classification is Classification.PISOT
    (lo, hi), _ = quad_roots_bracket(-4, 1)
    assert intersects(a.alpha_real, lo, hi)


def test_sqrt2_not_admissible():
    # second root -sqrt2 has modulus > 1
    a = AlgebraicNumber([-2, 0, 1])
    assert a.classification is Classification.NOT_ADMISSIBLE
    assert not a.admissible


def test_real_negative_root_not_admissible():
    a = AlgebraicNumber([2, 1], root=0)  # x + 2, root -2
    assert a.classification is Classification.NOT_ADMISSIBLE


def test_degree_one_pisot():
    a = AlgebraicNumber([-2, 1])
    assert a.classification is Classification.PISOT
    assert a.alpha_real.contains(2)
    assert a.degree == 1


def test_complex_pisot():
    # x^2 - 2x + 3: roots 1 +- i sqrt2, modulus sqrt3 > 1, each other's partner
    a = AlgebraicNumber([3, -2, 1])
    assert a.classification is Classification.COMPLEX_PISOT
    assert not a.is_real
    assert a.partner_index is not None
    assert a.alpha.imag.mid > 0  # upper-half representative chosen
    m2 = abs(a.alpha).pow_int(2)
    assert contains_value(m2, 3)


def test_classification_stable_under_precision_doubling():
    for coeffs in (GOLDEN, [-1, -1, 0, 1], [3, -2, 1], [-2, 0, 1], [1, -4, 1]):
        a = AlgebraicNumber(coeffs, prec=64)
        b = a.at_precision(256)
        assert a.classification is b.classification


def test_root_selectors():
    a = AlgebraicNumber(GOLDEN, root="largest-real")
    assert a.classification is Classification.PISOT
    b = AlgebraicNumber(GOLDEN, root=1)
    assert b.classification is Classification.NOT_ADMISSIBLE  # -0.618 inside disk
    with pytest.raises(ConfigError):
        AlgebraicNumber(GOLDEN, root=7)
    with pytest.raises(ConfigError):
        AlgebraicNumber(GOLDEN, root="weirdest")
    with pytest.raises(ConfigError):
        AlgebraicNumber([3, -2, 1], root="largest-real")  # no real root


def test_norm_of_unity_and_alpha():
    a = AlgebraicNumber(GOLDEN)
    assert contains_value(field_norm([1, 0], a), 1)
    # norm(alpha) = (-1)^deg * c0 = -1
    assert contains_value(field_norm([0, 1], a), -1)
    # norm(1 + alpha) = 1 + (phi + phi') + phi phi' = 1 + 1 - 1 = 1
    assert contains_value(field_norm([1, 1], a), 1)


def test_norm_requires_admissible_and_matching_length():
    bad = AlgebraicNumber([-2, 0, 1])
    with pytest.raises(DomainError):
        field_norm([1, 0], bad)
    good = AlgebraicNumber(GOLDEN)
    with pytest.raises(ConfigError):
        field_norm([1], good)


def _quad_norm(a, b):
    # N(a + b phi) = a^2 + ab - b^2 for x^2 - x - 1
    return a * a + a * b - b * b


def test_norm_multiplicativity_on_quadratic_integers():
    phi = AlgebraicNumber(GOLDEN, prec=160)
    for _ in range(40):
        a1, b1 = rng.randint(-9, 9), rng.randint(-9, 9)
        a2, b2 = rng.randint(-9, 9), rng.randint(-9, 9)
        n1 = field_norm([a1, b1], phi)
        n2 = field_norm([a2, b2], phi)
        assert contains_value(n1, _quad_norm(a1, b1))
        assert contains_value(n2, _quad_norm(a2, b2))
        # product (a1 + b1 phi)(a2 + b2 phi) with phi^2 = phi + 1
        pa = a1 * a2 + b1 * b2
        pb = a1 * b2 + b1 * a2 + b1 * b2
        np_ = field_norm([pa, pb], phi)
        assert contains_value(np_, _quad_norm(a1, b1) * _quad_norm(a2, b2))
        assert contains_value(np_, _quad_norm(pa, pb))


def test_norm_with_rational_coordinates():
    phi = AlgebraicNumber(GOLDEN)
    # N(1/2 + alpha) = 1/4 + 1/2 - 1
    v = field_norm([Fraction(1, 2), 1], phi)
    assert contains_value(v, Fraction(-1, 4))


def test_json_view():
    a = AlgebraicNumber(GOLDEN)
    j = a.to_json()
    assert j["poly"] == GOLDEN
    assert j["classification"] == "Pisot"
    assert j["prec"] == a.prec
