import json
import random
from fractions import Fraction

import pytest

from lambertseq.errors import ConfigError, DomainError
from lambertseq.numerics.balls import BallComplex, BallReal, decimal_bound

from _oracles import (
    contains_value,
    half_quad_bracket,
    half_quad_pow,
    intersects,
    rad_frac,
    width,
)

rng = random.Random(90125)


def test_exact_integer_product_has_zero_radius():
    a = BallReal.exact(2, 128)
    b = BallReal.exact(3, 128)
    c = a * b
    assert c.is_exact
    assert c.mid == 6


def test_interval_addition_accumulates_radius():
    a = BallReal.from_midrad(1, Fraction(1, 10), 128)
    c = a + a
    assert contains_value(c, 2)
    assert rad_frac(c) >= Fraction(2, 10)


def test_phi_tenth_power_matches_quadratic_integer_oracle():
    # phi^10 = (123 + 55 sqrt 5)/2, computed by exact half-integer pairs
    pair = half_quad_pow((1, 1), 10, 5)
    assert pair == (123, 55)
    lo, hi = half_quad_bracket(pair, 5)
    phi = (BallReal.exact(5, 128).sqrt() + 1) / 2
    p10 = phi.pow_int(10)
    assert intersects(p10, lo, hi)
    assert width(p10) < Fraction(1, 10**30)
    assert str(lo).startswith("122") or lo > 122  # sanity: 122.99186...


def test_division_by_zero_ball_raises():
    a = BallReal.exact(1, 64)
    z = BallReal.from_midrad(0, Fraction(1, 100), 64)
    with pytest.raises(DomainError):
        a / z
    tiny = BallReal.from_midrad(Fraction(1, 100), Fraction(1, 50), 64)
    with pytest.raises(DomainError):
        a / tiny


def test_sqrt_log_domain_checks():
    with pytest.raises(DomainError):
        BallReal.from_midrad(0, Fraction(1, 2), 64).sqrt()
    with pytest.raises(DomainError):
        BallReal.exact(0, 64).log()
    # sqrt of an exact square stays tight
    s = BallReal.exact(Fraction(9, 4), 128).sqrt()
    assert contains_value(s, Fraction(3, 2))
    assert width(s) < Fraction(1, 2**100)


def test_exp_log_round_trip():
    x = BallReal.exact(Fraction(7, 3), 200)
    y = x.log().exp()
    assert intersects(y, *x.to_fraction_bounds())
    assert width(y) < Fraction(1, 2**150)


def test_abs_straddling_zero():
    b = BallReal.from_midrad(Fraction(-1, 10), Fraction(1, 2), 64)
    a = abs(b)
    lo, _ = a.to_fraction_bounds()
    assert lo >= -Fraction(1, 2**20)  # up-rounded radius may dip a hair below 0
    assert contains_value(a, Fraction(1, 10))
    assert contains_value(a, Fraction(6, 10) - Fraction(1, 100))


def test_pow_int_negative_exponent():
    x = BallReal.exact(2, 96)
    inv = x.pow_int(-5)
    assert contains_value(inv, Fraction(1, 32))
    assert inv.pow_int(0).mid == 1


def _gen_tree(d):
    if d == 0 or rng.random() < 0.3:
        return ("leaf", Fraction(rng.randint(-50, 50), rng.randint(1, 20)))
    return (rng.choice("+-*/"), _gen_tree(d - 1), _gen_tree(d - 1))


def _eval_fraction(t):
    if t[0] == "leaf":
        return t[1]
    a, b = _eval_fraction(t[1]), _eval_fraction(t[2])
    if a is None or b is None or (t[0] == "/" and b == 0):
        return None
    return {"+": a + b, "-": a - b, "*": a * b, "/": b and a / b}[t[0]]


def _eval_ball(t, prec):
    if t[0] == "leaf":
        return BallReal.exact(t[1], prec)
    a, b = _eval_ball(t[1], prec), _eval_ball(t[2], prec)
    if t[0] == "+":
        return a + b
    if t[0] == "-":
        return a - b
    if t[0] == "*":
        return a * b
    return a / b


def test_rational_expression_tree_containment():
    # random +,-,*,/ trees; the exact Fraction value must land in the
    # ball at both precisions
    checked = 0
    while checked < 50:
        tree = _gen_tree(rng.randint(1, 5))
        exact = _eval_fraction(tree)
        if exact is None:
            continue
        try:
            for prec in (64, 192):
                ball = _eval_ball(tree, prec)
                assert contains_value(ball, exact)
        except DomainError:
            continue  # ball denominator straddled zero; draw again
        checked += 1


def test_width_shrinks_with_precision():
    x64 = _chained(64)
    x256 = _chained(256)
    assert width(x256) < width(x64)
    lo64, hi64 = x64.to_fraction_bounds()
    lo256, hi256 = x256.to_fraction_bounds()
    # the tighter interval sits inside the looser one
    assert lo64 <= lo256 and hi256 <= hi64


def _chained(prec):
    x = BallReal.exact(Fraction(10, 7), prec)
    for _ in range(12):
        x = (x * x + 1) / (x + 3)
        x = x.sqrt().exp().log()
    return x


def test_complex_multiplication_and_division():
    z = BallComplex.exact(3, 4, 128)
    w = BallComplex.exact(1, -2, 128)
    p = z * w
    assert contains_value(p.real, 11)
    assert contains_value(p.imag, -2)
    q = p / w
    assert contains_value(q.real, 3)
    assert contains_value(q.imag, 4)
    assert contains_value(abs(z), 5)
    with pytest.raises(DomainError):
        z / BallComplex.exact(0, 0, 128)


def test_complex_pow_and_conjugate():
    z = BallComplex.exact(1, 1, 128)
    z4 = z.pow_int(4)
    assert contains_value(z4.real, -4)
    assert contains_value(z4.imag, 0)
    c = z.conjugate()
    assert contains_value(c.imag, -1)
    assert BallComplex.exact(5, 0, 64).is_real


def test_serialization_round_trip_and_determinism():
    b = (BallReal.exact(5, 160).sqrt() + Fraction(1, 3)) / 7
    j1 = json.dumps(b.to_json(), sort_keys=True)
    j2 = json.dumps(b.to_json(), sort_keys=True)
    assert j1 == j2
    back = BallReal.from_json(json.loads(j1))
    blo, bhi = b.to_fraction_bounds()
    rlo, rhi = back.to_fraction_bounds()
    assert rlo <= blo and bhi <= rhi  # reload only widens
    z = BallComplex.exact(2, -3, 96)
    zj = BallComplex.from_json(z.to_json())
    assert contains_value(zj.real, 2) and contains_value(zj.imag, -3)


def test_exact_decimal_midpoint_serialization():
    b = BallReal.exact(Fraction(7, 8), 64)
    assert b.to_json() == {"mid": "0.875", "rad": "0", "prec": 64}


def test_decimal_bound_directions():
    f = Fraction(1, 3)
    lo = decimal_bound(f, 6, "floor")
    hi = decimal_bound(f, 6, "ceil")
    assert Fraction(lo) <= f <= Fraction(hi)
    assert lo != hi
    g = Fraction(-1, 3)
    assert Fraction(decimal_bound(g, 6, "floor")) <= g <= Fraction(decimal_bound(g, 6, "ceil"))
    assert decimal_bound(Fraction(0), 5, "ceil") == "0"
    assert Fraction(decimal_bound(Fraction(10) ** 40, 3, "ceil")) >= 10**40


def test_decimal_interval_outward():
    b = BallReal.from_midrad(Fraction(1, 3), Fraction(1, 1000), 128)
    d = b.decimal_interval(8)
    assert Fraction(d["lo"]) <= Fraction(1, 3) - Fraction(1, 1000)
    assert Fraction(d["hi"]) >= Fraction(1, 3) + Fraction(1, 1000)


def test_bad_inputs_raise_config_errors():
    with pytest.raises(ConfigError):
        BallReal.exact(1.5, 64)  # floats rejected on purpose
    with pytest.raises(ConfigError):
        BallReal.exact(1, 4)
    with pytest.raises(ConfigError):
        BallReal.from_midrad(1, -1, 64)
    with pytest.raises(ConfigError):
        BallReal.exact("not a number", 64)
    with pytest.raises(ConfigError):
        BallReal.exact(2, 64).pow_int(Fraction(1, 2))


def test_strict_comparisons():
    a = BallReal.from_midrad(1, Fraction(1, 100), 64)
    b = BallReal.from_midrad(2, Fraction(1, 100), 64)
    assert a.strictly_less(b)
    assert b.strictly_greater(a)
    assert not a.strictly_less(a)
    assert a.strictly_greater(Fraction(1, 2))
    assert a.contains_zero() is False
    assert BallReal.from_midrad(0, Fraction(1, 10), 64).contains_zero()
