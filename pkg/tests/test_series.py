import random
from fractions import Fraction

import gmpy2
import pytest

from lambertseq.coefficients import build_table
from lambertseq.errors import ConfigError, DomainError
from lambertseq.numerics import AlgebraicNumber, BallComplex, BallReal
from lambertseq.sequences import CoprimeSequence, Explicit, PrimePower, SuperPrime, generate
from lambertseq.series import LucasPair, eval_f, eval_h, eval_lambert, eval_reciprocal_lucas

from _oracles import fib_lucas, intersects, lucas_pair_terms, rad_frac, sqrt_bounds

rng = random.Random(27182)

PHI_POLY = (-1, -1, 1)  # x^2 - x - 1


def psq(count=12):
    return generate(PrimePower(2), count)


def mixed():
    return CoprimeSequence(Explicit((3, 5, 11, 13, 17, 29)))


def direct_sum(table, row_name, j, zfrac, limit):
    row = getattr(table, row_name)(j)
    return sum(Fraction(int(row[n])) * zfrac**n for n in range(1, limit + 1))


def mpfr_frac(x):
    q = gmpy2.mpq(x)
    return Fraction(int(q.numerator), int(q.denominator))


def contains_with_slack(ball, value, slack):
    lo, hi = ball.to_fraction_bounds()
    return lo - slack <= value <= hi + slack


def test_eval_f_at_zero_is_exact_zero():
    sv = eval_f(1, 0, psq(), 128)
    assert sv.value.mid == 0 and sv.value.rad == 0
    assert sv.terms_used >= 1
    assert sv.tail_bound == 0


def test_eval_f_leading_term_prime_squares():
    # smallest n == 2 mod 4 with a divisor in {9,25,49,...} is 18,
    # so f_2(1/2) is 2^-18 plus strictly smaller positive terms
    sv = eval_f(2, Fraction(1, 2), psq(), 192)
    mid = mpfr_frac(sv.value.mid)
    assert Fraction(1, 2**18) < mid < Fraction(1, 2**17)
    table = build_table(psq(), 400)
    oracle = direct_sum(table, "b_row", 2, Fraction(1, 2), 400)
    assert contains_with_slack(sv.value, oracle, Fraction(1, 2**380))


def test_eval_f_matches_direct_summation():
    seq = psq()
    table = build_table(seq, 400)
    for j in (1, 3, 4):
        sv = eval_f(j, Fraction(1, 2), seq, 192)
        oracle = direct_sum(table, "b_row", j, Fraction(1, 2), 400)
        assert contains_with_slack(sv.value, oracle, Fraction(1, 2**380))
        assert sv.terms_used >= 1


def test_eval_h_matches_direct_summation():
    seq = mixed()
    table = build_table(seq, 400)
    for j in (1, 2, 3):
        sv = eval_h(j, Fraction(1, 3), seq, 160)
        oracle = direct_sum(table, "c_row", j, Fraction(1, 3), 400)
        assert contains_with_slack(sv.value, oracle, Fraction(1, 3**350))


def test_complex_argument_componentwise():
    # z = (1+i)/4, exact Gaussian-rational oracle per component
    seq = mixed()
    z = BallComplex.exact(Fraction(1, 4), Fraction(1, 4), 160)
    sv = eval_f(1, z, seq, 160)
    table = build_table(seq, 260)
    row = table.b_row(1)
    re, im = Fraction(0), Fraction(0)
    pr, pi = Fraction(1), Fraction(0)
    for n in range(1, 261):
        pr, pi = pr * Fraction(1, 4) - pi * Fraction(1, 4), pr * Fraction(1, 4) + pi * Fraction(1, 4)
        cn = int(row[n])
        if cn:
            re += cn * pr
            im += cn * pi
    slack = Fraction(1, 2**300)
    assert contains_with_slack(sv.value.real, re, slack)
    assert contains_with_slack(sv.value.imag, im, slack)


def test_domain_and_config_errors():
    seq = psq()
    with pytest.raises(DomainError):
        eval_f(1, 1, seq, 64)
    with pytest.raises(DomainError):
        eval_f(1, Fraction(3, 2), seq, 64)
    with pytest.raises(DomainError):
        eval_lambert(seq, Fraction(5, 4), -1, False, 64)
    with pytest.raises(ConfigError):
        eval_f(5, Fraction(1, 2), seq, 64)
    with pytest.raises(ConfigError):
        eval_lambert(seq, Fraction(1, 2), 0, False, 64)
    with pytest.raises(ConfigError):
        eval_reciprocal_lucas(seq, LucasPair(AlgebraicNumber(PHI_POLY), -1), "W", 64)


def test_tail_bound_inside_radius():
    seq = psq()
    for sv in (
        eval_f(1, Fraction(1, 2), seq, 128),
        eval_h(3, Fraction(2, 5), seq, 128),
        eval_lambert(seq, Fraction(1, 3), -1, True, 128),
    ):
        assert sv.tail_bound >= 0
        assert rad_frac(sv.value) >= mpfr_frac(sv.tail_bound)


def test_lambert_derived_value_half():
    # sum of 1/(2^n - 1) over 9, 25, 49, ... ; first three terms give
    # 1/511 + 1/33554431 + 1/562949953421311 = 0.00195697696...
    seq = psq()
    sv = eval_lambert(seq, Fraction(1, 2), -1, False, 256)
    partial = sum(Fraction(1, 2 ** seq.term(l) - 1) for l in range(1, sv.terms_used + 1))
    assert contains_with_slack(sv.value, partial, 0)
    assert abs(float(sv.value.mid) - 0.0019569769647516666) < 1e-15


def test_lambert_exhausts_explicit_list_exactly():
    seq = CoprimeSequence(Explicit((9, 25, 49)))
    sv = eval_lambert(seq, Fraction(1, 2), -1, False, 256)
    assert sv.terms_used == 3
    assert sv.tail_bound == 0
    exact = Fraction(1, 511) + Fraction(1, 2**25 - 1) + Fraction(1, 2**49 - 1)
    assert contains_with_slack(sv.value, exact, 0)
    assert rad_frac(sv.value) < Fraction(1, 2**200)


def test_lambert_pairings_match_f_combinations():
    for seq in (psq(), mixed()):
        fs = {j: eval_f(j, Fraction(1, 2), seq, 224).value for j in (1, 2, 3, 4)}
        cases = [
            ((-1, False), fs[1] + fs[2] + fs[3] + fs[4]),
            ((1, False), fs[1] - fs[2] + fs[3] - fs[4]),
            ((-1, True), fs[1] + fs[3]),
            ((1, True), fs[1] - fs[3]),
        ]
        for (sign, squared), combo in cases:
            lam = eval_lambert(seq, Fraction(1, 2), sign, squared, 224)
            assert lam.value.overlaps(combo), (sign, squared)


def test_linear_combinations_at_integer_points():
    seq = psq()
    for t in (2, 3, -2):
        z = Fraction(1, t)
        fs = {j: eval_f(j, z, seq, 256).value for j in (1, 2, 3, 4)}
        minus = eval_lambert(seq, z, -1, False, 256)
        assert minus.value.overlaps(fs[1] + fs[2] + fs[3] + fs[4])
        plus = eval_lambert(seq, z, 1, False, 256)
        assert plus.value.overlaps(fs[1] + fs[3] - (fs[2] + fs[4]))
        sq = eval_lambert(seq, z, -1, True, 256)
        assert sq.value.overlaps(fs[1] + fs[3])
        # independent rational oracle for the unsquared minus branch
        oracle = sum(
            Fraction(1, t ** seq.term(l) - 1) for l in range(1, minus.terms_used + 1)
        )
        assert contains_with_slack(minus.value, oracle, 0)


def test_truncation_nesting():
    phi = AlgebraicNumber(PHI_POLY, prec=192)
    zg = 1 / phi.alpha_real
    combos = [
        (Fraction(1, 2), psq()),
        (Fraction(1, 3), mixed()),
        (zg, generate(SuperPrime(), 8)),
    ]
    for z, seq in combos:
        for j in (1, 3):
            v1 = eval_f(j, z, seq, 192)
            v2 = eval_f(j, z, seq, 192, min_terms=2 * v1.terms_used)
            assert v2.terms_used >= 2 * v1.terms_used
            assert v1.value.overlaps(v2.value)


def test_positive_midpoints_on_unit_interval():
    seq = psq()
    assert eval_f(1, Fraction(1, 3), seq, 128).value.mid > 0
    assert eval_f(4, Fraction(1, 2), seq, 128).value.mid > 0
    assert eval_h(1, Fraction(1, 2), seq, 128).value.mid > 0


def test_lucas_fast_path_fibonacci():
    pair = LucasPair(AlgebraicNumber(PHI_POLY), -1)
    assert pair.is_fast and pair.P == 1 and pair.Q == -1
    assert pair.U(0) == 0 and pair.V(0) == 2
    assert pair.U(9) == 34 and pair.U(25) == 75025 and pair.U(49) == 7778742049
    assert pair.V(9) == 76
    for n in rng.sample(range(60), 8):
        f, l = fib_lucas(n)
        assert pair.U(n) == f and pair.V(n) == l


def test_lucas_fast_path_plus_sign():
    # x^2 - 3x + 1: root phi^2, beta = +1/alpha is the conjugate
    pair = LucasPair(AlgebraicNumber((1, -3, 1)), 1)
    assert pair.is_fast and pair.P == 3 and pair.Q == 1
    assert pair.U(3) == 8 and pair.V(3) == 18
    for n in rng.sample(range(40), 6):
        u, v = lucas_pair_terms(3, 1, n)
        assert pair.U(n) == u and pair.V(n) == v


def test_lucas_general_path_quadratic():
    # beta_sign +1 with c0 = -1 forces the ball path; U_2 = alpha + beta
    # = sqrt(5), U_3 = 4, V_3 = 2 sqrt(5) exactly
    pair = LucasPair(AlgebraicNumber(PHI_POLY, prec=192), 1)
    assert not pair.is_fast
    lo, hi = sqrt_bounds(5)
    assert intersects(pair.U(2), lo, hi)
    assert pair.U(3).contains(4)
    assert intersects(pair.V(3), 2 * lo, 2 * hi)


def test_lucas_general_path_degree_one_and_three():
    two = LucasPair(AlgebraicNumber((-2, 1), prec=128), -1)
    assert not two.is_fast
    assert two.U(2).contains(Fraction(3, 2))
    assert two.V(2).contains(Fraction(17, 4))
    plastic = LucasPair(AlgebraicNumber((-1, -1, 0, 1), prec=160), -1)
    a, bta = plastic._ab()
    for n in (2, 5):
        lhs = plastic.U(n) * (a - bta)
        rhs = a.pow_int(n) - bta.pow_int(n)
        assert lhs.overlaps(rhs)
        assert plastic.V(n).overlaps(a.pow_int(n) + bta.pow_int(n))


def test_lucas_pair_rejects():
    with pytest.raises(DomainError):
        LucasPair(AlgebraicNumber((2, 1, 1)), -1)  # complex roots
    with pytest.raises(ConfigError):
        LucasPair(AlgebraicNumber(PHI_POLY), 0)
    with pytest.raises(ConfigError):
        LucasPair("phi", -1)


def test_reciprocal_lucas_fibonacci_values():
    seq = psq()
    pair = LucasPair(AlgebraicNumber(PHI_POLY, prec=256), -1)
    su = eval_reciprocal_lucas(seq, pair, "U", 256)
    partial = Fraction(0)
    for l in range(1, su.terms_used + 1):
        f, _ = fib_lucas(seq.term(l))
        partial += Fraction(1, f)
    assert contains_with_slack(su.value, partial, 0)
    lead = 1 / 34 + 1 / 75025 + 1 / 7778742049
    assert abs(float(su.value.mid) - lead) < 1e-12
    sv = eval_reciprocal_lucas(seq, pair, "V", 256)
    _, l9 = fib_lucas(9)
    assert l9 == 76
    assert abs(float(sv.value.mid) - (1 / 76 + 1 / 167761)) < 1e-9
    assert rad_frac(su.value) < Fraction(1, 2**200)


def test_reciprocal_identities_minus_branch():
    # beta = -1/alpha: (alpha-beta)^-1 sum 1/U = f1 - f3,
    #                  sum 1/V = f1 + f3 at z = 1/alpha
    seq = psq()
    phi = AlgebraicNumber(PHI_POLY, prec=256)
    pair = LucasPair(phi, -1)
    a = phi.alpha_real
    z = 1 / a
    f1 = eval_f(1, z, seq, 256).value
    f3 = eval_f(3, z, seq, 256).value
    su = eval_reciprocal_lucas(seq, pair, "U", 256)
    sv = eval_reciprocal_lucas(seq, pair, "V", 256)
    lhs_u = su.value / (a - (-1 / a))
    assert lhs_u.overlaps(f1 - f3)
    assert sv.value.overlaps(f1 + f3)


def test_reciprocal_identities_plus_branch():
    # beta = +1/alpha swaps the two right-hand sides
    seq = psq()
    phi = AlgebraicNumber(PHI_POLY, prec=256)
    pair = LucasPair(phi, 1)
    assert not pair.is_fast
    a = phi.alpha_real
    z = 1 / a
    f1 = eval_f(1, z, seq, 256).value
    f3 = eval_f(3, z, seq, 256).value
    su = eval_reciprocal_lucas(seq, pair, "U", 256)
    sv = eval_reciprocal_lucas(seq, pair, "V", 256)
    lhs_u = su.value / (a - 1 / a)
    assert lhs_u.overlaps(f1 + f3)
    assert sv.value.overlaps(f1 - f3)


def test_reciprocal_min_terms_nesting():
    seq = psq()
    pair = LucasPair(AlgebraicNumber(PHI_POLY, prec=224), -1)
    v1 = eval_reciprocal_lucas(seq, pair, "U", 224)
    v2 = eval_reciprocal_lucas(seq, pair, "U", 224, min_terms=v1.terms_used + 3)
    assert v2.terms_used >= v1.terms_used + 3
    assert v1.value.overlaps(v2.value)
    assert rad_frac(v1.value) >= mpfr_frac(v1.tail_bound)
