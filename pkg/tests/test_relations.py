"""Lattice reduction and relation-probe tests.

The reduction invariants (size-reduction, Lovasz condition) are checked
against a from-scratch Fraction Gram-Schmidt recomputation, so bugs in
the in-place update formulas cannot hide.  Shortest-vector quality is
checked against brute-force enumeration on small lattices, determinants
against sympy, and the probe oracles against exact quadratic arithmetic.
"""

import random
from fractions import Fraction

import numpy as np
import pytest
import sympy

from lambertseq.errors import ConfigError, DomainError, PrecisionError
from lambertseq.numerics import BallReal
from lambertseq.numerics.algebraic import AlgebraicNumber
from lambertseq.relations import (
    Candidate,
    IntegerLattice,
    NoRelationFound,
    find_relation,
    lll_reduce,
)

rng = random.Random(27182)


def _gs_data(rows):
    """Independent Gram-Schmidt: mu matrix and squared GS lengths."""
    n = len(rows)
    mu = [[Fraction(0)] * n for _ in range(n)]
    gs, bsq = [], []
    for i in range(n):
        v = [Fraction(x) for x in rows[i]]
        for j in range(i):
            m = sum(a * b for a, b in zip(rows[i], gs[j])) / bsq[j]
            mu[i][j] = m
            v = [a - m * b for a, b in zip(v, gs[j])]
        gs.append(v)
        bsq.append(sum(a * a for a in v))
    return mu, bsq


def _assert_reduced(rows, delta):
    mu, bsq = _gs_data(rows)
    half = Fraction(1, 2)
    for i in range(len(rows)):
        for j in range(i):
            assert abs(mu[i][j]) <= half
    for k in range(1, len(rows)):
        assert bsq[k] >= (Fraction(delta) - mu[k][k - 1] ** 2) * bsq[k - 1]


def _matmul(u, b):
    return tuple(
        tuple(sum(u[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0])))
        for i in range(len(u))
    )


def _random_basis(n, lo=-100, hi=100):
    while True:
        rows = tuple(
            tuple(rng.randrange(lo, hi + 1) for _ in range(n)) for _ in range(n)
        )
        if sympy.Matrix(rows).det() != 0:
            return rows


def _enum_min_sq(rows, box):
    """Min squared length over nonzero combinations with |c_i| <= box."""
    n = len(rows)
    axes = [np.arange(-box, box + 1, dtype=np.int64)] * n
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    grid = grid[np.any(grid != 0, axis=1)]
    pts = grid @ np.array(rows, dtype=np.int64)
    return int((pts**2).sum(axis=1).min())


def test_identity_basis_fixed_point():
    eye = tuple(tuple(int(i == j) for j in range(4)) for i in range(4))
    res = lll_reduce(IntegerLattice(eye))
    assert res.lattice.basis == eye
    assert res.transform == eye
    assert res.swaps == 0


def test_small_basis_hermite_bound():
    res = lll_reduce(IntegerLattice(((1, 0), (4, 1))))
    rows = res.lattice.basis
    # covolume 1, so the first vector must land on a shortest-scale vector
    assert sum(c * c for c in rows[0]) <= 2
    assert sympy.Matrix(rows).det() in (1, -1)
    assert rows == ((1, 0), (0, 1))
    assert _matmul(res.transform, ((1, 0), (4, 1))) == rows


def test_reduction_invariants_random():
    for _ in range(40):
        n = rng.choice((2, 3, 4, 5))
        basis = _random_basis(n)
        res = lll_reduce(IntegerLattice(basis))
        rows = res.lattice.basis
        _assert_reduced(rows, Fraction(3, 4))
        assert _matmul(res.transform, basis) == rows
        assert sympy.Matrix(res.transform).det() in (1, -1)
        assert abs(sympy.Matrix(rows).det()) == abs(sympy.Matrix(basis).det())


def test_reduction_idempotence():
    for _ in range(20):
        basis = _random_basis(rng.choice((2, 3, 4)))
        once = lll_reduce(IntegerLattice(basis))
        twice = lll_reduce(once.lattice)
        assert twice.lattice.basis == once.lattice.basis
        assert twice.swaps == 0


def test_delta_sweep():
    basis = _random_basis(4)
    for delta in (Fraction(1, 3), Fraction(3, 4), Fraction(99, 100)):
        res = lll_reduce(IntegerLattice(basis, delta))
        _assert_reduced(res.lattice.basis, delta)


def test_rank_deficiency_raises():
    with pytest.raises(DomainError):
        lll_reduce(IntegerLattice(((1, 2), (2, 4))))
    with pytest.raises(DomainError):
        lll_reduce(IntegerLattice(((3, 5), (3, 5))))
    with pytest.raises(DomainError):
        lll_reduce(IntegerLattice(((1, 2), (3, 4), (5, 6))))
    with pytest.raises(DomainError):
        lll_reduce(IntegerLattice(((0, 0), (1, 1))))


def test_lattice_validation():
    with pytest.raises(ConfigError):
        IntegerLattice(())
    with pytest.raises(ConfigError):
        IntegerLattice(((),))
    with pytest.raises(ConfigError):
        IntegerLattice(((1, 2), (3,)))
    with pytest.raises(ConfigError):
        IntegerLattice(((1.5, 2), (3, 4)))
    for bad in (Fraction(1, 4), Fraction(1), 0, 2):
        with pytest.raises(ConfigError):
            IntegerLattice(((1, 0), (0, 1)), bad)
    lat = IntegerLattice(((1, 0), (0, 1)), 0.75)
    assert lat.delta == Fraction(3, 4)
    assert lat.nrows == lat.ncols == 2


def test_shortest_vector_vs_enumeration():
    # sandwich: enumeration covers the shortest reduced row, and the
    # first reduced row is within the LLL factor 2^(n-1) in square
    for n, trials, box0 in ((2, 20, 60), (3, 10, 25)):
        for _ in range(trials):
            basis = _random_basis(n, -50, 50)
            res = lll_reduce(IntegerLattice(basis))
            rows = res.lattice.basis
            sqs = [sum(c * c for c in r) for r in rows]
            i_min = sqs.index(min(sqs))
            box = max(box0, max(abs(c) for c in res.transform[i_min]))
            enum_min = _enum_min_sq(basis, box)
            assert enum_min <= sqs[i_min]
            assert sqs[0] <= 2 ** (n - 1) * enum_min


def _golden(prec):
    return AlgebraicNumber((-1, -1, 1), prec=prec).alpha_real


def test_probe_golden_ratio_relation():
    phi = _golden(256)
    one = BallReal.exact(1, prec=256)

    def provider(bits):
        p = _golden(bits)
        return [BallReal.exact(1, prec=bits), p, p * p]

    probe = find_relation([one, phi, phi * phi], 128, 100, values_provider=provider)
    assert probe.found
    cand = probe.result
    assert cand.coefficients == (1, 1, -1)
    # exact check in Q(phi): c0 + c1 phi + c2 (phi + 1) = 0 iff both
    # rational coordinates vanish
    c0, c1, c2 = cand.coefficients
    assert c0 + c2 == 0 and c1 + c2 == 0
    assert cand.l1 == 3
    assert cand.residual.contains_zero()
    assert cand.verified_bits == 512
    blob = probe.to_json()
    assert blob["result"]["kind"] == "candidate"
    assert blob["result"]["coefficients"] == [1, 1, -1]

    # reordered values flip the relation; leading coefficient stays positive
    probe2 = find_relation([phi * phi, phi, one], 128, 100)
    assert probe2.found
    assert probe2.result.coefficients == (1, -1, -1)


def test_probe_exact_rational():
    vals = [BallReal.exact(1, prec=128), BallReal.exact(Fraction(1, 3), prec=128)]
    probe = find_relation(vals, 64, 10)
    assert probe.found
    assert probe.result.coefficients == (1, -3)
    assert probe.result.residual.contains_zero()


def test_probe_radius_guard():
    ok = BallReal.from_midrad(Fraction(1, 3), Fraction(1, 2**137), prec=256)
    wide = BallReal.from_midrad(Fraction(1, 3), Fraction(1, 2**100), prec=256)
    one = BallReal.exact(1, prec=256)
    find_relation([one, ok], 128, 10)
    with pytest.raises(PrecisionError):
        find_relation([one, wide], 128, 10)


def test_probe_validation():
    one = BallReal.exact(1, prec=128)
    third = BallReal.exact(Fraction(1, 3), prec=128)
    with pytest.raises(ConfigError):
        find_relation([one], 64, 10)
    with pytest.raises(ConfigError):
        find_relation([one, third], 8, 10)
    with pytest.raises(ConfigError):
        find_relation([one, third], 64, 0)
    with pytest.raises(ConfigError):
        find_relation([one, 0.5], 64, 10)


def test_probe_no_relation_certificate():
    one = BallReal.exact(1, prec=320)
    s2 = AlgebraicNumber((-2, 1), prec=320).alpha_real.sqrt()
    s3 = AlgebraicNumber((-3, 1), prec=320).alpha_real.sqrt()
    vals = [one, s2, s3]
    probe = find_relation(vals, 192, 1000)
    assert not probe.found
    cert = probe.result
    assert isinstance(cert, NoRelationFound)
    assert cert.min_l1 > 1000
    assert cert.exceeds_requested_bound
    assert cert.caveat == "evidence, not proof"
    assert cert.shortest_sq > 0
    blob = probe.to_json()
    assert blob["result"]["kind"] == "no-relation"
    assert blob["result"]["caveat"] == "evidence, not proof"

    # certificate consistency: brute-force over l1 <= 12 finds nothing
    for a in range(-6, 7):
        for b in range(-6, 7):
            for c in range(-6, 7):
                if (a, b, c) == (0, 0, 0):
                    continue
                ball = one * a + s2 * b + s3 * c
                assert not ball.contains_zero()


def test_reverify_rejects_near_relation():
    # second value is 1/2 + 2^-140 enclosed loosely enough that the
    # native residual of (1, -2) straddles zero; the doubled-precision
    # recheck must refute it
    mid = Fraction(1, 2) + Fraction(1, 2**140)
    loose = BallReal.from_midrad(mid, Fraction(1, 2**120), prec=160)
    one = BallReal.exact(1, prec=160)
    assert (one - loose * 2).contains_zero()

    def provider(bits):
        return [
            BallReal.exact(1, prec=bits),
            BallReal.from_midrad(mid, Fraction(1, 2**300), prec=bits),
        ]

    probe = find_relation([one, loose], 100, 50, values_provider=provider)
    assert not probe.found
    assert isinstance(probe.result, NoRelationFound)


def test_values_provider_mismatch():
    one = BallReal.exact(1, prec=128)
    third = BallReal.exact(Fraction(1, 3), prec=128)

    with pytest.raises(ConfigError):
        find_relation(
            [one, third], 64, 10, values_provider=lambda bits: [one]
        )
    with pytest.raises(ConfigError):
        find_relation(
            [one, third],
            64,
            10,
            values_provider=lambda bits: [one, BallReal.exact(2, prec=bits)],
        )


def test_probe_desk_scale_shape():
    # the full-width shape used downstream: six values, 512 scale bits
    prec = 1100
    vals = []
    for i in range(6):
        mid = i + Fraction(rng.getrandbits(900), 2**900)
        vals.append(BallReal.from_midrad(mid, Fraction(1, 2**560), prec=prec))
    probe = find_relation(vals, 512, 10**6)
    assert not probe.found
    assert probe.result.min_l1 > 10**6
    assert probe.result.exceeds_requested_bound
