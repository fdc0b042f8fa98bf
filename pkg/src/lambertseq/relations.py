"""Lattice reduction and integer-relation probing.

LLL reduction is done in exact rational arithmetic (the Gram-Schmidt
data lives in Fraction), with the unimodular transform recorded so the
caller can check that the reduced rows generate the same lattice.

find_relation embeds n real constants into the (n+1)-column lattice
with rows [e_i | round(2^s v_i)] and scans the reduced basis for a row
whose first n coordinates give a small integer combination of the
inputs.  A candidate is only reported after its residual has been
re-verified in ball arithmetic at doubled precision; when nothing
passes, the probe returns a certified lower bound on the l1 norm of
any integer relation compatible with the input enclosures.  That bound
is evidence, not proof: it rules out small relations among reals that
are only known to within the supplied balls.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .errors import ConfigError, DomainError, PrecisionError
from .numerics import BallReal

DEFAULT_DELTA = Fraction(3, 4)
MIN_SCALE_BITS = 16
CAVEAT = "evidence, not proof"


def _round_nearest(x: Fraction) -> int:
    """Nearest integer, ties toward +infinity (floor(x + 1/2))."""
    return (2 * x.numerator + x.denominator) // (2 * x.denominator)


def _sq(row) -> int:
    return sum(c * c for c in row)


@dataclass(frozen=True)
class IntegerLattice:
    """Row basis of an integer lattice plus the reduction parameter.

    Rows must be integer vectors of a common length; full row rank is
    required by lll_reduce (not checked here, the Gram-Schmidt pass
    detects dependence).  delta must lie strictly between 1/4 and 1.
    """

    basis: tuple
    delta: Fraction = DEFAULT_DELTA

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.basis)
        if not rows:
            raise ConfigError("empty basis")
        width = len(rows[0])
        if width == 0:
            raise ConfigError("zero-width basis rows")
        for row in rows:
            if len(row) != width:
                raise ConfigError("ragged basis rows")
            for e in row:
                if not isinstance(e, int):
                    raise ConfigError(
                        f"integer entries required, got {type(e).__name__}"
                    )
        delta = Fraction(self.delta)
        if not Fraction(1, 4) < delta < 1:
            raise ConfigError(f"delta must be in (1/4, 1), got {delta}")
        object.__setattr__(self, "basis", rows)
        object.__setattr__(self, "delta", delta)

    @property
    def nrows(self) -> int:
        return len(self.basis)

    @property
    def ncols(self) -> int:
        return len(self.basis[0])


@dataclass(frozen=True)
class ReductionResult:
    """Reduced lattice plus the unimodular transform.

    transform @ original_basis == lattice.basis, row by row, exactly.
    """

    lattice: IntegerLattice
    transform: tuple
    swaps: int


def _initial_gram_schmidt(basis):
    """Full mu matrix and squared Gram-Schmidt lengths, exact."""
    n = len(basis)
    mu = [[Fraction(0)] * n for _ in range(n)]
    bsq = [Fraction(0)] * n
    gs = []
    for i in range(n):
        v = [Fraction(x) for x in basis[i]]
        for j in range(i):
            dot = sum((a * b for a, b in zip(basis[i], gs[j])), Fraction(0))
            mu[i][j] = dot / bsq[j]
            v = [a - mu[i][j] * b for a, b in zip(v, gs[j])]
        sq = sum((a * a for a in v), Fraction(0))
        if sq == 0:
            raise DomainError(f"rank deficiency: row {i} depends on earlier rows")
        gs.append(v)
        bsq[i] = sq
    return mu, bsq


def lll_reduce(lattice: IntegerLattice) -> ReductionResult:
    """LLL-reduce the row basis; exact arithmetic throughout.

    The output is size-reduced (|mu_ij| <= 1/2) and satisfies the
    Lovasz condition with the lattice's delta for every consecutive
    pair of Gram-Schmidt vectors.  Raises DomainError when the rows
    are linearly dependent.
    """
    basis = [list(row) for row in lattice.basis]
    n = len(basis)
    if n > len(basis[0]):
        raise DomainError("rank deficiency: more rows than columns")
    delta = lattice.delta
    trans = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    mu, bsq = _initial_gram_schmidt(basis)

    def red(kk, ll):
        r = mu[kk][ll]
        if 2 * abs(r) > 1:
            q = _round_nearest(r)
            basis[kk] = [a - q * b for a, b in zip(basis[kk], basis[ll])]
            trans[kk] = [a - q * b for a, b in zip(trans[kk], trans[ll])]
            mu[kk][ll] -= q
            for j in range(ll):
                mu[kk][j] -= q * mu[ll][j]

    swaps = 0
    k = 1
    while k < n:
        red(k, k - 1)
        if bsq[k] >= (delta - mu[k][k - 1] ** 2) * bsq[k - 1]:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1
        else:
            # swap rows k-1, k and patch the Gram-Schmidt data in place
            mu_v = mu[k][k - 1]
            bnew = bsq[k] + mu_v * mu_v * bsq[k - 1]
            mu[k][k - 1] = mu_v * bsq[k - 1] / bnew
            bsq[k] = bsq[k - 1] * bsq[k] / bnew
            bsq[k - 1] = bnew
            basis[k - 1], basis[k] = basis[k], basis[k - 1]
            trans[k - 1], trans[k] = trans[k], trans[k - 1]
            for j in range(k - 1):
                mu[k - 1][j], mu[k][j] = mu[k][j], mu[k - 1][j]
            for i in range(k + 1, n):
                t = mu[i][k]
                mu[i][k] = mu[i][k - 1] - mu_v * t
                mu[i][k - 1] = t + mu[k][k - 1] * mu[i][k]
            swaps += 1
            k = max(k - 1, 1)

    reduced = IntegerLattice(tuple(tuple(row) for row in basis), delta)
    return ReductionResult(
        lattice=reduced,
        transform=tuple(tuple(row) for row in trans),
        swaps=swaps,
    )


@dataclass(frozen=True)
class Candidate:
    """A small integer combination whose residual ball contains zero."""

    coefficients: tuple
    residual: BallReal
    l1: int
    verified_bits: int

    def to_json(self) -> dict:
        return {
            "kind": "candidate",
            "coefficients": list(self.coefficients),
            "residual": self.residual.to_json(),
            "l1": self.l1,
            "verified_bits": self.verified_bits,
        }


@dataclass(frozen=True)
class NoRelationFound:
    """Certified absence of small relations, conditional on the balls.

    min_l1 lower-bounds the l1 norm of the coefficient vector of any
    integer relation among reals lying inside the input enclosures;
    it combines the shortest reduced row with the LLL approximation
    factor 1/(delta - 1/4) per dimension step.
    """

    min_l1: Fraction
    shortest_sq: int
    delta: Fraction
    rounding_slack: Fraction
    exceeds_requested_bound: bool
    caveat: str = CAVEAT

    def to_json(self) -> dict:
        return {
            "kind": "no-relation",
            "min_l1": str(self.min_l1),
            "shortest_sq": str(self.shortest_sq),
            "delta": str(self.delta),
            "rounding_slack": str(self.rounding_slack),
            "exceeds_requested_bound": self.exceeds_requested_bound,
            "caveat": self.caveat,
        }


@dataclass(frozen=True)
class RelationProbe:
    """Inputs and outcome of one relation search."""

    values: tuple
    scale_bits: int
    max_coeff: int
    delta: Fraction
    result: object

    @property
    def found(self) -> bool:
        return isinstance(self.result, Candidate)

    def to_json(self) -> dict:
        return {
            "n": len(self.values),
            "values": [v.to_json() for v in self.values],
            "scale_bits": self.scale_bits,
            "max_coeff": self.max_coeff,
            "delta": str(self.delta),
            "result": self.result.to_json(),
        }


def _ball_stats(values, scale_bits):
    """Exact midpoints and the worst-case radius, with the size guard."""
    cap = Fraction(1, 2 ** (scale_bits + 8))
    mids = []
    max_rad = Fraction(0)
    for i, v in enumerate(values):
        lo, hi = v.to_fraction_bounds()
        rad = (hi - lo) / 2
        if rad >= cap:
            raise PrecisionError(
                f"value {i} radius is not below 2^-{scale_bits + 8}; "
                "recompute the inputs at higher precision"
            )
        mids.append((lo + hi) / 2)
        max_rad = max(max_rad, rad)
    return mids, max_rad


def _lift(v: BallReal, bits: int) -> BallReal:
    lo, hi = v.to_fraction_bounds()
    return BallReal.from_midrad((lo + hi) / 2, (hi - lo) / 2, prec=bits)


def _residual(coeffs, values, bits: int) -> BallReal:
    acc = BallReal.exact(0, prec=bits)
    for c, v in zip(coeffs, values):
        if c:
            acc = acc + v * c
    return acc


def _recheck_values(values, values_provider, bits):
    if values_provider is None:
        return tuple(_lift(v, bits) for v in values)
    out = tuple(values_provider(bits))
    if len(out) != len(values):
        raise ConfigError("values_provider returned the wrong number of values")
    for fresh, orig in zip(out, values):
        if not isinstance(fresh, BallReal):
            raise ConfigError("values_provider must return BallReal values")
        if not fresh.overlaps(orig):
            raise ConfigError("values_provider disagrees with the supplied balls")
    return out


def find_relation(
    values,
    scale_bits: int,
    max_coeff: int,
    *,
    delta=DEFAULT_DELTA,
    values_provider=None,
) -> RelationProbe:
    """Probe for an integer relation among ball-enclosed constants.

    values_provider, when given, is called with a bit count and must
    return fresh enclosures of the same constants at that precision;
    it is used to re-verify a candidate before acceptance.  Without a
    provider the residual is re-summed from the original balls at
    doubled working precision, which still rejects combinations whose
    residual provably misses zero.
    """
    vals = tuple(values)
    if len(vals) < 2:
        raise ConfigError("need at least two values")
    for v in vals:
        if not isinstance(v, BallReal):
            raise ConfigError(f"values must be BallReal, got {type(v).__name__}")
    if scale_bits < MIN_SCALE_BITS:
        raise ConfigError(f"scale_bits must be >= {MIN_SCALE_BITS}")
    if max_coeff < 1:
        raise ConfigError("max_coeff must be >= 1")
    n = len(vals)

    mids, max_rad = _ball_stats(vals, scale_bits)
    scale = 1 << scale_bits
    rows = tuple(
        tuple(1 if j == i else 0 for j in range(n)) + (_round_nearest(m * scale),)
        for i, m in enumerate(mids)
    )
    reduction = lll_reduce(IntegerLattice(rows, delta))
    reduced_rows = sorted(reduction.lattice.basis, key=_sq)

    prec0 = max(v.prec for v in vals)
    check_bits = 2 * prec0
    checked = None
    for row in reduced_rows:
        coeffs = row[:n]
        l1 = sum(abs(c) for c in coeffs)
        if l1 == 0 or l1 > max_coeff:
            continue
        lead = next(c for c in coeffs if c)
        if lead < 0:
            coeffs = tuple(-c for c in coeffs)
        if not _residual(coeffs, vals, prec0).contains_zero():
            continue
        if checked is None:
            checked = _recheck_values(vals, values_provider, check_bits)
        recheck = _residual(coeffs, checked, check_bits)
        if not recheck.contains_zero():
            continue
        cand = Candidate(
            coefficients=coeffs,
            residual=recheck,
            l1=l1,
            verified_bits=check_bits,
        )
        return RelationProbe(vals, scale_bits, max_coeff, Fraction(delta), cand)

    # lattice-gap certificate: a relation c (sum c_i x_i = 0 with each
    # x_i inside its ball) embeds to the row vector (c, sum c_i M_i)
    # whose last coordinate is at most l1(c) * rho in absolute value,
    # rho = 1/2 + 2^s * max_rad.  Hence its squared length is at most
    # l1(c)^2 (1 + rho^2), while every nonzero lattice vector has
    # squared length >= shortest_sq / alpha^(n-1), alpha = 1/(delta-1/4).
    shortest_sq = min(_sq(r) for r in reduction.lattice.basis)
    rho = Fraction(1, 2) + scale * max_rad
    alpha = 1 / (Fraction(delta) - Fraction(1, 4))
    bound_sq = Fraction(shortest_sq) / (alpha ** (n - 1) * (1 + rho * rho))
    min_l1 = Fraction(isqrt(bound_sq.numerator * bound_sq.denominator),
                      bound_sq.denominator)
    nores = NoRelationFound(
        min_l1=min_l1,
        shortest_sq=shortest_sq,
        delta=Fraction(delta),
        rounding_slack=rho,
        exceeds_requested_bound=min_l1 > max_coeff,
    )
    return RelationProbe(vals, scale_bits, max_coeff, Fraction(delta), nores)
