"""Certified evaluation of the coefficient power series, Lambert-type
sums over a coprime odd sequence, and reciprocal sums of Lucas
sequences.

Every evaluator returns a SeriesValue: a ball whose radius already
includes a closed-form truncation tail, plus the truncation point and
the tail bound itself for auditing.  Tail bounds are computed with
64-bit directed rounding, so they hold regardless of how many terms
were summed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import gmpy2

from .coefficients import build_table
from .errors import ConfigError, DomainError, PrecisionError, SupplyError
from .numerics import AlgebraicNumber, BallComplex, BallReal
from .numerics.balls import DEFAULT_PREC
from .sequences import CoprimeSequence

_RU = gmpy2.context(precision=64, round=gmpy2.RoundUp)
_RD = gmpy2.context(precision=64, round=gmpy2.RoundDown)
_MZ = gmpy2.mpfr(0)

# hard caps so a |z| ball hugging 1 fails loudly instead of looping
_MAX_POWER_TERMS = 10**8
_MAX_SEQ_TERMS = 10**5


@dataclass(frozen=True)
class SeriesValue:
    """A certified partial sum: `value` is a ball containing the full
    series, `tail_bound` is the truncation bound already folded into
    its radius, `terms_used` counts the summed terms."""

    value: object
    terms_used: int
    tail_bound: object

    def __repr__(self):
        return (
            f"SeriesValue({self.value!r}, terms_used={self.terms_used}, "
            f"tail_bound={self.tail_bound!r})"
        )


def _pow_up(x, n: int):
    """Upper bound of x**n for x >= 0, RoundUp square-and-multiply."""
    acc = gmpy2.mpfr(1)
    base = _RU.add(x, _MZ)
    while n:
        if n & 1:
            acc = _RU.mul(acc, base)
        base = _RU.mul(base, base)
        n >>= 1
    return acc


def _normalize(z, prec):
    """(ball at prec, is_complex).  Exact-zero imaginary parts demote
    a BallComplex input to the real pipeline."""
    if isinstance(z, BallComplex):
        if z.is_real:
            z = z.real
        else:
            re = BallReal.from_midrad(z.real.mid, z.real.rad, prec)
            im = BallReal.from_midrad(z.imag.mid, z.imag.rad, prec)
            return BallComplex(re, im), True
    if isinstance(z, BallReal):
        return BallReal.from_midrad(z.mid, z.rad, prec), False
    return BallReal.exact(z, prec), False


def _abs_upper64(zb):
    """64-bit RoundUp bound on |z|; DomainError unless provably < 1."""
    hi = abs(zb).upper()
    if not hi < 1:
        raise DomainError("series arguments must satisfy |z| < 1 strictly")
    if hi < 0:
        return gmpy2.mpfr(0)
    x = _RU.add(hi, _MZ)
    if not x < 1:
        raise PrecisionError("|z| bound rounds to 1 at working precision")
    return x


def _coeff_tail_up(x, n_terms: int):
    """Upper bound of sum_{n>N} n x^n = x^{N+1}((N+1)-Nx)/(1-x)^2."""
    if x == 0:
        return gmpy2.mpfr(0)
    p = _pow_up(x, n_terms + 1)
    num = _RU.sub(n_terms + 1, _RD.mul(x, n_terms))
    d = _RD.sub(1, x)
    den = _RD.mul(d, d)
    return _RU.div(_RU.mul(p, num), den)


def _pick_terms(x, prec, min_terms):
    """Smallest N with the n x^n tail below 2^-(prec+8)."""
    floor_n = max(1, min_terms or 1)
    if x == 0:
        return floor_n
    target = gmpy2.exp2(-(prec + 8))
    hi = 8
    while _coeff_tail_up(x, hi) >= target:
        hi *= 2
        if hi > _MAX_POWER_TERMS:
            raise PrecisionError("truncation point exceeds the term cap")
    lo = 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _coeff_tail_up(x, mid) < target:
            hi = mid
        else:
            lo = mid + 1
    return max(hi, floor_n)


def _widened(ball, tail, prec, is_complex):
    """Ball with the tail bound added to the radius (componentwise for
    complex values; the box contains the tail disk)."""
    if not tail >= 0:
        raise PrecisionError("tail bound is not a nonnegative number")
    pad = BallReal.from_midrad(0, tail, prec)
    if is_complex:
        return BallComplex(ball.real + pad, ball.imag + pad)
    return ball + pad


def _eval_power_series(row, n_terms, zb, prec, is_complex):
    if is_complex:
        acc = BallComplex.exact(0, 0, prec)
    else:
        acc = BallReal.zero(prec)
    for n in range(n_terms, 0, -1):
        cn = int(row[n])
        acc = acc * zb
        if cn:
            acc = acc + cn
    return acc * zb


def _eval_projected(row_of, j, z, seq, prec, min_terms):
    if j not in (1, 2, 3, 4):
        raise ConfigError(f"series index j must be 1..4, got {j!r}")
    if not isinstance(seq, CoprimeSequence):
        raise ConfigError("seq must be a CoprimeSequence")
    zb, cplx = _normalize(z, prec)
    x = _abs_upper64(zb)
    n_terms = _pick_terms(x, prec, min_terms)
    table = build_table(seq, n_terms)
    row = row_of(table, j)
    tail = _coeff_tail_up(x, n_terms)
    value = _widened(_eval_power_series(row, n_terms, zb, prec, cplx), tail, prec, cplx)
    return SeriesValue(value=value, terms_used=n_terms, tail_bound=tail)


def eval_f(j: int, z, seq: CoprimeSequence, prec: int = DEFAULT_PREC, min_terms=None) -> SeriesValue:
    """f_j(z) = sum b_j(n) z^n for |z| < 1.

    The truncation tail uses b_j(n) <= n, giving the closed form
    |z|^{N+1}((N+1) - N|z|)/(1-|z|)^2 beyond the cutoff N.
    """
    return _eval_projected(lambda t, jj: t.b_row(jj), j, z, seq, prec, min_terms)


def eval_h(j: int, z, seq: CoprimeSequence, prec: int = DEFAULT_PREC, min_terms=None) -> SeriesValue:
    """h_j(z) = sum c_j(n) z^n; same tail since c_j(n) <= n as well."""
    return _eval_projected(lambda t, jj: t.c_row(jj), j, z, seq, prec, min_terms)


def _lambert_tail_up(x, n_start: int):
    """Upper bound of sum over remaining odd terms n >= n_start of
    x^n/(1 - x); consecutive terms differ by at least 2."""
    if x == 0:
        return gmpy2.mpfr(0)
    p = _pow_up(x, n_start)
    d1 = _RD.sub(1, x)
    d2 = _RD.sub(1, _RD.mul(x, x))
    den = _RD.mul(d1, d2)
    return _RU.div(p, den)


def eval_lambert(
    seq: CoprimeSequence,
    z,
    denominator_sign: int,
    squared: bool,
    prec: int = DEFAULT_PREC,
    min_terms=None,
) -> SeriesValue:
    """sum over sequence terms n of z^n / (1 + s z^{mn}) with
    s = denominator_sign and m = 2 when squared else 1.

    denominator_sign is the literal sign inside the denominator, so
    -1 gives 1 - z^{mn} (the sum of 1/(t^n - 1) at z = 1/t).
    """
    if denominator_sign not in (1, -1):
        raise ConfigError("denominator_sign must be +1 or -1")
    if not isinstance(seq, CoprimeSequence):
        raise ConfigError("seq must be a CoprimeSequence")
    zb, cplx = _normalize(z, prec)
    x = _abs_upper64(zb)
    m = 2 if squared else 1
    target = gmpy2.exp2(-(prec + 8))
    floor_terms = max(1, min_terms or 1)
    acc = BallComplex.exact(0, 0, prec) if cplx else BallReal.zero(prec)
    used = 0
    while True:
        used += 1
        if used > _MAX_SEQ_TERMS:
            raise PrecisionError("sequence term cap reached before tail target")
        n = seq.term(used)
        zn = zb.pow_int(n)
        den = zb.pow_int(m * n) * denominator_sign + 1
        acc = acc + zn / den
        try:
            nxt = seq.term(used + 1)
        except SupplyError:
            # explicit list exhausted: the listed terms are the whole
            # sequence, so the sum is complete
            tail = gmpy2.mpfr(0)
            break
        tail = _lambert_tail_up(x, nxt)
        if used >= floor_terms and tail < target:
            break
    value = _widened(acc, tail, prec, cplx)
    return SeriesValue(value=value, terms_used=used, tail_bound=tail)


class LucasPair:
    """Lucas sequences U_n = (a^n - b^n)/(a - b), V_n = a^n + b^n for
    a real algebraic a with |a| > 1 and b = beta_sign / a.

    When the minimal polynomial is x^2 + c1 x + c0 with c0 equal to
    beta_sign, b is the algebraic conjugate of a and both families are
    rational integers obeying W_n = P W_{n-1} - Q W_{n-2} with
    P = -c1, Q = c0; that exact fast path is used automatically.
    """

    def __init__(self, alpha: AlgebraicNumber, beta_sign: int, prec=None):
        if not isinstance(alpha, AlgebraicNumber):
            raise ConfigError("alpha must be an AlgebraicNumber")
        if beta_sign not in (1, -1):
            raise ConfigError("beta_sign must be +1 or -1")
        if not alpha.is_real:
            raise DomainError("Lucas pair needs a certified real alpha")
        if not alpha.abs_alpha().strictly_greater(1):
            raise DomainError("Lucas pair needs |alpha| > 1")
        self.alpha = alpha
        self.beta_sign = beta_sign
        self.prec = prec if prec is not None else alpha.prec
        coeffs = alpha.minimal_poly.coeffs
        self.is_fast = alpha.degree == 2 and coeffs[0] == beta_sign
        if self.is_fast:
            self.P = -coeffs[1]
            self.Q = coeffs[0]
            self._uv = [(0, 2), (1, self.P)]
        else:
            self.P = self.Q = None
            self._uv = None

    def __repr__(self):
        mode = f"fast P={self.P} Q={self.Q}" if self.is_fast else "ball"
        return f"LucasPair(beta_sign={self.beta_sign:+d}, {mode})"

    def _ab(self):
        a = self.alpha.alpha_real
        b = (1 / a) * self.beta_sign
        return a, b

    def _fill(self, n: int):
        while len(self._uv) <= n:
            u1, v1 = self._uv[-1]
            u2, v2 = self._uv[-2]
            self._uv.append((self.P * u1 - self.Q * u2, self.P * v1 - self.Q * v2))

    def U(self, n: int):
        """n-th first-kind term; exact int on the fast path, else a ball."""
        if not isinstance(n, int) or n < 0:
            raise ConfigError("index must be a nonnegative int")
        if self.is_fast:
            self._fill(n)
            return self._uv[n][0]
        a, b = self._ab()
        return (a.pow_int(n) - b.pow_int(n)) / (a - b)

    def V(self, n: int):
        """n-th second-kind term; exact int on the fast path, else a ball."""
        if not isinstance(n, int) or n < 0:
            raise ConfigError("index must be a nonnegative int")
        if self.is_fast:
            self._fill(n)
            return self._uv[n][1]
        a, b = self._ab()
        return a.pow_int(n) + b.pow_int(n)


def eval_reciprocal_lucas(
    seq: CoprimeSequence,
    pair: LucasPair,
    which: str,
    prec: int = DEFAULT_PREC,
    min_terms=None,
) -> SeriesValue:
    """sum over sequence terms n of 1/U_n or 1/V_n.

    Tail: |U_n| >= (|a|^n - |a|^{-n})/|a - b| and |V_n| >= |a|^n - |a|^{-n},
    summed over odd terms with gaps >= 2, all at directed rounding.
    """
    if which not in ("U", "V"):
        raise ConfigError("which must be 'U' or 'V'")
    if not isinstance(seq, CoprimeSequence):
        raise ConfigError("seq must be a CoprimeSequence")
    if not isinstance(pair, LucasPair):
        raise ConfigError("pair must be a LucasPair")
    a_lo = _RD.add(pair.alpha.abs_alpha().lower(), _MZ)
    if not a_lo > 1:
        raise PrecisionError("cannot bound |alpha| away from 1 at 64 bits")
    inv_up = _RU.div(1, a_lo)
    gap = _RD.sub(1, _RD.mul(inv_up, inv_up))
    if not gap > 0:
        raise PrecisionError("cannot bound |alpha|^-2 away from 1")
    if which == "U":
        a, b = pair._ab()
        scale = _RU.add(abs(a - b).upper(), _MZ)
    else:
        scale = gmpy2.mpfr(1)
    den = _RD.mul(gap, gap)
    target = gmpy2.exp2(-(prec + 8))
    floor_terms = max(1, min_terms or 1)
    exact_sum = Fraction(0) if pair.is_fast else None
    acc = BallReal.zero(prec)
    used = 0
    while True:
        used += 1
        if used > _MAX_SEQ_TERMS:
            raise PrecisionError("sequence term cap reached before tail target")
        n = seq.term(used)
        w = pair.U(n) if which == "U" else pair.V(n)
        if pair.is_fast:
            if w == 0:
                raise DomainError(f"{which}_{n} = 0; reciprocal undefined")
            exact_sum += Fraction(1, w)
        else:
            if not w.excludes_zero():
                raise PrecisionError(f"{which}_{n} ball does not exclude zero")
            acc = acc + 1 / w
        try:
            nxt = seq.term(used + 1)
        except SupplyError:
            tail = gmpy2.mpfr(0)
            break
        tail = _RU.div(_RU.mul(scale, _pow_up(inv_up, nxt)), den)
        if used >= floor_terms and tail < target:
            break
    if pair.is_fast:
        acc = BallReal.exact(exact_sum, prec)
    value = _widened(acc, tail, prec, False)
    return SeriesValue(value=value, terms_used=used, tail_bound=tail)
