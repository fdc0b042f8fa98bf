"""Certified root isolation for monic integer polynomials.

Approximation is simultaneous (Durand-Kerner) iteration in complex
floating point; certification is independent and rigorous: with
Weierstrass corrections W_i = p(z_i) / prod_{j != i} (z_i - z_j)
computed in ball arithmetic, the disks D(z_i, n |W_i|) jointly cover
the roots and, when pairwise disjoint, each contains exactly one root
(Smith 1970).  Disjoint disks centered on the real axis then contain
exactly real roots, because the conjugate of the contained root lies
in the same disk.

Multiple roots are handled by certifying the squarefree part and
annotating multiplicities, since disjoint disks cannot exist for a
repeated root.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import gmpy2
import sympy

from ..errors import ConfigError, PrecisionError
from .balls import BallComplex, BallReal, DEFAULT_PREC, _check_prec, _ctx, _eabs, _eneg


class MonicIntPolynomial:
    """Monic polynomial with integer coefficients, constant term first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = tuple(int(c) for c in coeffs)
        if len(coeffs) < 2:
            raise ConfigError("degree must be >= 1")
        if coeffs[-1] != 1:
            raise ConfigError("leading coefficient must be exactly 1")
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("MonicIntPolynomial is immutable")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __eq__(self, other):
        return isinstance(other, MonicIntPolynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"MonicIntPolynomial({list(self.coeffs)})"

    def evaluate(self, x):
        """Exact evaluation at an int or Fraction."""
        if isinstance(x, int):
            acc = 0
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_ball(self, x):
        """Ball evaluation (Horner); x may be BallReal or BallComplex."""
        if not isinstance(x, (BallReal, BallComplex)):
            raise ConfigError("eval_ball expects a ball")
        acc = x - x  # zero of matching type and precision
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def to_json(self) -> list:
        return list(self.coeffs)

    @classmethod
    def from_json(cls, obj) -> "MonicIntPolynomial":
        if not isinstance(obj, list) or not all(isinstance(c, int) for c in obj):
            raise ConfigError("polynomial must be a JSON list of integers, constant term first")
        return cls(obj)

    def squarefree_factors(self):
        """[(MonicIntPolynomial, multiplicity), ...] with distinct roots
        across factors; product of factor^mult = self."""
        x = sympy.Symbol("x")
        poly = sympy.Poly(list(reversed(self.coeffs)), x)
        content, sqf = poly.sqf_list()
        if content != 1:
            raise ConfigError("polynomial is not monic after content extraction")
        out = []
        for fac, mult in sqf:
            cs = [int(c) for c in reversed(fac.all_coeffs())]
            out.append((MonicIntPolynomial(cs), int(mult)))
        return out


@dataclass(frozen=True)
class RootBall:
    """One isolated root with its multiplicity in the original
    polynomial.  conj_partner indexes into the enclosing result list
    for non-real roots; is_real is certified, not heuristic."""

    value: BallComplex
    multiplicity: int
    is_real: bool
    conj_partner: int | None = None


def _dk_approximate(coeffs, wp, max_sweeps=None):
    """Durand-Kerner sweep; returns approximate roots as mpc list.
    Plain floating point, no rigor claims; certification comes later."""
    n = len(coeffs) - 1
    ctx = gmpy2.context(precision=wp)
    pi2 = ctx.mul(ctx.const_pi(), 2)
    radius = ctx.add(1, max(abs(c) for c in coeffs[:-1]))
    roots = []
    for k in range(n):
        angle = ctx.div(ctx.mul(pi2, gmpy2.mpq(4 * k + 1, 4 * n)), 1)
        r = ctx.mul(radius, gmpy2.mpq(2 * n + k, 2 * n))
        roots.append(ctx.mul(r, ctx.exp(gmpy2.mpc(0, angle))))
    if max_sweeps is None:
        max_sweeps = 200 + 20 * n
    tol = gmpy2.mpfr(gmpy2.mpq(1, 1 << (wp - 8)), 8)
    prev = None
    stall = 0
    for sweep in range(max_sweeps):
        maxrel = gmpy2.mpfr(0)
        for i in range(n):
            z = roots[i]
            pz = gmpy2.mpc(coeffs[-1])
            for c in reversed(coeffs[:-1]):
                pz = ctx.add(ctx.mul(pz, z), c)
            den = gmpy2.mpc(1)
            for j in range(n):
                if j != i:
                    den = ctx.mul(den, ctx.sub(z, roots[j]))
            if den == 0:
                # coincident iterates; nudge and continue
                roots[i] = ctx.add(z, ctx.div(gmpy2.mpc(1, 1), 1 << (sweep + 3)))
                maxrel = gmpy2.mpfr(1)
                continue
            w = ctx.div(pz, den)
            roots[i] = ctx.sub(z, w)
            rel = ctx.div(ctx.abs(w), ctx.add(1, ctx.abs(roots[i])))
            if rel > maxrel:
                maxrel = rel
        if maxrel < tol:
            break
        if prev is not None and maxrel >= prev:
            stall += 1
            if stall > 12 and sweep > 40:
                break
        else:
            stall = 0
        prev = maxrel
    return roots


def _symmetrize(roots, wp):
    """Project near-real iterates to the real axis and average conjugate
    pairs so the candidate set is exactly conjugate-symmetric.
    Returns [(mpfr re, mpfr im, certified_real_candidate: bool)]."""
    ctx = gmpy2.context(precision=wp)
    thresh = gmpy2.mpfr(gmpy2.mpq(1, 1 << (wp // 2)), 8)
    reals, upper, lower = [], [], []
    for z in roots:
        scale = ctx.add(1, ctx.abs(z))
        if _eabs(z.imag) <= ctx.mul(thresh, scale):
            reals.append(z.real)
        elif z.imag > 0:
            upper.append(z)
        else:
            lower.append(z)
    out = [(r, gmpy2.mpfr(0), True) for r in reals]
    used = [False] * len(lower)
    for z in upper:
        best, bestd = None, None
        for idx, w in enumerate(lower):
            if used[idx]:
                continue
            d = ctx.add(
                ctx.abs(ctx.sub(z.real, w.real)), ctx.abs(ctx.add(z.imag, w.imag))
            )
            if bestd is None or d < bestd:
                best, bestd = idx, d
        if best is None:
            # unpaired; keep as-is, certification decides
            out.append((z.real, z.imag, False))
            continue
        used[best] = True
        w = lower[best]
        re = ctx.div(ctx.add(z.real, w.real), 2)
        im = ctx.div(ctx.sub(z.imag, w.imag), 2)
        out.append((re, im, False))
        out.append((re, ctx.mul(im, -1), False))
    for idx, w in enumerate(lower):
        if not used[idx]:
            out.append((w.real, w.imag, False))
    return out


def _certify(poly, candidates, wp):
    """Weierstrass-disk certification.  Returns a list of
    (center_re, center_im, disk_radius, is_real) or raises
    PrecisionError when disks cannot be shown pairwise disjoint."""
    n = poly.degree
    assert len(candidates) == n
    pts = [
        BallComplex(BallReal.exact(re, wp), BallReal.exact(im, wp))
        for re, im, _ in candidates
    ]
    ru = _ctx.rup
    disks = []
    for i in range(n):
        pz = poly.eval_ball(pts[i])
        den = BallComplex.exact(1, 0, wp)
        for j in range(n):
            if j != i:
                den = den * (pts[i] - pts[j])
        if den.contains_zero():
            raise PrecisionError("coincident root candidates; retry at higher precision")
        w = pz / den
        u = abs(w).upper()
        if not gmpy2.is_finite(u):
            raise PrecisionError("Weierstrass correction overflow")
        disks.append(ru.mul(u, n))
    for i in range(n):
        for j in range(i + 1, n):
            dist = abs(pts[i] - pts[j]).lower()
            if not dist > ru.add(disks[i], disks[j]):
                raise PrecisionError(
                    "root disks not certifiably disjoint; retry at higher precision"
                )
    return [
        (candidates[i][0], candidates[i][1], disks[i], candidates[i][2])
        for i in range(n)
    ]


def _ball_from_cert(re, im, disk, is_real, prec):
    reb = BallReal.exact(re, prec)
    reb = BallReal(reb.mid, _ctx.rup.add(reb.rad, disk), prec)
    if is_real:
        imb = BallReal.zero(prec)
    else:
        imb = BallReal.exact(im, prec)
        imb = BallReal(imb.mid, _ctx.rup.add(imb.rad, disk), prec)
    return BallComplex(reb, imb)


def isolate_roots(p: MonicIntPolynomial, prec: int = DEFAULT_PREC) -> list[RootBall]:
    """Isolate all roots of p into certified balls.

    Returns RootBall entries sorted by descending real part then
    descending imaginary part, with multiplicities summing to deg p.
    Raises PrecisionError when pairwise-disjoint certification fails at
    this precision; callers retry with a larger prec.
    """
    if not isinstance(p, MonicIntPolynomial):
        raise ConfigError("isolate_roots expects a MonicIntPolynomial")
    _check_prec(prec)
    wp = prec + 64
    certified = []  # (re, im, disk_radius_or_None, is_real, multiplicity)
    for factor, mult in p.squarefree_factors():
        if factor.degree == 1:
            certified.append((-factor.coeffs[0], 0, None, True, mult))
            continue
        approx = _dk_approximate(factor.coeffs, wp)
        cands = _symmetrize(approx, wp)
        if len(cands) != factor.degree:
            raise PrecisionError("root candidates lost during symmetrization")
        for re, im, disk, is_real in _certify(factor, cands, wp):
            certified.append((re, im, disk, is_real, mult))
    balls = []
    for re, im, disk, is_real, mult in certified:
        if disk is None:
            b = BallComplex(BallReal.exact(re, prec), BallReal.zero(prec))
        else:
            b = _ball_from_cert(re, im, disk, is_real, prec)
        balls.append((b, mult, is_real))
    # final pairwise disjointness of the output boxes; covers the
    # cross-factor pairs the per-factor disk test cannot see
    for i in range(len(balls)):
        for j in range(i + 1, len(balls)):
            if not abs(balls[i][0] - balls[j][0]).lower() > 0:
                raise PrecisionError(
                    "root balls not certifiably disjoint; retry at higher precision"
                )
    order = sorted(
        range(len(balls)),
        key=lambda t: (balls[t][0].real.mid, balls[t][0].imag.mid),
        reverse=True,
    )
    entries = []
    for t in order:
        b, mult, is_real = balls[t]
        entries.append([b, mult, is_real, None])
    # conjugate partner linkage by exact midpoint mirror
    for i, e in enumerate(entries):
        if e[2] or e[3] is not None:
            continue
        for j in range(i + 1, len(entries)):
            f = entries[j]
            if f[2] or f[3] is not None:
                continue
            if e[0].real.mid == f[0].real.mid and e[0].imag.mid == _eneg(f[0].imag.mid):
                e[3], f[3] = j, i
                break
    return [
        RootBall(value=b, multiplicity=m, is_real=r, conj_partner=cp)
        for b, m, r, cp in entries
    ]


def flat_conjugates(rootballs) -> tuple[list[BallComplex], list[int | None], list[bool]]:
    """Expand RootBall entries by multiplicity into a flat conjugate
    list plus per-entry conjugate partner indices and realness flags."""
    flat, partner, isreal = [], [], []
    base = {}
    for idx, rb in enumerate(rootballs):
        base[idx] = len(flat)
        for _ in range(rb.multiplicity):
            flat.append(rb.value)
            isreal.append(rb.is_real)
            partner.append(None)
    for idx, rb in enumerate(rootballs):
        if rb.conj_partner is not None:
            for copy in range(rb.multiplicity):
                partner[base[idx] + copy] = base[rb.conj_partner] + copy
    return flat, partner, isreal
