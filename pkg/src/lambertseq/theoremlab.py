"""Window-sum closed forms and the linear-form/norm machinery.

The window coefficient pattern over gamma0+1 .. gamma0+8k-4 sums to a
closed form in alpha; subtracting the full geometric series from the
generating-function value leaves the quantity P (per index j) whose
leading behaviour is (2/alpha^8)^(k-1) times an explicit coefficient.
This module evaluates both sides at desk scale:

  * pattern sums and closed forms as balls, for any admissible alpha;
  * P itself, either in synthetic mode (pattern exact, nothing beyond
    the window) where P equals its main term identically, or from a
    built congruence ladder with a certified window, where the
    unobservable contributions (sequence terms beyond the materialized
    horizon, positions beyond the window) enter as explicit one-sided
    interval widenings derived from divisor-count bounds;
  * the linear form Theta = sum rho_j P_j, its conjugate images, and
    the norm product, whose integrality is the engine of the
    contradiction argument.

gamma0-free evaluation: every formula here multiplies through by
alpha^gamma0 first, so the astronomically large gamma0 of a real
ladder never enters a floating-point exponent.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import sympy

from .construction import (
    CongruenceConstruction,
    Mode,
    WindowCertificate,
    _as_mode,
    certify_window,
    prescribed_value,
)
from .errors import ConfigError, ConstructionError, DomainError, PrecisionError
from .numerics import AlgebraicNumber, BallComplex, BallReal
from .numerics.algebraic import _power_basis_eval
from .sequences import CoprimeSequence

DEFAULT_PREC = 192
MAX_DIRECT_GAMMA0 = 10**6  # direct alpha^-gamma0 evaluation guard

EPSILON = {1: 0, 2: 1, 3: 0, 4: 1}


def epsilon(j: int) -> int:
    """Parity offset: 0 for j in {1,3}, 1 for j in {2,4}."""
    if j not in EPSILON:
        raise ConfigError(f"j must be 1..4, got {j!r}")
    return EPSILON[j]


def _check_k(k):
    if not isinstance(k, int) or k < 1:
        raise ConfigError("k must be a positive int")


def _alpha_ball(alpha: AlgebraicNumber, prec: int):
    """The working ball for alpha: real when certified real."""
    if not isinstance(alpha, AlgebraicNumber):
        raise ConfigError("alpha must be an AlgebraicNumber")
    a = alpha.at_precision(prec) if alpha.prec < prec else alpha
    return a.alpha_real if a.is_real else a.alpha


def _guard_alpha8(b):
    if b.contains_zero():
        raise DomainError("alpha ball contains zero")
    if (b.pow_int(8) - 2).contains_zero():
        raise DomainError("alpha^8 - 2 is not separated from zero")


def _check_gamma0(gamma0):
    if not isinstance(gamma0, int) or gamma0 < 0 or gamma0 % 4 != 0:
        raise ConfigError("gamma0 must be a nonnegative multiple of 4")
    if gamma0 > MAX_DIRECT_GAMMA0:
        raise ConfigError(
            f"gamma0 exceeds the direct-evaluation guard {MAX_DIRECT_GAMMA0}"
        )


def _pattern_window(mode, j, k, b):
    """sum_m pattern(m) алpha^-m via Horner, gamma0 factored out."""
    inv = 1 / b
    acc = inv * 0
    for m in range(8 * k - 4, 0, -1):
        acc = (acc + prescribed_value(mode, k, j, m)) * inv
    return acc


def window_pattern_sum(mode, j, k: int, gamma0: int, alpha: AlgebraicNumber, prec: int = DEFAULT_PREC):
    """Direct sum of the prescribed pattern over the window,
    sum_{m=1}^{8k-4} pattern_j(m) / alpha^(gamma0+m)."""
    mode = _as_mode(mode)
    epsilon(j)
    _check_k(k)
    _check_gamma0(gamma0)
    b = _alpha_ball(alpha, prec)
    _guard_alpha8(b)
    return _pattern_window(mode, j, k, b) * b.pow_int(-gamma0)


def window_sum_closed_form(j: int, k: int, gamma0: int, alpha: AlgebraicNumber, prec: int = DEFAULT_PREC):
    """Two-class closed form: geometric block plus top-block boost."""
    e = epsilon(j)
    _check_k(k)
    _check_gamma0(gamma0)
    b = _alpha_ball(alpha, prec)
    _guard_alpha8(b)
    a8 = b.pow_int(8)
    geo = (b.pow_int(2) + 1) * (b.pow_int(4) + 1) / (b.pow_int(gamma0 - 1 + e) * (a8 - 2))
    shrink = 1 - (2 / a8).pow_int(k - 1)
    top = (
        (k**j * b.pow_int(4 - j) + b.pow_int(j - 2 * e))
        * 2 ** (k - 1)
        * b.pow_int(-(gamma0 + 8 * (k - 1) + 4))
    )
    return geo * shrink + top


def window_sum_closed_form_oneclass(j: int, k: int, gamma0: int, alpha: AlgebraicNumber, prec: int = DEFAULT_PREC):
    """One-class closed form; the geometric block sits at exponents
    gamma0 + 8q + j and gamma0 + 8q + j + 4."""
    epsilon(j)
    _check_k(k)
    _check_gamma0(gamma0)
    b = _alpha_ball(alpha, prec)
    _guard_alpha8(b)
    a8 = b.pow_int(8)
    geo = (b.pow_int(4) + 1) / (b.pow_int(gamma0 + j - 4) * (a8 - 2))
    shrink = 1 - (2 / a8).pow_int(k - 1)
    top = k**j * 2 ** (k - 1) * b.pow_int(-(gamma0 + 8 * (k - 1) + j))
    return geo * shrink + top


@dataclass(frozen=True)
class WindowSumIdentity:
    j: int
    k: int
    gamma0: int
    mode: Mode
    alpha: AlgebraicNumber
    lhs: object
    rhs: object
    epsilon_j: int

    @property
    def intersects(self) -> bool:
        return _overlaps(self.lhs, self.rhs)


def _overlaps(x, y) -> bool:
    if isinstance(x, BallComplex) or isinstance(y, BallComplex):
        xr = x if isinstance(x, BallComplex) else BallComplex.from_real(x)
        yr = y if isinstance(y, BallComplex) else BallComplex.from_real(y)
        return _overlaps(xr.real, yr.real) and _overlaps(xr.imag, yr.imag)
    xlo, xhi = x.to_fraction_bounds()
    ylo, yhi = y.to_fraction_bounds()
    return xlo <= yhi and ylo <= xhi


def window_sum_identity(mode, j, k, gamma0, alpha, prec: int = DEFAULT_PREC) -> WindowSumIdentity:
    """Both sides of the window identity as balls."""
    mode = _as_mode(mode)
    lhs = window_pattern_sum(mode, j, k, gamma0, alpha, prec)
    if mode is Mode.TWO_CLASS:
        rhs = window_sum_closed_form(j, k, gamma0, alpha, prec)
    else:
        rhs = window_sum_closed_form_oneclass(j, k, gamma0, alpha, prec)
    return WindowSumIdentity(
        j=j, k=k, gamma0=gamma0, mode=mode, alpha=alpha, lhs=lhs, rhs=rhs,
        epsilon_j=epsilon(j),
    )


def _geo_full(mode, j, b):
    """alpha^gamma0 times the untruncated geometric part."""
    e = epsilon(j)
    if mode is Mode.TWO_CLASS:
        return (b.pow_int(2) + 1) * (b.pow_int(4) + 1) / (b.pow_int(e - 1) * (b.pow_int(8) - 2))
    return (b.pow_int(4) + 1) * b.pow_int(4 - j) / (b.pow_int(8) - 2)


def main_term(mode, j: int, k: int, alpha: AlgebraicNumber, prec: int = DEFAULT_PREC):
    """Leading coefficient times (2/alpha^8)^(k-1)."""
    mode = _as_mode(mode)
    e = epsilon(j)
    _check_k(k)
    b = _alpha_ball(alpha, prec)
    _guard_alpha8(b)
    a8 = b.pow_int(8)
    if mode is Mode.TWO_CLASS:
        coef = (k**j * b.pow_int(4 - j) + b.pow_int(j - 2 * e)) * b.pow_int(-4) - _geo_full(
            mode, j, b
        )
    else:
        coef = k**j * b.pow_int(-j) - _geo_full(mode, j, b)
    return coef * (2 / a8).pow_int(k - 1)


@dataclass(frozen=True)
class PResult:
    """P (or its one-class analogue) with its main-term prediction.

    value is a rigorous enclosure; in pipeline mode it includes the
    one-sided widenings window_slack (possible divisors beyond the
    materialized horizon inside the window) and beyond_bound (all
    positions past the window), both exact rationals."""

    j: int
    k: int
    mode: Mode
    value: object
    main: object
    ratio: BallReal
    gamma0: object
    window_slack: Fraction
    beyond_bound: Fraction
    synthetic: bool
    certificate: object

    def to_json(self) -> dict:
        return {
            "j": self.j,
            "k": self.k,
            "mode": self.mode.value,
            "value": _ball_json(self.value),
            "main": _ball_json(self.main),
            "ratio": _ball_json(self.ratio),
            "gamma0": None if self.gamma0 is None else str(self.gamma0),
            "window_slack": str(self.window_slack),
            "beyond_bound": str(self.beyond_bound),
            "synthetic": self.synthetic,
        }


def _ball_json(b):
    return b.to_json() if b is not None else None


def _abs_ball(x) -> BallReal:
    return abs(x)


def compute_P(j: int, k: int, alpha: AlgebraicNumber, prec: int = DEFAULT_PREC, *, mode=None, construction: CongruenceConstruction | None = None, seq: CoprimeSequence | None = None, max_translates: int = 64) -> PResult:
    """P_j at level k.

    Synthetic mode (construction None): the coefficient pattern is taken
    as exact and nothing lives beyond the window, so P equals its main
    term up to ball slop.  Pipeline mode: scans translates gamma =
    eta + i A for a fully matching certificate, sums the observed
    window, subtracts the geometric part, and widens by the two
    unobservable one-sided contributions.
    """
    epsilon(j)
    _check_k(k)
    b = _alpha_ball(alpha, prec)
    _guard_alpha8(b)
    if construction is None:
        if mode is None:
            raise ConfigError("synthetic mode needs an explicit mode")
        mode = _as_mode(mode)
        window_val = _pattern_window(mode, j, k, b)
        value = window_val - _geo_full(mode, j, b)
        gamma0, cert = None, None
        slack = beyond = Fraction(0)
    else:
        if mode is not None and _as_mode(mode) is not construction.mode:
            raise ConfigError("mode disagrees with the construction")
        if seq is None:
            raise ConfigError("pipeline mode needs the term sequence")
        if construction.k != k:
            raise ConfigError("k disagrees with the construction")
        mode = construction.mode
        if not isinstance(b, BallReal):
            raise DomainError("pipeline P needs a real alpha > 1")
        alo = b.to_fraction_bounds()[0]
        if alo <= 1:
            raise DomainError("pipeline P needs alpha certified > 1")
        gamma0, cert = _certified_translate(construction, seq, max_translates)
        row = cert.observed[cert.j_range.index(j)]
        inv = 1 / b
        acc = inv * 0
        for m in range(8 * k - 4, 0, -1):
            acc = (acc + row[m - 1]) * inv
        value = acc - _geo_full(mode, j, b)
        slack, beyond = _unseen_bounds(gamma0, k, cert.horizon, 1 / alo)
        widen = slack + beyond
        value = value + BallReal.from_midrad(widen / 2, widen / 2, prec)
    main = main_term(mode, j, k, alpha, prec)
    q = (2 / _abs_ball(b).pow_int(8)).pow_int(k)
    ratio = _abs_ball(value - main) / q
    return PResult(
        j=j, k=k, mode=mode, value=value, main=main, ratio=ratio,
        gamma0=gamma0, window_slack=slack, beyond_bound=beyond,
        synthetic=construction is None, certificate=cert,
    )


def _certified_translate(c: CongruenceConstruction, seq, max_translates: int):
    for i in range(max_translates):
        gamma = c.eta_k + i * c.A_k
        cert = certify_window(c, gamma, seq)
        if cert.full_match and cert.extras_empty:
            return gamma, cert
    raise ConstructionError(
        f"no fully matching window among the first {max_translates} translates"
    )


def _unseen_bounds(gamma0: int, k: int, horizon: int, r: Fraction):
    """One-sided overbounds for contributions trial division cannot see.

    Pairwise-coprime terms > T dividing n number at most log2(n)/log2(T);
    window positions use T = horizon, beyond-window positions use T = 64
    with log2(gamma0+i) <= bits(gamma0) + i.
    """
    if not 0 < r < 1:
        raise DomainError("pipeline P needs alpha certified > 1")
    big_bits = (gamma0 + 8 * k).bit_length()
    hbits = max(horizon.bit_length() - 1, 1)
    window = 8 * k - 4
    slack = Fraction(big_bits, hbits) * (r - r ** (window + 1)) / (1 - r)
    start = window + 1
    s0 = r**start / (1 - r)
    s1 = r**start * (start - (start - 1) * r) / (1 - r) ** 2
    beyond = (big_bits * s0 + s1) / 6
    return slack, beyond


@dataclass(frozen=True)
class LinearFormState:
    rho: tuple
    d: int
    theta_k: object
    conjugate_images: tuple
    phi: object
    norm: BallReal
    embeddings: int


def theta_norm(rho, d: int, j_values, alpha: AlgebraicNumber, prec: int = DEFAULT_PREC) -> LinearFormState:
    """Theta = sum rho_j(alpha) P_j with the P values held fixed under
    every embedding; returns the assembled norm product."""
    if not isinstance(alpha, AlgebraicNumber):
        raise ConfigError("alpha must be an AlgebraicNumber")
    if not isinstance(d, int) or d < 1:
        raise ConfigError("d must be a positive int")
    rho = tuple(tuple(int(t) for t in coords) for coords in rho)
    if len(rho) != 4 or any(len(c) > alpha.degree or not c for c in rho):
        raise ConfigError("rho must be four power-basis coordinate tuples")
    values = [v if isinstance(v, BallReal) else BallReal.exact(v, prec) for v in j_values]
    if len(values) != 4:
        raise ConfigError("j_values must supply four P values")
    a = alpha.at_precision(prec) if alpha.prec < prec else alpha
    base = a.alpha_real if a.is_real else a.alpha
    theta = _linear_combination(rho, values, base, prec)
    phi = _phi_of(theta, d)
    images = []
    for idx in a.other_conjugates():
        conj = a.conjugates[idx]
        images.append(_linear_combination(rho, values, conj, prec))
    m = len(images)
    # keep any complex operand on the left: real balls do not coerce
    # complex ones
    prod = theta * phi if isinstance(theta, BallComplex) else phi * theta
    prod = prod * d ** (m + 1)
    for img in images:
        prod = img * prod
    if isinstance(prod, BallComplex):
        if not prod.imag.contains_zero():
            raise PrecisionError(
                "norm product certified non-real; inputs are not conjugate-closed"
            )
        norm = prod.real
    else:
        norm = prod
    return LinearFormState(
        rho=rho, d=d, theta_k=theta, conjugate_images=tuple(images),
        phi=phi, norm=norm, embeddings=m,
    )


def _linear_combination(rho, values, base, prec):
    acc = None
    for coords, val in zip(rho, values):
        if isinstance(base, BallReal):
            r = _real_power_basis(coords, base, prec)
        else:
            r = _power_basis_eval(coords, base)
        term = r * val
        acc = term if acc is None else acc + term
    return acc


def _real_power_basis(coords, base: BallReal, prec) -> BallReal:
    acc = BallReal.exact(0, prec)
    for c in reversed(coords):
        acc = acc * base + c
    return acc


def _phi_of(theta, d):
    """Value-level conjugation test: d * conj(theta) when theta is
    certified non-real, 1 when exactly real, undecidable otherwise."""
    if isinstance(theta, BallReal) or theta.is_real:
        return BallReal.exact(1, theta.prec)
    if theta.imag.excludes_zero():
        return theta.conjugate() * d
    raise PrecisionError("cannot decide whether Theta is real at this precision")


def default_denominator(alpha: AlgebraicNumber) -> int:
    """|norm of alpha^8 - 2|; always clears (alpha^8-2)^-1."""
    if not isinstance(alpha, AlgebraicNumber):
        raise ConfigError("alpha must be an AlgebraicNumber")
    x = sympy.Symbol("x")
    p = sympy.Poly(list(reversed(alpha.minimal_poly.coeffs)), x)
    res = int(sympy.resultant(p.as_expr(), x**8 - 2, x))
    if res == 0:
        raise DomainError("alpha^8 = 2; the denominator never clears")
    return abs(res)


def verify_denominator(alpha: AlgebraicNumber, d: int) -> bool:
    """True iff d/(alpha^8 - 2) is an algebraic integer: the monic
    characteristic polynomial of d (alpha^8-2)^-1 must have integer
    coefficients."""
    if not isinstance(alpha, AlgebraicNumber):
        raise ConfigError("alpha must be an AlgebraicNumber")
    if not isinstance(d, int) or d < 1:
        raise ConfigError("d must be a positive int")
    x, t = sympy.symbols("x t")
    p = sympy.Poly(list(reversed(alpha.minimal_poly.coeffs)), x)
    q = sympy.Poly(sympy.resultant(p.as_expr(), t * (x**8 - 2) - d, x), t)
    coeffs = [int(c) for c in q.all_coeffs()]
    lead = coeffs[0]
    if lead == 0:
        raise DomainError("alpha^8 = 2; the denominator never clears")
    return all(c % lead == 0 for c in coeffs)
