"""Midpoint-radius ball arithmetic over MPFR floats.

A ball is a pair (mid, rad) representing the closed interval
[mid - rad, mid + rad].  Midpoints live at ``prec`` bits and are
rounded to nearest; radii live at a small fixed precision and every
radius computation rounds up, so the interval returned by any
operation always contains the exact image of the input intervals.

Rounding slop is added only when MPFR reports the midpoint operation
as inexact, which keeps integer arithmetic exact: a product of exact
integer balls has radius zero.  Contexts are cached per thread; ball
values themselves are immutable and safe to share.
"""

from __future__ import annotations

import threading
from fractions import Fraction

import gmpy2

from ..errors import ConfigError, DomainError

DEFAULT_PREC = 256

_RAD_PREC = 32
_MIN_PREC = 8
_MAX_PREC = 1 << 24

_ZERO = gmpy2.mpfr(0)


class _CtxCache(threading.local):
    def __init__(self):
        self.mid = {}
        self.up = {}
        self.down = {}
        self.sign = {}
        self.rup = gmpy2.context(precision=_RAD_PREC, round=gmpy2.RoundUp)
        self.rdown = gmpy2.context(precision=_RAD_PREC, round=gmpy2.RoundDown)


_ctx = _CtxCache()


def _eneg(x):
    """Exact negation.  gmpy2's bare unary minus rounds to the ambient
    thread context, so sign flips go through a context wide enough to
    hold the operand."""
    p = x.precision
    c = _ctx.sign.get(p)
    if c is None:
        c = _ctx.sign[p] = gmpy2.context(precision=p)
    return c.mul(x, -1)


def _eabs(x):
    return x if x >= 0 else _eneg(x)


def _emax(x, y):
    return x if x >= y else y


def _mid_ctx(prec):
    c = _ctx.mid.get(prec)
    if c is None:
        c = _ctx.mid[prec] = gmpy2.context(precision=prec)
    return c


def _up_ctx(prec):
    c = _ctx.up.get(prec)
    if c is None:
        c = _ctx.up[prec] = gmpy2.context(precision=prec, round=gmpy2.RoundUp)
    return c


def _down_ctx(prec):
    c = _ctx.down.get(prec)
    if c is None:
        c = _ctx.down[prec] = gmpy2.context(precision=prec, round=gmpy2.RoundDown)
    return c


_POW2 = {}


def _pow2(e: int):
    """2^e as an exact mpfr (one significant bit, any precision)."""
    v = _POW2.get(e)
    if v is None:
        if e >= 0:
            v = gmpy2.mpfr(1 << e, 8)
        else:
            v = gmpy2.mpfr(gmpy2.mpq(1, 1 << (-e)), 8)
        _POW2[e] = v
    return v


def _check_prec(prec):
    if not isinstance(prec, int) or not (_MIN_PREC <= prec <= _MAX_PREC):
        raise ConfigError(f"precision must be an int in [{_MIN_PREC}, {_MAX_PREC}], got {prec!r}")


def _mpfr_to_fraction(x) -> Fraction:
    m, e = x.as_mantissa_exp()
    m, e = int(m), int(e)
    if e >= 0:
        return Fraction(m << e)
    return Fraction(m, 1 << (-e))


def _dyadic_decimal(f: Fraction) -> str:
    """Exact decimal string of a dyadic rational."""
    num, den = f.numerator, f.denominator
    k = den.bit_length() - 1
    if den != (1 << k):
        raise ValueError("not dyadic")
    if num == 0:
        return "0"
    digits = abs(num) * 5**k
    s = str(digits).rjust(k + 1, "0")
    if k:
        intpart, fracpart = s[:-k], s[-k:]
        fracpart = fracpart.rstrip("0")
    else:
        intpart, fracpart = s, ""
    out = intpart + ("." + fracpart if fracpart else "")
    return ("-" + out) if num < 0 else out


def _decimal_exponent(a: Fraction) -> int:
    """E with 10^E <= a < 10^(E+1), for a > 0."""
    num, den = a.numerator, a.denominator
    # bit-length estimate, then adjust
    e = (num.bit_length() - den.bit_length()) * 30103 // 100000
    while 10**max(e, 0) * den > num * 10**max(-e, 0):
        e -= 1
    while 10 ** max(e + 1, 0) * den <= num * 10 ** max(-(e + 1), 0):
        e += 1
    return e


def decimal_bound(f: Fraction, sig: int, direction: str) -> str:
    """Decimal string with `sig` significant digits bounding f from the
    requested side ("floor" rounds toward -inf, "ceil" toward +inf).
    Scientific notation; parse-back via Fraction() respects the bound.
    """
    if sig < 1:
        raise ConfigError("sig must be >= 1")
    if f == 0:
        return "0"
    neg = f < 0
    if neg:
        f = -f
        direction = "floor" if direction == "ceil" else "ceil"
    E = _decimal_exponent(f)
    scaled = f * Fraction(10) ** (sig - 1 - E)
    n, r = divmod(scaled.numerator, scaled.denominator)
    d = n + 1 if (direction == "ceil" and r) else n
    if d >= 10**sig:
        d //= 10
        E += 1
    s = str(d)
    mant = s[0] + ("." + s[1:] if len(s) > 1 else "")
    out = f"{mant}e{E:+d}"
    return ("-" + out) if neg else out


def _slop(ctx, mid, prec):
    """Half-ulp overbound for the last midpoint op, or 0 if exact."""
    if not ctx.inexact:
        return _ZERO
    return _ctx.rup.mul(_eabs(mid), _pow2(1 - prec))


def _coerce_exact(value):
    """Exact rational view of an input scalar, or None if unsupported."""
    if isinstance(value, bool):
        return None
    if isinstance(value, int):
        return gmpy2.mpz(value)
    if isinstance(value, Fraction):
        return gmpy2.mpq(value.numerator, value.denominator)
    if isinstance(value, (type(gmpy2.mpz(0)), type(gmpy2.mpq(0)))):
        return value
    if isinstance(value, type(_ZERO)):
        return value
    if isinstance(value, str):
        try:
            q = Fraction(value)
        except ValueError as exc:
            raise ConfigError(f"cannot parse {value!r} as a rational") from exc
        return gmpy2.mpq(q.numerator, q.denominator)
    return None


class BallReal:
    """Immutable real ball [mid - rad, mid + rad]."""

    __slots__ = ("mid", "rad", "prec")

    def __init__(self, mid, rad, prec):
        object.__setattr__(self, "mid", mid)
        object.__setattr__(self, "rad", rad)
        object.__setattr__(self, "prec", prec)

    def __setattr__(self, name, value):
        raise AttributeError("BallReal is immutable")

    # construction -----------------------------------------------------

    @classmethod
    def exact(cls, value, prec=DEFAULT_PREC) -> "BallReal":
        """Ball for an exact int / Fraction / mpfr / decimal string.

        The radius is zero when the value is representable at `prec`
        bits and a rigorous half-ulp bound otherwise.
        """
        _check_prec(prec)
        v = _coerce_exact(value)
        if v is None:
            raise ConfigError(f"unsupported exact value type {type(value).__name__}")
        mc = _mid_ctx(prec)
        mc.clear_flags()
        mid = mc.add(v, _ZERO)
        if not gmpy2.is_finite(mid):
            raise DomainError("value overflows the floating-point range")
        return cls(mid, _slop(mc, mid, prec), prec)

    @classmethod
    def from_midrad(cls, mid, rad, prec=DEFAULT_PREC) -> "BallReal":
        _check_prec(prec)
        b = cls.exact(mid, prec)
        r = _coerce_exact(rad)
        if r is None:
            raise ConfigError(f"unsupported radius type {type(rad).__name__}")
        rr = _ctx.rup.add(r, _ZERO)
        if rr < 0 or not gmpy2.is_finite(rr):
            raise ConfigError("radius must be nonnegative and finite")
        return cls(b.mid, _ctx.rup.add(b.rad, rr), prec)

    @classmethod
    def zero(cls, prec=DEFAULT_PREC) -> "BallReal":
        _check_prec(prec)
        return cls(gmpy2.mpfr(0, prec), _ZERO, prec)

    @classmethod
    def _from_interval(cls, lo, hi, prec) -> "BallReal":
        """Ball covering [lo, hi] (mpfr endpoints, lo <= hi +- 1 ulp)."""
        mc = _mid_ctx(prec)
        mc.clear_flags()
        mid = mc.div(mc.add(lo, hi), 2)
        ru = _ctx.rup
        rad = _emax(ru.sub(hi, mid), ru.sub(mid, lo))
        rad = _emax(rad, _ZERO)
        return cls(mid, rad, prec)

    # accessors --------------------------------------------------------

    def lower(self):
        """Certified lower endpoint (mpfr, rounded down)."""
        return _down_ctx(self.prec).sub(self.mid, self.rad)

    def upper(self):
        return _up_ctx(self.prec).add(self.mid, self.rad)

    def to_fraction_bounds(self) -> tuple[Fraction, Fraction]:
        return _mpfr_to_fraction(self.lower()), _mpfr_to_fraction(self.upper())

    @property
    def is_exact(self) -> bool:
        return gmpy2.is_zero(self.rad)

    def contains_zero(self) -> bool:
        return self.lower() <= 0 <= self.upper()

    def excludes_zero(self) -> bool:
        return not self.contains_zero()

    def contains(self, value) -> bool:
        """Whether an exact rational is inside the ball."""
        v = _coerce_exact(value)
        if v is None:
            raise ConfigError(f"unsupported value type {type(value).__name__}")
        return self.lower() <= v <= self.upper()

    def overlaps(self, other: "BallReal") -> bool:
        return self.lower() <= other.upper() and other.lower() <= self.upper()

    def strictly_less(self, other) -> bool:
        """self < other certified; ball overlap gives False, not an error."""
        if isinstance(other, BallReal):
            return self.upper() < other.lower()
        v = _coerce_exact(other)
        if v is None:
            raise ConfigError(f"unsupported comparand type {type(other).__name__}")
        return self.upper() < v

    def strictly_greater(self, other) -> bool:
        if isinstance(other, BallReal):
            return other.strictly_less(self)
        v = _coerce_exact(other)
        if v is None:
            raise ConfigError(f"unsupported comparand type {type(other).__name__}")
        return self.lower() > v

    def __repr__(self):
        return f"BallReal(mid={self.mid!r}, rad={self.rad!r}, prec={self.prec})"

    # arithmetic -------------------------------------------------------

    def _binary_prec(self, other) -> tuple["BallReal", int]:
        if not isinstance(other, BallReal):
            other = BallReal.exact(other, self.prec)
        return other, max(self.prec, other.prec)

    def __add__(self, other):
        other, prec = self._binary_prec(other)
        mc = _mid_ctx(prec)
        mc.clear_flags()
        mid = mc.add(self.mid, other.mid)
        ru = _ctx.rup
        rad = ru.add(ru.add(self.rad, other.rad), _slop(mc, mid, prec))
        return BallReal(mid, rad, prec)

    __radd__ = __add__

    def __sub__(self, other):
        other, prec = self._binary_prec(other)
        mc = _mid_ctx(prec)
        mc.clear_flags()
        mid = mc.sub(self.mid, other.mid)
        ru = _ctx.rup
        rad = ru.add(ru.add(self.rad, other.rad), _slop(mc, mid, prec))
        return BallReal(mid, rad, prec)

    def __rsub__(self, other):
        return BallReal.exact(other, self.prec).__sub__(self)

    def __neg__(self):
        return BallReal(_eneg(self.mid), self.rad, self.prec)

    def __abs__(self):
        lo, hi = self.lower(), self.upper()
        if lo >= 0:
            return self
        if hi <= 0:
            return -self
        return BallReal._from_interval(_ZERO, _emax(_eneg(lo), hi), self.prec)

    def __mul__(self, other):
        other, prec = self._binary_prec(other)
        mc = _mid_ctx(prec)
        mc.clear_flags()
        mid = mc.mul(self.mid, other.mid)
        ru = _ctx.rup
        rad = ru.add(
            ru.add(ru.mul(_eabs(self.mid), other.rad), ru.mul(_eabs(other.mid), self.rad)),
            ru.add(ru.mul(self.rad, other.rad), _slop(mc, mid, prec)),
        )
        return BallReal(mid, rad, prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other, prec = self._binary_prec(other)
        lb = _down_ctx(prec).sub(_eabs(other.mid), other.rad)
        if lb <= 0:
            raise DomainError("division by a ball containing zero")
        mc = _mid_ctx(prec)
        mc.clear_flags()
        mid = mc.div(self.mid, other.mid)
        ru = _ctx.rup
        num = ru.add(ru.mul(_eabs(self.mid), other.rad), ru.mul(_eabs(other.mid), self.rad))
        den = _ctx.rdown.mul(lb, _eabs(other.mid))
        rad = ru.add(ru.div(num, den), _slop(mc, mid, prec))
        return BallReal(mid, rad, prec)

    def __rtruediv__(self, other):
        return BallReal.exact(other, self.prec).__truediv__(self)

    def pow_int(self, n: int) -> "BallReal":
        """Integer power by binary exponentiation; pow_int(x, 0) is 1."""
        if not isinstance(n, int):
            raise ConfigError("exponent must be an int")
        if n < 0:
            return BallReal.exact(1, self.prec) / self.pow_int(-n)
        result = BallReal.exact(1, self.prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # monotone elementary functions ------------------------------------

    def sqrt(self) -> "BallReal":
        lo = self.lower()
        if lo < 0:
            raise DomainError("sqrt of a possibly-negative ball")
        slo = _down_ctx(self.prec).sqrt(lo)
        shi = _up_ctx(self.prec).sqrt(self.upper())
        return BallReal._from_interval(slo, shi, self.prec)

    def sqrt_nonneg(self) -> "BallReal":
        """sqrt for quantities the caller certifies are >= 0 (moduli,
        squares): any negative part of the interval is radius slop and
        is clamped away.  Rigorous under that premise."""
        hi = self.upper()
        if hi < 0:
            raise DomainError("sqrt of a certainly-negative ball")
        lo = self.lower()
        slo = _down_ctx(self.prec).sqrt(lo) if lo > 0 else _ZERO
        shi = _up_ctx(self.prec).sqrt(hi)
        return BallReal._from_interval(slo, shi, self.prec)

    def log(self) -> "BallReal":
        lo = self.lower()
        if lo <= 0:
            raise DomainError("log of a possibly-nonpositive ball")
        llo = _down_ctx(self.prec).log(lo)
        lhi = _up_ctx(self.prec).log(self.upper())
        return BallReal._from_interval(llo, lhi, self.prec)

    def exp(self) -> "BallReal":
        elo = _down_ctx(self.prec).exp(self.lower())
        ehi = _up_ctx(self.prec).exp(self.upper())
        if not (gmpy2.is_finite(elo) and gmpy2.is_finite(ehi)):
            raise DomainError("exp overflows the floating-point range")
        return BallReal._from_interval(elo, ehi, self.prec)

    # serialization ----------------------------------------------------

    def to_json(self) -> dict:
        """{"mid": ..., "rad": ..., "prec": ...} with the midpoint as an
        exact decimal and the radius exact or rounded up to 12 digits."""
        mid = _dyadic_decimal(_mpfr_to_fraction(self.mid))
        fr = _mpfr_to_fraction(self.rad)
        rad = _dyadic_decimal(fr)
        if len(rad) > 48:
            rad = decimal_bound(fr, 12, "ceil")
        return {"mid": mid, "rad": rad, "prec": self.prec}

    @classmethod
    def from_json(cls, obj) -> "BallReal":
        try:
            mid, rad, prec = obj["mid"], obj["rad"], obj["prec"]
        except (TypeError, KeyError) as exc:
            raise ConfigError(f"malformed ball object: {obj!r}") from exc
        return cls.from_midrad(Fraction(mid), Fraction(rad), prec)

    def decimal_interval(self, digits: int) -> dict:
        """Outward-rounded decimal endpoints at `digits` significant digits."""
        lo, hi = self.to_fraction_bounds()
        return {
            "lo": decimal_bound(lo, digits, "floor"),
            "hi": decimal_bound(hi, digits, "ceil"),
        }


class BallComplex:
    """Pair of real balls; contains z iff Re z and Im z are contained
    componentwise."""

    __slots__ = ("real", "imag")

    def __init__(self, real: BallReal, imag: BallReal):
        if not (isinstance(real, BallReal) and isinstance(imag, BallReal)):
            raise ConfigError("BallComplex components must be BallReal")
        object.__setattr__(self, "real", real)
        object.__setattr__(self, "imag", imag)

    def __setattr__(self, name, value):
        raise AttributeError("BallComplex is immutable")

    @classmethod
    def exact(cls, re, im=0, prec=DEFAULT_PREC) -> "BallComplex":
        return cls(BallReal.exact(re, prec), BallReal.exact(im, prec))

    @classmethod
    def from_real(cls, b: BallReal) -> "BallComplex":
        return cls(b, BallReal.zero(b.prec))

    @property
    def prec(self) -> int:
        return max(self.real.prec, self.imag.prec)

    @property
    def is_real(self) -> bool:
        """Imaginary part exactly the point 0."""
        return self.imag.is_exact and gmpy2.is_zero(self.imag.mid)

    def conjugate(self) -> "BallComplex":
        return BallComplex(self.real, -self.imag)

    def contains_zero(self) -> bool:
        return self.real.contains_zero() and self.imag.contains_zero()

    def __repr__(self):
        return f"BallComplex({self.real!r}, {self.imag!r})"

    def _coerce(self, other) -> "BallComplex":
        if isinstance(other, BallComplex):
            return other
        if isinstance(other, BallReal):
            return BallComplex.from_real(other)
        return BallComplex.from_real(BallReal.exact(other, self.prec))

    def __add__(self, other):
        o = self._coerce(other)
        return BallComplex(self.real + o.real, self.imag + o.imag)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return BallComplex(self.real - o.real, self.imag - o.imag)

    def __rsub__(self, other):
        return self._coerce(other).__sub__(self)

    def __neg__(self):
        return BallComplex(-self.real, -self.imag)

    def __mul__(self, other):
        o = self._coerce(other)
        return BallComplex(
            self.real * o.real - self.imag * o.imag,
            self.real * o.imag + self.imag * o.real,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        den = o.real * o.real + o.imag * o.imag
        if den.contains_zero():
            raise DomainError("division by a ball containing zero")
        num = self * o.conjugate()
        return BallComplex(num.real / den, num.imag / den)

    def __rtruediv__(self, other):
        return self._coerce(other).__truediv__(self)

    def pow_int(self, n: int) -> "BallComplex":
        if not isinstance(n, int):
            raise ConfigError("exponent must be an int")
        if n < 0:
            return BallComplex.exact(1, 0, self.prec) / self.pow_int(-n)
        result = BallComplex.exact(1, 0, self.prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __abs__(self) -> BallReal:
        # |z|^2 is nonnegative; any dip below 0 is radius slop
        return (self.real * self.real + self.imag * self.imag).sqrt_nonneg()

    def to_json(self) -> dict:
        return {"real": self.real.to_json(), "imag": self.imag.to_json()}

    @classmethod
    def from_json(cls, obj) -> "BallComplex":
        try:
            return cls(BallReal.from_json(obj["real"]), BallReal.from_json(obj["imag"]))
        except (TypeError, KeyError) as exc:
            raise ConfigError(f"malformed complex ball object: {obj!r}") from exc


def ball_sum(items, prec=None):
    """Sum of an iterable of balls (real unless any item is complex)."""
    items = list(items)
    if not items:
        return BallReal.zero(prec or DEFAULT_PREC)
    acc = items[0]
    for it in items[1:]:
        acc = acc + it
    return acc
