"""Coprime odd sequences: generation, validation, residue splitting,
and rigorous tail bounds.

Three families are supported.  PrimePower(m) is the m-th powers of the
odd primes (m >= 2 so the reciprocal sum converges); SuperPrime is the
prime-indexed primes p_{p_l}; Explicit wraps a caller-supplied list.
A min_term filter drops every term <= min_term, which is how the
"all terms exceed 64" normalization is realized downstream.

Tail bounds returned here are balls [exact partial sum, partial sum +
closed-form overbound], so the lower endpoint is a certified witness
and the upper endpoint a certified bound on the full tail.
"""

from __future__ import annotations

import math
import threading
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConfigError, SupplyError
from .numerics.balls import BallReal, DEFAULT_PREC


# --- shared prime cache ----------------------------------------------

_prime_lock = threading.Lock()
_primes: list[int] = []
_prime_limit = 1


def _sieve(limit: int) -> list[int]:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).tolist()


def _grow_to_limit(limit: int):
    global _primes, _prime_limit
    with _prime_lock:
        if limit > _prime_limit:
            _prime_limit = max(limit, 2 * _prime_limit, 1 << 12)
            _primes = _sieve(_prime_limit)


def _grow_to_count(count: int):
    global _primes, _prime_limit
    while len(_primes) < count:
        # p_n < n (ln n + ln ln n) for n >= 6; double as fallback
        n = max(count, 6)
        est = int(n * (math.log(n) + math.log(math.log(n)))) + 10
        _grow_to_limit(max(est, 2 * _prime_limit))


def nth_prime(i: int) -> int:
    """1-based prime index: nth_prime(1) = 2."""
    if i < 1:
        raise ConfigError("prime index must be >= 1")
    _grow_to_count(i)
    return _primes[i - 1]


def primes_upto(limit: int) -> list[int]:
    _grow_to_limit(limit)
    return _primes[: bisect_right(_primes, limit)]


# --- sequence kinds --------------------------------------------------


@dataclass(frozen=True)
class PrimePower:
    m: int

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 2:
            raise ConfigError("PrimePower needs integer exponent m >= 2")


@dataclass(frozen=True)
class SuperPrime:
    pass


@dataclass(frozen=True)
class Explicit:
    terms: tuple
    tail_bound: Fraction | None = None

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(int(t) for t in self.terms))
        if self.tail_bound is not None:
            tb = Fraction(self.tail_bound)
            if tb <= 0:
                raise ConfigError("explicit tail bound must be strictly positive")
            object.__setattr__(self, "tail_bound", tb)


@dataclass(frozen=True)
class ResidueSplit:
    E1: tuple
    E3: tuple


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    failures: tuple
    terms_checked: int


class CoprimeSequence:
    """Materialized prefix of a coprime odd sequence.

    Extension mutates the internal prefix under a lock (single-writer
    discipline); reads of snapshots are safe anywhere.
    """

    def __init__(self, kind, min_term=None):
        if not isinstance(kind, (PrimePower, SuperPrime, Explicit)):
            raise ConfigError(f"unknown sequence kind {kind!r}")
        if min_term is not None and (not isinstance(min_term, int) or min_term < 0):
            raise ConfigError("min_term must be a nonnegative int")
        self.kind = kind
        self.min_term = min_term
        self._lock = threading.Lock()
        self._fam: list[int] = []  # family values including filtered-out ones
        if isinstance(kind, Explicit):
            self._fam = list(kind.terms)

    # --- materialization ---------------------------------------------

    def _start(self) -> int:
        """Index into the family list of the first kept term."""
        if self.min_term is None:
            return 0
        return bisect_right(self._fam, self.min_term)

    def _extend(self, fam_count: int):
        if isinstance(self.kind, Explicit):
            if fam_count > len(self._fam):
                raise SupplyError(
                    "explicit terms",
                    f"need {fam_count} family terms, have {len(self._fam)}",
                )
            return
        while len(self._fam) < fam_count:
            nxt = len(self._fam) + 1
            if isinstance(self.kind, PrimePower):
                # family index l uses the (l+1)-th prime, skipping 2
                self._fam.append(nth_prime(nxt + 1) ** self.kind.m)
            else:
                self._fam.append(nth_prime(nth_prime(nxt)))

    def ensure_count(self, count: int):
        """Materialize at least `count` kept terms."""
        if count < 0:
            raise ConfigError("count must be >= 0")
        with self._lock:
            while len(self._fam) - self._start() < count:
                need = self._start() + count
                try:
                    self._extend(need)
                except SupplyError:
                    raise
                if isinstance(self.kind, Explicit):
                    if len(self._fam) - self._start() < count:
                        raise SupplyError(
                            "explicit terms",
                            f"only {len(self._fam) - self._start()} terms above "
                            f"min_term {self.min_term}",
                        )
                    break

    def ensure_value(self, value: int):
        """Materialize every kept term <= value."""
        with self._lock:
            if isinstance(self.kind, Explicit):
                return
            while not self._fam or self._fam[-1] <= value:
                self._extend(len(self._fam) + 64)

    @property
    def terms(self) -> tuple:
        with self._lock:
            return tuple(self._fam[self._start() :])

    def term(self, i: int) -> int:
        """1-based kept-term accessor."""
        if i < 1:
            raise ConfigError("term index is 1-based")
        self.ensure_count(i)
        return self._fam[self._start() + i - 1]

    def count_materialized(self) -> int:
        with self._lock:
            return len(self._fam) - self._start()

    def values_upto(self, value: int) -> list[int]:
        self.ensure_value(value)
        ts = self.terms
        return list(ts[: bisect_right(ts, value)])

    def index_of(self, value: int) -> int:
        """1-based index of a kept term by value."""
        ts = self.terms
        i = bisect_right(ts, value)
        if i == 0 or ts[i - 1] != value:
            raise ConfigError(f"{value} is not a materialized term")
        return i

    # --- spec operations ---------------------------------------------

    def validate(self) -> ValidationReport:
        ts = self.terms
        failures = []
        for i, t in enumerate(ts):
            if t <= 1:
                failures.append(f"term {t} not > 1")
            if t % 2 == 0:
                failures.append(f"term {t} is even")
            if i and ts[i - 1] >= t:
                failures.append(f"terms {ts[i - 1]}, {t} not strictly increasing")
            if self.min_term is not None and t <= self.min_term:
                failures.append(f"term {t} does not exceed min_term {self.min_term}")
        for i in range(len(ts)):
            for j in range(i + 1, len(ts)):
                g = math.gcd(ts[i], ts[j])
                if g != 1:
                    failures.append(f"gcd({ts[i]}, {ts[j]}) = {g}")
        return ValidationReport(ok=not failures, failures=tuple(failures), terms_checked=len(ts))

    def split_mod4(self) -> ResidueSplit:
        ts = self.terms
        return ResidueSplit(
            E1=tuple(t for t in ts if t % 4 == 1),
            E3=tuple(t for t in ts if t % 4 == 3),
        )

    def tail_sum_bound(self, from_index: int, prec: int = DEFAULT_PREC) -> BallReal:
        """Ball containing sum_{l > from_index} 1/n_l (1-based kept
        indices).  Lower endpoint: exact materialized partial sum.
        Upper endpoint: partial sum plus a provable family tail bound.
        """
        if from_index < 0:
            raise ConfigError("from_index must be >= 0")
        if isinstance(self.kind, Explicit):
            if self.kind.tail_bound is None:
                raise ConfigError(
                    "explicit sequences need a dominating tail bound for tail sums"
                )
            ts = self.terms
            suffix = ts[from_index:] if from_index < len(ts) else ()
            partial = sum((Fraction(1, t) for t in suffix), Fraction(0))
            return _interval_ball(partial, partial + self.kind.tail_bound, prec)
        self.ensure_count(max(from_index, 8))
        ts = self.terms
        partial = sum((Fraction(1, t) for t in ts[from_index:]), Fraction(0))
        bound = self._family_tail_bound(prec)
        return _interval_ball(partial, partial + bound, prec)

    def _family_tail_bound(self, prec: int) -> Fraction:
        """Overbound on the reciprocal sum of every family term beyond
        the materialized ones."""
        if isinstance(self.kind, PrimePower):
            m = self.kind.m
            # last family value is q^m; later values lie in {n^m : n > q},
            # and sum_{n>=N} n^-m <= N^-(m-2)/(N-1) by 1/n^2 <= 1/(n(n-1))
            q = round(self._fam[-1] ** (1.0 / m))
            while q**m < self._fam[-1]:
                q += 1
            while q**m > self._fam[-1]:
                q -= 1
            assert q**m == self._fam[-1]
            N = q + 1
            return Fraction(1, N ** (m - 2) * (N - 1))
        # super-primes: p_{p_l} > l (log l)^2 for l >= 3 via Rosser's
        # p_n > n log n, so the tail after family index L is below
        # integral_L^inf dt/(t (log t)^2) = 1/log L
        L = len(self._fam)
        if L < 3:
            raise ConfigError("super-prime tail bound needs >= 3 materialized terms")
        inv_log = 1 / BallReal.exact(L, prec).log()
        return inv_log.to_fraction_bounds()[1]

    def spec_string(self) -> str:
        if isinstance(self.kind, PrimePower):
            base = f"primepower:{self.kind.m}:{self.count_materialized()}"
        elif isinstance(self.kind, SuperPrime):
            base = f"superprime:{self.count_materialized()}"
        else:
            base = f"explicit:{len(self.kind.terms)}"
        if self.min_term is not None:
            base += f":min{self.min_term}"
        return base

    def __repr__(self):
        return f"CoprimeSequence({self.kind!r}, min_term={self.min_term})"


def _interval_ball(lo: Fraction, hi: Fraction, prec: int) -> BallReal:
    mid = (lo + hi) / 2
    rad = (hi - lo) / 2
    return BallReal.from_midrad(mid, rad, prec)


def generate(kind, count: int, min_term: int | None = None) -> CoprimeSequence:
    """First `count` terms of the family with value > min_term."""
    if not isinstance(count, int) or count < 1:
        raise ConfigError("count must be a positive int")
    seq = CoprimeSequence(kind, min_term)
    seq.ensure_count(count)
    return seq


def from_spec(spec: str, tail_bound=None) -> CoprimeSequence:
    """Parse a CLI sequence description.

    Forms: primepower:m:count[:minN], superprime:count[:minN],
    file:PATH (one integer per line; tail_bound applies to file/explicit).
    """
    parts = spec.split(":")
    try:
        if parts[0] == "primepower":
            m, count = int(parts[1]), int(parts[2])
            min_term = _parse_min(parts[3]) if len(parts) > 3 else None
            return generate(PrimePower(m), count, min_term)
        if parts[0] == "superprime":
            count = int(parts[1])
            min_term = _parse_min(parts[2]) if len(parts) > 2 else None
            return generate(SuperPrime(), count, min_term)
        if parts[0] == "file":
            path = ":".join(parts[1:])
            with open(path) as fh:
                terms = [int(line) for line in fh if line.strip()]
            tb = Fraction(tail_bound) if tail_bound is not None else None
            seq = CoprimeSequence(Explicit(tuple(terms), tb))
            return seq
    except (IndexError, ValueError, OSError) as exc:
        raise ConfigError(f"bad sequence spec {spec!r}: {exc}") from exc
    raise ConfigError(f"bad sequence spec {spec!r}")


def _parse_min(part: str) -> int:
    if not part.startswith("min"):
        raise ConfigError(f"expected minN suffix, got {part!r}")
    return int(part[3:])
