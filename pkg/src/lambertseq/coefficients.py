"""Divisor-counting coefficients against a coprime odd sequence.

a1(n) and a3(n) count the sequence terms dividing n that are congruent
to 1 and 3 mod 4; a(n) is their sum.  The residue-projected families:

    b_j(n) = a1(n) if n == j (mod 4), a3(n) if n == j+2 (mod 4), else 0
    c_j(n) = a(n)  if n == j (mod 4), else 0

for j in 1..4.  Point queries use trial division over the materialized
terms; bulk tables sieve one pass per term.  Both routes are exact and
cross-checked in the tests.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .sequences import CoprimeSequence


def _check_j(j):
    if j not in (1, 2, 3, 4):
        raise ConfigError(f"coefficient index j must be 1..4, got {j!r}")


def count_divisors(n: int, seq: CoprimeSequence) -> tuple[int, int]:
    """(a1, a3) for one n by trial division; exact."""
    if not isinstance(n, int) or n < 1:
        raise ConfigError("n must be a positive int")
    a1 = a3 = 0
    for t in seq.values_upto(n):
        if n % t == 0:
            if t % 4 == 1:
                a1 += 1
            else:
                a3 += 1
    return a1, a3


def _project_b(j: int, n: int, a1: int, a3: int) -> int:
    r = n % 4
    if r == j % 4:
        return a1
    if r == (j + 2) % 4:
        return a3
    return 0


def b(j: int, n: int, seq: CoprimeSequence) -> int:
    _check_j(j)
    a1, a3 = count_divisors(n, seq)
    return _project_b(j, n, a1, a3)


def c(j: int, n: int, seq: CoprimeSequence) -> int:
    _check_j(j)
    if n % 4 != j % 4:
        return 0
    a1, a3 = count_divisors(n, seq)
    return a1 + a3


@dataclass(frozen=True)
class CoefficientTable:
    """Sieved a1/a3 counts for 1 <= n <= limit; immutable after build."""

    seq_spec: str
    limit: int
    a1: np.ndarray
    a3: np.ndarray

    def _check_n(self, n):
        if not 1 <= n <= self.limit:
            raise ConfigError(f"n must be in 1..{self.limit}, got {n}")

    def counts(self, n: int) -> tuple[int, int]:
        self._check_n(n)
        return int(self.a1[n]), int(self.a3[n])

    def a(self, n: int) -> int:
        a1, a3 = self.counts(n)
        return a1 + a3

    def b(self, j: int, n: int) -> int:
        _check_j(j)
        a1, a3 = self.counts(n)
        return _project_b(j, n, a1, a3)

    def c(self, j: int, n: int) -> int:
        _check_j(j)
        self._check_n(n)
        if n % 4 != j % 4:
            return 0
        return self.a(n)

    def b_row(self, j: int) -> np.ndarray:
        """b_j(n) for all n as a vector (index 0 unused)."""
        _check_j(j)
        n = np.arange(self.limit + 1, dtype=np.int64)
        out = np.zeros(self.limit + 1, dtype=np.int32)
        out[n % 4 == j % 4] = self.a1[n % 4 == j % 4]
        out[n % 4 == (j + 2) % 4] = self.a3[n % 4 == (j + 2) % 4]
        out[0] = 0
        return out

    def c_row(self, j: int) -> np.ndarray:
        """c_j(n) for all n as a vector (index 0 unused)."""
        _check_j(j)
        n = np.arange(self.limit + 1, dtype=np.int64)
        out = np.zeros(self.limit + 1, dtype=np.int32)
        mask = n % 4 == j % 4
        out[mask] = (self.a1 + self.a3)[mask]
        out[0] = 0
        return out

    def write_csv(self, fh) -> None:
        w = csv.writer(fh)
        w.writerow(["n", "a1", "a3", "b1", "b2", "b3", "b4"])
        for n in range(1, self.limit + 1):
            a1, a3 = int(self.a1[n]), int(self.a3[n])
            row = [n, a1, a3] + [_project_b(j, n, a1, a3) for j in (1, 2, 3, 4)]
            w.writerow(row)

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def build_table(seq: CoprimeSequence, limit: int) -> CoefficientTable:
    """Sieve counts for all n <= limit in one pass per sequence term."""
    if not isinstance(limit, int) or limit < 1:
        raise ConfigError("limit must be a positive int")
    a1 = np.zeros(limit + 1, dtype=np.int32)
    a3 = np.zeros(limit + 1, dtype=np.int32)
    for t in seq.values_upto(limit):
        if t % 4 == 1:
            a1[t::t] += 1
        else:
            a3[t::t] += 1
    # counts are bounded by log_3 n; int32 overflow would need
    # astronomically many terms, but fail loudly if it ever happens
    if limit >= 1 and (int(a1.max(initial=0)) >= 2**31 - 1 or int(a3.max(initial=0)) >= 2**31 - 1):
        raise ConfigError("coefficient count overflow")
    return CoefficientTable(seq_spec=seq.spec_string(), limit=limit, a1=a1, a3=a3)
