"""Congruence-ladder construction over a coprime odd sequence.

Builds the window system X = 0 (mod 4), X + m = 0 (mod product of the
terms consumed at block m) for m = 1..8k-4, where the number of terms
consumed per block follows the 8q+r block pattern: 2^q new terms per
block below the top, k^r 2^(k-1) in the last four u-side blocks, and
2^(k-1) on the v-side top blocks.  Two modes:

  two-class: terms split by residue mod 4 into u (1 mod 4) and
             v (3 mod 4), each side with its own ladder;
  one-class: every term is a u term, no v side.

Collision counts s_m (old terms dividing X + m) are computed without
knowing X: a term consumed at block m' divides X + m iff it divides
m - m'.  That makes the build a deterministic one-pass algorithm; the
identity is re-validated after the CRT solve by direct trial division.

The solution eta_k, the full modulus A_k, and certified log-space
bounds for delta_k, nu_k and B_k are returned; nu_k and B_k are never
materialized (they are astronomically large even for k = 2).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import gcd

import gmpy2
import numpy as np

from .errors import ConfigError, ConstructionError, SupplyError
from .numerics import BallReal
from .sequences import CoprimeSequence

BOUND_PREC = 96  # precision for the log-space bound balls
TOY_LIMIT = 10**7  # ceiling on A*B for the brute-force oracles


class Mode(enum.Enum):
    TWO_CLASS = "two-class"
    ONE_CLASS = "one-class"

    def __str__(self):
        return self.value


def _as_mode(mode) -> Mode:
    if isinstance(mode, Mode):
        return mode
    try:
        return Mode(mode)
    except ValueError as exc:
        raise ConfigError(f"unknown mode {mode!r}") from exc


def block_qr(m: int, k: int) -> tuple[int, int]:
    """(q, r) with m = 8q + r; q = k-1 and r in 1..4 for the last four."""
    if not 1 <= m <= 8 * k - 4:
        raise ConfigError(f"m must be in 1..{8 * k - 4}, got {m}")
    if m <= 8 * k - 8:
        q = (m - 1) // 8
        return q, m - 8 * q
    return k - 1, m - 8 * (k - 1)


def block_pattern(m: int, k: int, side: str) -> int:
    """Prescribed number of side-terms dividing X+m (the C1/C2 counts)."""
    q, r = block_qr(m, k)
    if q == k - 1:
        return k**r * 2 ** (k - 1) if side == "u" else 2 ** (k - 1)
    return 2**q


def prescribed_value(mode, k: int, j: int, m: int) -> int:
    """The window coefficient value the construction prescribes at
    offset m for index j (two-class: b_j; one-class: c_j)."""
    mode = _as_mode(mode)
    if j not in (1, 2, 3, 4):
        raise ConfigError(f"j must be 1..4, got {j!r}")
    q, r = block_qr(m, k)
    if mode is Mode.TWO_CLASS:
        if (r - j) % 2 != 0:
            return 0
    else:
        if (r - j) % 4 != 0:
            return 0
    if q == k - 1 and (r - j) % 4 == 0:
        return k**r * 2 ** (k - 1)
    return 2**q


def crt_solve(congruences) -> tuple[int, int]:
    """(residue, modulus) solving X = r_i (mod m_i), pairwise coprime."""
    res, mod = gmpy2.mpz(0), gmpy2.mpz(1)
    for r, m in congruences:
        m = gmpy2.mpz(m)
        if m < 1:
            raise ConfigError("moduli must be positive")
        if gmpy2.gcd(mod, m) != 1:
            raise ConstructionError(f"moduli are not pairwise coprime at {int(m)}")
        inv = gmpy2.invert(mod, m)
        step = ((gmpy2.mpz(r) - res) * inv) % m
        res, mod = res + mod * step, mod * m
    return int(res % mod), int(mod)


class _ClassSupply:
    """Increasing terms of one residue class, pulled from the sequence
    on demand; a bounded scan keeps a dried-up class from looping."""

    def __init__(self, seq, residue, scan_limit, label):
        self.seq = seq
        self.residue = residue
        self.scan_limit = scan_limit
        self.label = label
        self.found = []
        self._cursor = 0

    def get(self, i: int) -> int:
        misses = 0
        while len(self.found) < i:
            self._cursor += 1
            try:
                t = self.seq.term(self._cursor)
            except SupplyError as exc:
                if self.residue is None:
                    raise
                raise SupplyError(self.label, f"class ran dry: {exc}") from exc
            if self.residue is None or t % 4 == self.residue:
                self.found.append(t)
                misses = 0
            else:
                misses += 1
                if misses > self.scan_limit:
                    raise SupplyError(
                        self.label,
                        f"no term = {self.residue} (mod 4) in the last "
                        f"{self.scan_limit} candidates",
                    )
        return self.found[i - 1]


@dataclass(frozen=True)
class CongruenceConstruction:
    """Built ladder: arrays are index-aligned (position 0 unused for x,
    y, s, t), consumed terms listed in consumption order with their
    block assignments."""

    k: int
    mode: Mode
    x: tuple
    y: tuple
    s: tuple
    t: tuple
    u_terms: tuple
    u_assign: tuple
    v_terms: tuple
    v_assign: tuple
    A_k: int
    eta_k: int
    mu_k: int
    log_delta_k: BallReal
    log_nu_k_lower: BallReal
    log_Bk_lower: BallReal
    seq_spec: str

    @property
    def window(self) -> int:
        return 8 * self.k - 4

    def block_terms(self, m: int, side: str = "u"):
        terms, assign = (
            (self.u_terms, self.u_assign) if side == "u" else (self.v_terms, self.v_assign)
        )
        return tuple(t for t, a in zip(terms, assign) if a == m)

    def block_modulus(self, m: int) -> int:
        p = 1
        for t in self.block_terms(m, "u"):
            p *= t
        for t in self.block_terms(m, "v"):
            p *= t
        return p

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "mode": self.mode.value,
            "x": list(self.x),
            "y": list(self.y),
            "s": list(self.s),
            "t": list(self.t),
            "u_terms": list(self.u_terms),
            "u_assign": list(self.u_assign),
            "v_terms": list(self.v_terms),
            "v_assign": list(self.v_assign),
            "A_k": str(self.A_k),
            "eta_k": str(self.eta_k),
            "mu_k": self.mu_k,
            "log_delta_k": self.log_delta_k.to_json(),
            "log_nu_k_lower": self.log_nu_k_lower.to_json(),
            "log_Bk_lower": self.log_Bk_lower.to_json(),
            "seq_spec": self.seq_spec,
        }

    @classmethod
    def from_json(cls, obj) -> "CongruenceConstruction":
        return cls(
            k=int(obj["k"]),
            mode=Mode(obj["mode"]),
            x=tuple(obj["x"]),
            y=tuple(obj["y"]),
            s=tuple(obj["s"]),
            t=tuple(obj["t"]),
            u_terms=tuple(obj["u_terms"]),
            u_assign=tuple(obj["u_assign"]),
            v_terms=tuple(obj["v_terms"]),
            v_assign=tuple(obj["v_assign"]),
            A_k=int(obj["A_k"]),
            eta_k=int(obj["eta_k"]),
            mu_k=int(obj["mu_k"]),
            log_delta_k=BallReal.from_json(obj["log_delta_k"]),
            log_nu_k_lower=BallReal.from_json(obj["log_nu_k_lower"]),
            log_Bk_lower=BallReal.from_json(obj["log_Bk_lower"]),
            seq_spec=obj["seq_spec"],
        )


def _collisions(m: int, upto: int, vals, assign) -> int:
    return sum(1 for i in range(upto) if (m - assign[i]) % vals[i] == 0)


def build(k: int, seq: CoprimeSequence, mode, prec: int = BOUND_PREC, scan_limit: int = 20000) -> CongruenceConstruction:
    """Run the ladder recurrences, consume terms, solve the system.

    Raises SupplyError naming the residue class (E1/E3) that cannot
    produce its next term, ConfigError if any term is <= 64 (prune
    small terms with the sequence min_term filter first).
    """
    if not isinstance(k, int) or k < 1:
        raise ConfigError("k must be a positive int")
    mode = _as_mode(mode)
    if not isinstance(seq, CoprimeSequence):
        raise ConfigError("seq must be a CoprimeSequence")
    if seq.term(1) <= 64:
        raise ConfigError(
            "ladder needs every term > 64; rebuild the sequence with min_term >= 64"
        )
    two = mode is Mode.TWO_CLASS
    supply_u = _ClassSupply(seq, 1 if two else None, scan_limit, "E1" if two else "terms")
    supply_v = _ClassSupply(seq, 3, scan_limit, "E3") if two else None
    last = 8 * k - 4
    x, s, u_vals, u_assign = [0], [0], [], []
    y, t, v_vals, v_assign = [0], [0], [], []
    for m in range(1, last + 1):
        pat_u = block_pattern(m, k, "u")
        sm = _collisions(m, x[m - 1], u_vals, u_assign)
        if sm >= pat_u:
            raise ConstructionError(f"u-side collisions {sm} >= {pat_u} at m={m}")
        for _ in range(pat_u - sm):
            u_vals.append(supply_u.get(len(u_vals) + 1))
            u_assign.append(m)
        x.append(x[m - 1] + pat_u - sm)
        s.append(sm)
        if two:
            pat_v = block_pattern(m, k, "v")
            tm = _collisions(m, y[m - 1], v_vals, v_assign)
            if tm >= pat_v:
                raise ConstructionError(f"v-side collisions {tm} >= {pat_v} at m={m}")
            for _ in range(pat_v - tm):
                v_vals.append(supply_v.get(len(v_vals) + 1))
                v_assign.append(m)
            y.append(y[m - 1] + pat_v - tm)
            t.append(tm)
    congruences = [(0, 4)]
    congruences += [(-m, val) for val, m in zip(u_vals, u_assign)]
    congruences += [(-m, val) for val, m in zip(v_vals, v_assign)]
    eta, a_k = crt_solve(congruences)
    if not 0 <= eta < a_k:
        raise ConstructionError("CRT solution out of range")
    if two:
        mu = seq.index_of(min(u_vals[-1], v_vals[-1]))
    else:
        mu = x[-1]
    tail = seq.tail_sum_bound(mu, prec)
    log_a = BallReal.exact(a_k, prec).log()
    scaled_tail = tail * (16 * k)
    log_delta = -scaled_tail
    log_nu = BallReal.exact(128 * k, prec).log() + log_a + scaled_tail
    # log B_k >= 128 k A_k / delta_k - log A_k; the first term is linear
    # in A_k but still well inside mpfr exponent range
    log_b = BallReal.exact(128 * k * a_k, prec) * scaled_tail.exp() - log_a
    return CongruenceConstruction(
        k=k,
        mode=mode,
        x=tuple(x),
        y=tuple(y),
        s=tuple(s),
        t=tuple(t),
        u_terms=tuple(u_vals),
        u_assign=tuple(u_assign),
        v_terms=tuple(v_vals),
        v_assign=tuple(v_assign),
        A_k=a_k,
        eta_k=eta,
        mu_k=mu,
        log_delta_k=log_delta,
        log_nu_k_lower=log_nu,
        log_Bk_lower=log_b,
        seq_spec=seq.spec_string(),
    )


def check_invariants(c: CongruenceConstruction) -> None:
    """Structural re-verification from the stored arrays alone:
    recurrences, monotonicity, CRT congruences, size bounds, and the
    build-time collision counts against direct trial division by eta."""
    k, last = c.k, c.window
    if c.x[0] != 0 or (c.mode is Mode.TWO_CLASS and c.y[0] != 0):
        raise ConstructionError("ladders must start at 0")
    if list(c.x) != sorted(set(c.x)):
        raise ConstructionError("x is not strictly increasing")
    sides = [("u", c.x, c.s, c.u_terms, c.u_assign)]
    if c.mode is Mode.TWO_CLASS:
        if list(c.y) != sorted(set(c.y)):
            raise ConstructionError("y is not strictly increasing")
        sides.append(("v", c.y, c.t, c.v_terms, c.v_assign))
    prod = gmpy2.mpz(4)
    for side, arr, coll, vals, assign in sides:
        if len(vals) != arr[-1] or len(assign) != arr[-1]:
            raise ConstructionError(f"{side}-side term list length mismatch")
        if list(vals) != sorted(set(vals)):
            raise ConstructionError(f"{side}-side terms must be strictly increasing")
        for m in range(1, last + 1):
            pat = block_pattern(m, k, side)
            if coll[m] >= pat:
                raise ConstructionError(f"{side}-side collision bound fails at m={m}")
            if arr[m] - arr[m - 1] != pat - coll[m]:
                raise ConstructionError(f"{side}-side recurrence fails at m={m}")
            if m <= 64 and coll[m] != 0:
                raise ConstructionError(f"collisions below m=64 at m={m}")
            recomputed = sum(
                1 for i in range(arr[m - 1]) if (c.eta_k + m) % vals[i] == 0
            )
            if recomputed != coll[m]:
                raise ConstructionError(
                    f"{side}-side collision count at m={m}: stored {coll[m]}, "
                    f"trial division gives {recomputed}"
                )
            for val, a in zip(vals, assign):
                if a == m and (c.eta_k + m) % val != 0:
                    raise ConstructionError(f"congruence fails at m={m}, term {val}")
        for val in vals:
            prod *= val
    if int(prod) != c.A_k:
        raise ConstructionError("A_k does not match 4 * product of consumed terms")
    if not 0 <= c.eta_k < c.A_k or c.eta_k % 4 != 0:
        raise ConstructionError("eta_k out of range or not divisible by 4")
    if c.x[-1] <= k**4 * 2 ** (k - 1):
        raise ConstructionError("x_{8k-4} size bound fails")
    if c.mode is Mode.TWO_CLASS and c.y[-1] <= 2 ** (k - 1):
        raise ConstructionError("y_{8k-4} size bound fails")


@dataclass(frozen=True)
class C1C2Report:
    k: int
    mode: Mode
    gammas: tuple
    positions_checked: int
    ok: bool


def verify_c1_c2(c: CongruenceConstruction, gammas=None) -> C1C2Report:
    """Exact trial-division check of the two counting conditions plus
    the no-divisors-above-the-block claim, at each supplied gamma
    (default: eta_k and its next two translates by A_k)."""
    if gammas is None:
        gammas = (c.eta_k, c.eta_k + c.A_k, c.eta_k + 2 * c.A_k)
    positions = 0
    for gamma in gammas:
        if gamma % c.A_k != c.eta_k % c.A_k:
            raise ConfigError("gamma must be congruent to eta_k mod A_k")
        for m in range(1, c.window + 1):
            n = gamma + m
            cu = sum(1 for i in range(c.x[m]) if n % c.u_terms[i] == 0)
            if cu != block_pattern(m, c.k, "u"):
                raise ConstructionError(
                    f"u-count at m={m} is {cu}, expected {block_pattern(m, c.k, 'u')}"
                )
            for i in range(c.x[m], len(c.u_terms)):
                if n % c.u_terms[i] == 0:
                    raise ConstructionError(
                        f"u_{i + 1} = {c.u_terms[i]} divides gamma+{m} above block"
                    )
            if c.mode is Mode.TWO_CLASS:
                cv = sum(1 for i in range(c.y[m]) if n % c.v_terms[i] == 0)
                if cv != block_pattern(m, c.k, "v"):
                    raise ConstructionError(
                        f"v-count at m={m} is {cv}, "
                        f"expected {block_pattern(m, c.k, 'v')}"
                    )
                for i in range(c.y[m], len(c.v_terms)):
                    if n % c.v_terms[i] == 0:
                        raise ConstructionError(
                            f"v_{i + 1} = {c.v_terms[i]} divides gamma+{m} above block"
                        )
            positions += 1
    return C1C2Report(
        k=c.k, mode=c.mode, gammas=tuple(gammas), positions_checked=positions, ok=True
    )


@dataclass(frozen=True)
class WindowCertificate:
    """Observed divisor structure of one window gamma+1..gamma+8k-4.

    extras[m-1] lists materialized sequence terms outside the consumed
    prefix that divide gamma+m; the prescribed pattern can only be
    guaranteed when that list is empty."""

    gamma: int
    k: int
    mode: Mode
    j_range: tuple
    u_counts: tuple
    v_counts: tuple
    extras: tuple
    observed: tuple
    prescribed: tuple
    pattern_match: tuple
    horizon: int

    @property
    def extras_empty(self) -> bool:
        return all(not e for e in self.extras)

    @property
    def full_match(self) -> bool:
        return all(all(row) for row in self.pattern_match)

    def matched(self, j: int, m: int) -> bool:
        return self.pattern_match[self.j_range.index(j)][m - 1]

    def to_json(self) -> dict:
        return {
            "gamma": str(self.gamma),
            "k": self.k,
            "mode": self.mode.value,
            "j_range": list(self.j_range),
            "u_counts": list(self.u_counts),
            "v_counts": list(self.v_counts),
            "extras": [list(e) for e in self.extras],
            "observed": [list(row) for row in self.observed],
            "prescribed": [list(row) for row in self.prescribed],
            "pattern_match": [list(row) for row in self.pattern_match],
            "horizon": self.horizon,
            "full_match": self.full_match,
        }


def certify_window(c: CongruenceConstruction, gamma: int, seq: CoprimeSequence, j_range=(1, 2, 3, 4)) -> WindowCertificate:
    """Trial-divide gamma+1..gamma+8k-4 by every materialized term and
    compare the resulting coefficient values to the prescribed ones."""
    if gamma % c.A_k != c.eta_k % c.A_k or gamma < c.eta_k:
        raise ConfigError("gamma must be eta_k + i*A_k with i >= 0")
    j_range = tuple(j_range)
    for j in j_range:
        if j not in (1, 2, 3, 4):
            raise ConfigError(f"j must be 1..4, got {j!r}")
    consumed = set(c.u_terms) | set(c.v_terms)
    horizon_terms = seq.terms
    horizon = horizon_terms[-1] if horizon_terms else 0
    u_counts, v_counts, extras = [], [], []
    a1a3 = []
    for m in range(1, c.window + 1):
        n = gamma + m
        cu = sum(1 for tval in c.u_terms if n % tval == 0)
        cv = sum(1 for tval in c.v_terms if n % tval == 0)
        ex = tuple(
            tval for tval in horizon_terms if tval not in consumed and n % tval == 0
        )
        u_counts.append(cu)
        v_counts.append(cv)
        extras.append(ex)
        a1 = cu + sum(1 for e in ex if e % 4 == 1)
        a3 = cv + sum(1 for e in ex if e % 4 == 3)
        if c.mode is Mode.ONE_CLASS:
            a1, a3 = a1 + a3, 0
        a1a3.append((a1, a3))
    observed, prescribed, match = [], [], []
    for j in j_range:
        obs_row, pre_row, match_row = [], [], []
        for m in range(1, c.window + 1):
            a1, a3 = a1a3[m - 1]
            nmod = (gamma + m) % 4
            if c.mode is Mode.TWO_CLASS:
                if nmod == j % 4:
                    val = a1
                elif nmod == (j + 2) % 4:
                    val = a3
                else:
                    val = 0
            else:
                val = a1 if nmod == j % 4 else 0
            pre = prescribed_value(c.mode, c.k, j, m)
            obs_row.append(val)
            pre_row.append(pre)
            match_row.append(val == pre)
        observed.append(tuple(obs_row))
        prescribed.append(tuple(pre_row))
        match.append(tuple(match_row))
    return WindowCertificate(
        gamma=gamma,
        k=c.k,
        mode=c.mode,
        j_range=j_range,
        u_counts=tuple(u_counts),
        v_counts=tuple(v_counts),
        extras=tuple(extras),
        observed=tuple(observed),
        prescribed=tuple(prescribed),
        pattern_match=tuple(match),
        horizon=horizon,
    )


@dataclass(frozen=True)
class OracleCount:
    hit_windows: int
    formula_value: int


def inclusion_exclusion_oracle(A: int, eta: int, B: int, window: int, D) -> OracleCount:
    """Brute-force |H_D| over gamma_i = A i + eta, i = 1..B, against
    the exact formula window^|D| * B / prod(D); toy scale only."""
    D = list(D)
    for name, v in (("A", A), ("B", B), ("window", window)):
        if not isinstance(v, int) or v < 1:
            raise ConfigError(f"{name} must be a positive int")
    if not isinstance(eta, int) or eta < 0:
        raise ConfigError("eta must be a nonnegative int")
    if A * B > TOY_LIMIT:
        raise ConfigError(f"A*B exceeds the toy limit {TOY_LIMIT}")
    for idx, d in enumerate(D):
        if not isinstance(d, int) or d <= window:
            raise ConfigError("every d must be an int greater than the window")
        if gcd(d, A) != 1:
            raise ConfigError("every d must be coprime to A")
        if B % d != 0:
            raise ConfigError("every d must divide B")
        for other in D[idx + 1 :]:
            if gcd(d, other) != 1:
                raise ConfigError("D must be pairwise coprime")
    i = np.arange(1, B + 1, dtype=np.int64)
    base = A * i + eta
    hit = np.ones(B, dtype=bool)
    for d in D:
        has_multiple = np.zeros(B, dtype=bool)
        for off in range(1, window + 1):
            has_multiple |= (base + off) % d == 0
        hit &= has_multiple
    count = int(hit.sum())
    formula = window ** len(D) * B
    for d in D:
        formula //= d
    if count != formula:
        raise ConstructionError(
            f"inclusion-exclusion mismatch: brute {count}, formula {formula}"
        )
    return OracleCount(hit_windows=count, formula_value=formula)


@dataclass(frozen=True)
class CensusResult:
    hit_windows: int
    bound: int
    terms_considered: tuple


def tail_divisor_census(A: int, eta: int, B_toy: int, window: int, seq: CoprimeSequence, threshold_index: int) -> CensusResult:
    """Count windows containing a multiple of some term beyond the
    threshold index, and check the floor-sum overbound."""
    for name, v in (("A", A), ("B_toy", B_toy), ("window", window)):
        if not isinstance(v, int) or v < 1:
            raise ConfigError(f"{name} must be a positive int")
    if not isinstance(eta, int) or eta < 0:
        raise ConfigError("eta must be a nonnegative int")
    if not isinstance(threshold_index, int) or threshold_index < 0:
        raise ConfigError("threshold_index must be a nonnegative int")
    if A * B_toy > TOY_LIMIT:
        raise ConfigError(f"A*B_toy exceeds the toy limit {TOY_LIMIT}")
    reach = A * B_toy + eta + window
    tail_terms = seq.values_upto(reach)[threshold_index:]
    for d in tail_terms:
        if gcd(d, A) != 1:
            raise ConfigError("tail terms must be coprime to A")
    i = np.arange(1, B_toy + 1, dtype=np.int64)
    base = A * i + eta
    hit = np.zeros(B_toy, dtype=bool)
    for d in tail_terms:
        for off in range(1, window + 1):
            hit |= (base + off) % d == 0
    count = int(hit.sum())
    bound = window * sum(B_toy // d + 1 for d in tail_terms)
    if tail_terms and count > bound:
        raise ConstructionError(f"census {count} exceeds the bound {bound}")
    return CensusResult(
        hit_windows=count, bound=bound, terms_considered=tuple(tail_terms)
    )
