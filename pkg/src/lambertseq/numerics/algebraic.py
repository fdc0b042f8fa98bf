"""Algebraic numbers as certified root balls of a monic integer
polynomial, with the Pisot-style admissibility classification used by
the rest of the package.

Irreducibility of the defining polynomial is deliberately NOT checked:
every operation works literally with the given polynomial's root
multiset.  Callers who want honest field-theoretic norms must pass the
minimal polynomial; with a reducible polynomial the "conjugates" are
simply all roots, and the classification applies to that root set.
"""

from __future__ import annotations

import enum
from fractions import Fraction

from ..errors import ConfigError, DomainError, PrecisionError
from .balls import BallComplex, BallReal, DEFAULT_PREC
from .polyroots import MonicIntPolynomial, isolate_roots, flat_conjugates


class Classification(enum.Enum):
    PISOT = "Pisot"
    COMPLEX_PISOT = "ComplexPisot"
    NOT_ADMISSIBLE = "NotAdmissible"

    def __str__(self):
        return self.value


def _classify(conjugates, root_index, partner_index):
    """Strict ball decision procedure.  Ties against the unit circle or
    an undecidable sign raise PrecisionError rather than guessing."""
    alpha = conjugates[root_index]
    ab = abs(alpha)
    if not ab.strictly_greater(1):
        if ab.strictly_less(1):
            return Classification.NOT_ADMISSIBLE
        raise PrecisionError("|alpha| vs 1 undecided at this precision")
    for i, c in enumerate(conjugates):
        if i == root_index or (partner_index is not None and i == partner_index):
            continue
        m = abs(c)
        if m.strictly_less(1):
            continue
        if m.lower() >= 1:
            return Classification.NOT_ADMISSIBLE
        raise PrecisionError("conjugate modulus vs 1 undecided at this precision")
    if alpha.is_real:
        if alpha.real.strictly_greater(0):
            cls = Classification.PISOT
        elif alpha.real.strictly_less(0):
            # literal rule: admissible alpha must be real positive or
            # non-real; a real negative root is rejected here
            return Classification.NOT_ADMISSIBLE
        else:
            raise PrecisionError("sign of alpha undecided")
    else:
        cls = Classification.COMPLEX_PISOT
    if not ab.pow_int(5).strictly_greater(2):
        raise PrecisionError("|alpha|^5 > 2 not certifiable at this precision")
    return cls


class AlgebraicNumber:
    """A distinguished certified root of a monic integer polynomial
    together with all of its fellow roots."""

    __slots__ = (
        "minimal_poly",
        "root_index",
        "conjugates",
        "classification",
        "prec",
        "_partner",
        "_isreal",
        "_selector",
    )

    def __init__(self, minimal_poly, root="largest-modulus", prec=DEFAULT_PREC):
        if not isinstance(minimal_poly, MonicIntPolynomial):
            minimal_poly = MonicIntPolynomial(minimal_poly)
        rootballs = isolate_roots(minimal_poly, prec)
        flat, partner, isreal = flat_conjugates(rootballs)
        idx = self._resolve_root(flat, partner, isreal, root)
        object.__setattr__(self, "minimal_poly", minimal_poly)
        object.__setattr__(self, "root_index", idx)
        object.__setattr__(self, "conjugates", tuple(flat))
        object.__setattr__(self, "prec", prec)
        object.__setattr__(self, "_partner", tuple(partner))
        object.__setattr__(self, "_isreal", tuple(isreal))
        object.__setattr__(self, "_selector", root)
        object.__setattr__(
            self, "classification", _classify(flat, idx, partner[idx])
        )

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraicNumber is immutable")

    @staticmethod
    def _resolve_root(flat, partner, isreal, root):
        if isinstance(root, int):
            if not 0 <= root < len(flat):
                raise ConfigError(f"root index {root} out of range")
            return root
        if root == "largest-real":
            cands = [i for i in range(len(flat)) if isreal[i]]
            if not cands:
                raise ConfigError("polynomial has no certified real root")
            return max(cands, key=lambda i: flat[i].real.mid)
        if root != "largest-modulus":
            raise ConfigError(f"unknown root selector {root!r}")
        mods = [abs(c) for c in flat]
        cands = list(range(len(flat)))
        # drop anything strictly below some other candidate
        maximal = [
            i
            for i in cands
            if not any(mods[i].strictly_less(mods[j]) for j in cands if j != i)
        ]
        pos_real = [i for i in maximal if isreal[i] and flat[i].real.mid > 0]
        if pos_real:
            return max(pos_real, key=lambda i: flat[i].real.mid)
        upper = [i for i in maximal if not isreal[i] and flat[i].imag.mid > 0]
        if upper:
            return max(upper, key=lambda i: (flat[i].real.mid, flat[i].imag.mid))
        neg_real = [i for i in maximal if isreal[i]]
        if neg_real:
            return min(neg_real, key=lambda i: flat[i].real.mid)
        raise PrecisionError("largest-modulus root not decidable at this precision")

    # views ------------------------------------------------------------

    @property
    def degree(self) -> int:
        return self.minimal_poly.degree

    @property
    def alpha(self) -> BallComplex:
        return self.conjugates[self.root_index]

    @property
    def is_real(self) -> bool:
        return self._isreal[self.root_index]

    @property
    def alpha_real(self) -> BallReal:
        if not self.is_real:
            raise DomainError("alpha is not certified real")
        return self.alpha.real

    @property
    def partner_index(self):
        return self._partner[self.root_index]

    def abs_alpha(self) -> BallReal:
        return abs(self.alpha)

    @property
    def admissible(self) -> bool:
        return self.classification is not Classification.NOT_ADMISSIBLE

    def at_precision(self, prec) -> "AlgebraicNumber":
        return AlgebraicNumber(self.minimal_poly, self._selector, prec)

    def other_conjugates(self):
        """Embedding indices other than the root and its complex
        conjugate partner."""
        skip = {self.root_index}
        if self.partner_index is not None:
            skip.add(self.partner_index)
        return [i for i in range(self.degree) if i not in skip]

    def __repr__(self):
        return (
            f"AlgebraicNumber(poly={list(self.minimal_poly.coeffs)}, "
            f"root_index={self.root_index}, classification={self.classification})"
        )

    def to_json(self) -> dict:
        return {
            "poly": self.minimal_poly.to_json(),
            "root_index": self.root_index,
            "classification": str(self.classification),
            "prec": self.prec,
            "alpha": self.alpha.to_json(),
        }


def classify_pisot(a: AlgebraicNumber) -> Classification:
    """Classification of the distinguished root; computed rigorously at
    construction time, so this is a plain accessor."""
    if not isinstance(a, AlgebraicNumber):
        raise ConfigError("classify_pisot expects an AlgebraicNumber")
    return a.classification


def _power_basis_eval(coords, conj: BallComplex) -> BallComplex:
    acc = BallComplex.exact(0, 0, conj.prec)
    for c in reversed(coords):
        acc = acc * conj + BallComplex.exact(c, 0, conj.prec)
    return acc


def field_norm(element_coords, a: AlgebraicNumber) -> BallReal:
    """Product over all embeddings of sum_t coords[t] alpha^t.

    Rational coordinates are taken exactly.  The result ball contains
    the true norm; for algebraic-integer inputs with an irreducible
    polynomial that value is a rational integer.
    """
    if not isinstance(a, AlgebraicNumber):
        raise ConfigError("field_norm expects an AlgebraicNumber")
    coords = [Fraction(c) for c in element_coords]
    if len(coords) != a.degree:
        raise ConfigError(
            f"need exactly {a.degree} power-basis coordinates, got {len(coords)}"
        )
    if not a.admissible:
        raise DomainError("field_norm requires an admissible alpha")
    prod = BallComplex.exact(1, 0, a.prec)
    for conj in a.conjugates:
        prod = prod * _power_basis_eval(coords, conj)
    if not prod.imag.contains_zero():
        raise PrecisionError("norm ball drifted off the real axis")
    return prod.real
