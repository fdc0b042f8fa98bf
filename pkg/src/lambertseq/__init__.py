"""Verified evaluation of Lambert-type series over coprime odd
sequences, congruence-ladder constructions, and integer relation
probes.

The package is organized as a stack: ball arithmetic and certified
algebraic numbers at the bottom (`numerics`), then sequence families,
divisor-counting coefficients, series evaluators, the congruence-ladder
construction with its verification toolkit, window closed forms and
norm plumbing (`theoremlab`), and an exact-LLL relation probe on top.
"""

__version__ = "0.1.0"

from .numerics import (
    AlgebraicNumber,
    BallComplex,
    BallReal,
    Classification,
    MonicIntPolynomial,
)
from .sequences import CoprimeSequence, Explicit, PrimePower, SuperPrime, from_spec, generate
from .coefficients import build_table, count_divisors
from .series import LucasPair, eval_f, eval_h, eval_lambert, eval_reciprocal_lucas
from .construction import Mode, build, check_invariants, verify_c1_c2
from .relations import IntegerLattice, find_relation, lll_reduce

__all__ = [
    "AlgebraicNumber",
    "BallComplex",
    "BallReal",
    "Classification",
    "CoprimeSequence",
    "Explicit",
    "IntegerLattice",
    "LucasPair",
    "Mode",
    "MonicIntPolynomial",
    "PrimePower",
    "SuperPrime",
    "build",
    "build_table",
    "check_invariants",
    "count_divisors",
    "eval_f",
    "eval_h",
    "eval_lambert",
    "eval_reciprocal_lucas",
    "find_relation",
    "from_spec",
    "generate",
    "lll_reduce",
    "verify_c1_c2",
    "__version__",
]
