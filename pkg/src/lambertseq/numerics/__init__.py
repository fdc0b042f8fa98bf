"""Numeric kernels: ball arithmetic, certified polynomial roots,
algebraic numbers with Pisot classification."""

from .balls import BallReal, BallComplex, DEFAULT_PREC, ball_sum, decimal_bound
from .polyroots import MonicIntPolynomial, RootBall, isolate_roots
from .algebraic import AlgebraicNumber, Classification, classify_pisot, field_norm

__all__ = [
    "BallReal",
    "BallComplex",
    "DEFAULT_PREC",
    "ball_sum",
    "decimal_bound",
    "MonicIntPolynomial",
    "RootBall",
    "isolate_roots",
    "AlgebraicNumber",
    "Classification",
    "classify_pisot",
    "field_norm",
]
