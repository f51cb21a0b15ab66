"""Absolute logarithmic Weil height through the Mahler measure."""

import logging
from math import gcd
from typing import Sequence

import mpmath
from mpmath import mp

from src.linalg.algebraic import AlgebraicNumber, polynomial_roots

logger = logging.getLogger(__name__)


class HeightError(ValueError):
    """Minimal polynomial is not irreducible or not primitive."""


def log_mahler_measure(coeffs: Sequence[int], precision_bits: int = 128):
    """log|a_d| + sum log max(1, |root|)."""
    with mp.workprec(precision_bits):
        total = mpmath.log(abs(coeffs[0]))
        if len(coeffs) > 1:
            for r in polynomial_roots(coeffs, precision_bits):
                m = abs(r)
                if m > 1:
                    total += mpmath.log(m)
        return total


def weil_height(a: AlgebraicNumber, precision_bits: int = 128):
    content = 0
    for c in a.minpoly:
        content = gcd(content, c)
    if content != 1:
        raise HeightError(f"minimal polynomial {list(a.minpoly)} has content {content}")
    if not a.is_irreducible():
        raise HeightError(f"minimal polynomial {list(a.minpoly)} is reducible")
    with mp.workprec(precision_bits):
        if a.poly().is_cyclotomic or a.minpoly == (1, 0):
            return mpmath.mpf(0)
        return log_mahler_measure(a.minpoly, precision_bits) / a.degree


def multiplicative_height(a: AlgebraicNumber, precision_bits: int = 128):
    """H(a) = exp(h(a)); max(|p|, |q|) for a = p/q."""
    if a.is_rational:
        q = a.as_fraction()
        return mpmath.mpf(max(abs(q.numerator), q.denominator))
    with mp.workprec(precision_bits):
        return mpmath.exp(weil_height(a, precision_bits))
