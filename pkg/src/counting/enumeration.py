"""
Real algebraic numbers of bounded degree and k-height inside a box.
"""

import itertools
import logging
import math
from fractions import Fraction
from typing import Dict, Iterator, List, Sequence, Tuple

import mpmath
from sympy import divisors, totient

from src.linalg.algebraic import AlgebraicNumber, polynomial_roots, primitive_part
from src.linalg.gram import EnumerationBoundError

logger = logging.getLogger(__name__)

Box = Tuple[Fraction, Fraction]

MAX_POLYNOMIALS = 2_000_000


def parse_box(box) -> Box:
    lo, hi = (Fraction(str(x)) for x in box)
    if lo > hi:
        raise ValueError(f"empty box [{lo}, {hi}]")
    return lo, hi


def farey_count(t: int) -> int:
    """Rationals in [0, 1] of height <= t: 1 + sum_{q <= t} phi(q)."""
    return 1 + sum(int(totient(q)) for q in range(1, t + 1))


def _rationals(t: int, box: Box) -> Iterator[Fraction]:
    lo, hi = box
    for q in range(1, t + 1):
        for p in range(max(-t, math.ceil(lo * q)), min(t, math.floor(hi * q)) + 1):
            if math.gcd(p, q) == 1:
                yield Fraction(p, q)


def _rational_roots(coeffs: Sequence[int]) -> List[Fraction]:
    """Rational roots of an integer polynomial (highest degree first)."""
    coeffs = list(coeffs)
    roots = []
    while coeffs and coeffs[-1] == 0:
        roots.append(Fraction(0))
        coeffs.pop()
    if len(coeffs) < 2:
        return roots
    lead, const = coeffs[0], coeffs[-1]
    for p in divisors(abs(const)):
        for q in divisors(abs(lead)):
            for r in (Fraction(p, q), Fraction(-p, q)):
                if r in roots:
                    continue
                value = Fraction(0)
                for c in coeffs:
                    value = value * r + c
                if value == 0:
                    roots.append(r)
    return roots


def _deflate(coeffs: Sequence[int], root: Fraction) -> Tuple[int, ...]:
    """coeffs / (q y - p) for a rational root p/q, as a primitive integer polynomial."""
    out = []
    acc = Fraction(0)
    for c in coeffs[:-1]:
        acc = acc * root + c
        out.append(acc)
    denominator = 1
    for c in out:
        denominator = denominator * c.denominator // math.gcd(denominator, c.denominator)
    return primitive_part([int(c * denominator) for c in out])


def _real_roots_in_box(coeffs: Tuple[int, ...], box: Box, precision_bits: int) -> List[AlgebraicNumber]:
    """Real roots in the box of a primitive integer polynomial of degree <= 3."""
    coeffs = primitive_part(coeffs)
    degree = len(coeffs) - 1
    if degree < 1:
        return []
    lo, hi = box
    rational = _rational_roots(coeffs)
    if rational:
        out = [AlgebraicNumber.from_rational(r) for r in rational if lo <= r <= hi]
        rest = coeffs
        for r in rational:
            rest = _deflate(rest, r)
        return out + _real_roots_in_box(rest, box, precision_bits) if len(rest) > 2 else out
    if degree == 1:
        return []
    out = []
    with mpmath.mp.workprec(precision_bits):
        if degree == 2:
            a, b, c = coeffs
            disc = b * b - 4 * a * c
            if disc < 0:
                return []
            candidates = [(-b + s * mpmath.sqrt(disc)) / (2 * a) for s in (-1, 1)]
        else:
            candidates = polynomial_roots(coeffs, precision_bits)
        for r in candidates:
            if abs(mpmath.im(r)) > mpmath.mpf(2) ** (-precision_bits // 2):
                continue
            x = mpmath.re(r)
            # irrational roots never sit on a rational endpoint
            if mpmath.mpf(lo.numerator) / lo.denominator < x < mpmath.mpf(hi.numerator) / hi.denominator:
                out.append(AlgebraicNumber.from_minpoly(coeffs, x, precision_bits))
    return out


def _key(a: AlgebraicNumber) -> Tuple:
    if a.is_rational:
        return (a.minpoly, str(a.as_fraction()))
    return (a.minpoly, mpmath.nstr(mpmath.re(a.center), 25))


def _sort_value(a: AlgebraicNumber):
    return mpmath.re(a.center)


def enumerate_bounded(
    k: int,
    t: int,
    box,
    max_degree: int = 3,
    max_height: int = 10000,
    precision_bits: int = 128,
) -> List[AlgebraicNumber]:
    """
    Every real algebraic number of degree <= k and H_k <= t in the box, once,
    in increasing order.

    k = 1 walks the rationals directly; otherwise every integer polynomial of
    degree <= k with coefficients in [-t, t] and positive leading coefficient
    is split into its real roots.
    """
    if k < 1 or k > max_degree:
        raise EnumerationBoundError(f"degree k={k} outside 1..{max_degree} (bounds.enumeration_degree)")
    if t < 1 or t > max_height:
        raise EnumerationBoundError(f"height T={t} outside 1..{max_height} (bounds.enumeration_height)")
    box = parse_box(box)
    if k == 1:
        found = sorted(_rationals(t, box))
        logger.debug(f"enumerate_bounded k=1 T={t}: {len(found)} rationals")
        return [AlgebraicNumber.from_rational(r) for r in found]

    total = (2 * t + 1) ** (k + 1)
    if total > MAX_POLYNOMIALS:
        raise EnumerationBoundError(
            f"k={k}, T={t} needs about {total} polynomials (limit {MAX_POLYNOMIALS}); lower T"
        )
    seen: Dict[Tuple, AlgebraicNumber] = {}
    for degree in range(1, k + 1):
        for lead in range(1, t + 1):
            for rest in itertools.product(range(-t, t + 1), repeat=degree):
                coeffs = (lead,) + rest
                g = 0
                for c in coeffs:
                    g = math.gcd(g, c)
                if g != 1:
                    continue
                for a in _real_roots_in_box(coeffs, box, precision_bits):
                    seen.setdefault(_key(a), a)
    found = sorted(seen.values(), key=_sort_value)
    logger.info(f"enumerate_bounded k={k} T={t}: {len(found)} numbers")
    return found
