"""
Torsion points on curves f(x, y) = 0 in G_m^2.

Candidates are screened per order m, one Galois-orbit representative at a
time, by evaluating f at every m-th root of unity (no root finding, so
repeated factors cannot hide a point). Every reported point is confirmed
exactly by reducing f(z^a, z^b) modulo the m-th cyclotomic polynomial.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from typing import Dict, List, Optional, Set, Tuple

import numpy as np
import sympy
from sympy import divisors, totient

from src.linalg.algebraic import integer_coefficients

logger = logging.getLogger(__name__)

_x, _y, _z = sympy.symbols("x y z")

# relative to the l1 norm of the coefficients
SCREEN_TOLERANCE = 1e-9


class LaurentPolynomial:
    """Integer Laurent polynomial in x, y held as {(i, j): coeff}."""

    def __init__(self, terms: Dict[Tuple[int, int], int]):
        self.terms = {(int(i), int(j)): int(c) for (i, j), c in terms.items() if c}
        if not self.terms:
            raise ValueError("Laurent polynomial is identically zero")

    @classmethod
    def parse(cls, text: str) -> "LaurentPolynomial":
        expr = sympy.expand(sympy.sympify(text, locals={"x": _x, "y": _y}))
        extra = expr.free_symbols - {_x, _y}
        if extra:
            raise ValueError(f"unexpected symbols {sorted(map(str, extra))} in {text!r}")
        terms: Dict[Tuple[int, int], int] = {}
        for term in sympy.Add.make_args(expr):
            coeff, mono = term.as_coeff_Mul()
            powers = mono.as_powers_dict() if mono != 1 else {}
            i, j = powers.get(_x, 0), powers.get(_y, 0)
            if not (coeff.is_Integer and sympy.Integer(i) == i and sympy.Integer(j) == j):
                raise ValueError(f"term {term} is not an integer Laurent monomial")
            key = (int(i), int(j))
            terms[key] = terms.get(key, 0) + int(coeff)
        return cls(terms)

    @classmethod
    def from_dict(cls, data) -> "LaurentPolynomial":
        if isinstance(data, str):
            return cls.parse(data)
        if "expr" in data:
            return cls.parse(data["expr"])
        return cls({(int(i), int(j)): int(c) for i, j, c in data["terms"]})

    def to_dict(self) -> dict:
        return {"terms": [[i, j, c] for (i, j), c in sorted(self.terms.items())]}

    def shifted(self) -> "LaurentPolynomial":
        """Multiply by a monomial so that all exponents are >= 0 with a zero minimum."""
        mi = min(i for i, _ in self.terms)
        mj = min(j for _, j in self.terms)
        return LaurentPolynomial({(i - mi, j - mj): c for (i, j), c in self.terms.items()})

    def to_sympy(self):
        return sum(c * _x ** i * _y ** j for (i, j), c in self.terms.items())

    def y_coefficients(self) -> Dict[int, Dict[int, int]]:
        """{j: {i: c}} after shifting."""
        out: Dict[int, Dict[int, int]] = {}
        for (i, j), c in self.shifted().terms.items():
            out.setdefault(j, {})[i] = c
        return out

    def __str__(self) -> str:
        return str(self.to_sympy())


@dataclass(frozen=True)
class RootOfUnityPoint:
    order: int
    exponents: Tuple[int, ...]
    field_rep: Tuple[Tuple[int, ...], ...] = field(compare=False)
    on_coset: bool = field(default=False, compare=False)

    def approx(self) -> List[complex]:
        return [complex(np.exp(2j * np.pi * e / self.order)) for e in self.exponents]

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "exponents": list(self.exponents),
            "field_rep": [list(r) for r in self.field_rep],
            "on_coset": self.on_coset,
        }


@dataclass
class TorsionCoset:
    """Component x^character = zeta with zeta a primitive root_order-th root of unity."""

    character: Tuple[int, int]
    root_order: int

    def contains(self, point: RootOfUnityPoint) -> bool:
        e = sum(c * k for c, k in zip(self.character, point.exponents)) % point.order
        return point.order // gcd(e, point.order) == self.root_order

    def to_dict(self) -> dict:
        return {"character": list(self.character), "root_order": self.root_order}


@dataclass
class TorsionSearchResult:
    points: List[RootOfUnityPoint]
    cosets: List[TorsionCoset]
    max_order: int

    def to_dict(self) -> dict:
        return {
            "max_order": self.max_order,
            "count": len(self.points),
            "points": [p.to_dict() for p in self.points],
            "cosets": [c.to_dict() for c in self.cosets],
        }


@lru_cache(maxsize=256)
def cyclotomic(m: int) -> sympy.Poly:
    return sympy.Poly(sympy.cyclotomic_poly(m, _z), _z, domain="ZZ")


def reduce_cyclotomic(exponent_coeffs: Dict[int, int], m: int) -> Tuple[int, ...]:
    """sum c z^e reduced modulo Phi_m, as a coefficient vector of length phi(m)."""
    phi = cyclotomic(m)
    d = phi.degree()
    merged: Dict[int, int] = {}
    for e, c in exponent_coeffs.items():
        merged[e % m] = merged.get(e % m, 0) + c
    terms = {(e,): c for e, c in merged.items() if c}
    if not terms:
        return (0,) * d
    rem = sympy.Poly.from_dict(terms, _z, domain="ZZ").rem(phi)
    coeffs = [0] * d
    for (e,), c in rem.terms():
        coeffs[e] = int(c)
    return tuple(coeffs)


def _is_zero_in_cyclotomic(exponent_coeffs: Dict[int, int], m: int) -> bool:
    return not any(reduce_cyclotomic(exponent_coeffs, m))


def evaluates_to_zero(f: LaurentPolynomial, m: int, a: int, b: int) -> bool:
    """Exact test of f(z^a, z^b) = 0 in Q(zeta_m)."""
    acc: Dict[int, int] = {}
    for (i, j), c in f.terms.items():
        e = (a * i + b * j) % m
        acc[e] = acc.get(e, 0) + c
    return _is_zero_in_cyclotomic(acc, m)


def torsion_cosets(f: LaurentPolynomial) -> List[TorsionCoset]:
    """Positive-dimensional torsion cosets contained in {f = 0}."""
    shifted = f.shifted().to_sympy()
    _, factors = sympy.Poly(shifted, _x, _y).factor_list()
    cosets = []
    for fac, _mult in factors:
        monos = fac.monoms()
        if len(monos) < 2:
            continue
        base = min(monos)
        diffs = [(i - base[0], j - base[1]) for i, j in monos]
        g = 0
        for dx, dy in diffs:
            g = gcd(g, gcd(dx, dy))
        w = None
        for dx, dy in diffs:
            if (dx, dy) != (0, 0):
                w = (dx // g, dy // g)
                break
        if w is None:
            continue
        steps = {}
        collinear = True
        for (dx, dy), mono in zip(diffs, monos):
            k = dx // w[0] if w[0] else dy // w[1]
            if (k * w[0], k * w[1]) != (dx, dy):
                collinear = False
                break
            steps[k] = int(fac.coeff_monomial(mono))
        if not collinear:
            continue
        s = sympy.Symbol("s")
        if min(steps) < 0:
            shift = -min(steps)
            steps = {k + shift: c for k, c in steps.items()}
        h = sympy.Poly(sum(c * s ** k for k, c in steps.items()), s)
        if h.LC() < 0:
            h = -h
        for hf, _m in h.factor_list()[1]:
            if hf.degree() < 1 or not hf.is_cyclotomic:
                continue
            root_order = _cyclotomic_index(hf)
            if root_order is not None:
                cosets.append(TorsionCoset((w[0], w[1]), root_order))
    logger.debug(f"Torsion cosets of {f}: {[c.to_dict() for c in cosets]}")
    return cosets


def _cyclotomic_index(h: sympy.Poly) -> Optional[int]:
    d = h.degree()
    target = integer_coefficients(h)
    for m in range(1, 2 * d * d + 3):
        if totient(m) == d and integer_coefficients(cyclotomic(m)) == target:
            return m
    return None


def _screen_exponents(f: LaurentPolynomial, m: int, a: int) -> Tuple[bool, List[int]]:
    """
    Exponents b at which f(zeta_m^a, zeta_m^b) is numerically zero.

    Every exponent is reduced mod m in integers before the angle is formed,
    so a true zero of any multiplicity evaluates to rounding size; survivors
    still go through the exact check. Returns (identically_zero, candidates).
    """
    rows: Dict[int, Dict[int, int]] = {}
    for (i, j), c in f.terms.items():
        row = rows.setdefault(j, {})
        e = (a * i) % m
        row[e] = row.get(e, 0) + c
    live = {j: row for j, row in rows.items() if not _is_zero_in_cyclotomic(row, m)}
    if not live:
        return True, list(range(m))
    bs = np.arange(m, dtype=np.int64)
    total = np.zeros(m, dtype=complex)
    scale = 0
    for j, row in live.items():
        for e, c in row.items():
            total += c * np.exp(2j * np.pi * ((e + bs * j) % m) / m)
            scale += abs(c)
    hits = np.nonzero(np.abs(total) <= SCREEN_TOLERANCE * scale)[0]
    return False, [int(b) for b in hits]


def torsion_points_on_curve(f: LaurentPolynomial, max_order: int) -> TorsionSearchResult:
    """
    All (zeta_m^a, zeta_m^b), m <= max_order, on f = 0, at their minimal order.

    Representatives have a = gcd(a, m); the rest of each Galois orbit is
    obtained by multiplying exponents by units mod m and re-verified exactly.
    """
    if max_order < 1:
        raise ValueError(f"max_order must be positive, got {max_order}")
    cosets = torsion_cosets(f)
    found: Set[Tuple[int, int, int]] = set()
    for m in range(1, max_order + 1):
        units = [u for u in range(1, m + 1) if gcd(u, m) == 1] if m > 1 else [1]
        for d in divisors(m):
            a = d % m
            identically, candidates = _screen_exponents(f, m, a)
            for b in candidates:
                if gcd(gcd(a, b), m) != 1:
                    continue
                if not identically and not evaluates_to_zero(f, m, a, b):
                    continue
                for u in units:
                    found.add((m, (u * a) % m, (u * b) % m))
    points = []
    for m, a, b in sorted(found):
        if not evaluates_to_zero(f, m, a, b):
            raise ArithmeticError(f"conjugate ({a}, {b}) mod {m} failed exact verification")
        rep = (reduce_cyclotomic({a: 1}, m), reduce_cyclotomic({b: 1}, m))
        point = RootOfUnityPoint(m, (a, b), rep)
        if any(c.contains(point) for c in cosets):
            point = RootOfUnityPoint(m, (a, b), rep, on_coset=True)
        points.append(point)
    logger.info(
        f"Torsion search on {f} up to order {max_order} finished: {len(points)} points, "
        f"{len(cosets)} torsion cosets"
    )
    return TorsionSearchResult(points, cosets, max_order)
