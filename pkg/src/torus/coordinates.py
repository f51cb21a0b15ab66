"""
Coordinates of the supported number class: positive rational times an
explicit root of unity. Multiplicative relations among such numbers are
decided exactly from prime factorisations and exponent arithmetic.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, List, Sequence, Union

import mpmath
import sympy
from mpmath import mp
from sympy import factorint, integer_nthroot, totient

from src.linalg.algebraic import X, AlgebraicNumber, integer_coefficients, primitive_part

logger = logging.getLogger(__name__)


class UnsupportedCoordinateError(ValueError):
    """A coordinate is not a rational multiple of a root of unity."""


@dataclass(frozen=True)
class Coordinate:
    """modulus * exp(2 pi i exponent / order), modulus > 0, gcd(exponent, order) = 1."""

    modulus: Fraction
    order: int = 1
    exponent: int = 0

    def __post_init__(self):
        modulus = Fraction(self.modulus)
        if modulus <= 0:
            raise UnsupportedCoordinateError(f"modulus must be positive, got {modulus}")
        if self.order < 1:
            raise UnsupportedCoordinateError(f"root order must be positive, got {self.order}")
        e = self.exponent % self.order
        g = gcd(e, self.order)
        object.__setattr__(self, "modulus", modulus)
        object.__setattr__(self, "order", self.order // g)
        object.__setattr__(self, "exponent", e // g)

    @classmethod
    def rational(cls, value) -> "Coordinate":
        q = Fraction(value)
        if q == 0:
            raise UnsupportedCoordinateError("zero is not a point of the torus")
        return cls(abs(q), 2, 1) if q < 0 else cls(q)

    @classmethod
    def root_of_unity(cls, order: int, exponent: int = 1) -> "Coordinate":
        return cls(Fraction(1), order, exponent)

    @classmethod
    def parse(cls, data: Union[int, str, dict, "Coordinate", AlgebraicNumber]) -> "Coordinate":
        """
        Accepted forms: 3, "-1/2", {"modulus": "2/3", "root": [e, m]},
        {"minpoly": [...], "approx": [re, im]} or an AlgebraicNumber.
        """
        if isinstance(data, Coordinate):
            return data
        if isinstance(data, AlgebraicNumber):
            return cls.from_algebraic(data)
        if isinstance(data, (int, str, Fraction)):
            return cls.rational(Fraction(data))
        if "minpoly" in data:
            return cls.from_algebraic(AlgebraicNumber.from_dict(data))
        e, m = data.get("root", [0, 1])
        return cls(Fraction(data.get("modulus", 1)), int(m), int(e))

    @classmethod
    def from_algebraic(cls, a: AlgebraicNumber) -> "Coordinate":
        """Recognise r * zeta_m^e from its minimal polynomial r^phi(m) * Phi_m(x / r)."""
        if a.is_rational:
            return cls.rational(a.as_fraction())
        d = a.degree
        ratio = Fraction(abs(a.minpoly[-1]), a.minpoly[0])
        num, exact_num = integer_nthroot(ratio.numerator, d)
        den, exact_den = integer_nthroot(ratio.denominator, d)
        if not (exact_num and exact_den):
            raise UnsupportedCoordinateError(
                f"coordinate with minimal polynomial {list(a.minpoly)} has non-rational modulus"
            )
        r = Fraction(num, den)
        with mp.workprec(128):
            turns = mpmath.arg(a.center) / (2 * mpmath.pi)
            for m in range(3, 2 * d * d + 3):
                if totient(m) != d:
                    continue
                e = int(mpmath.nint(turns * m)) % m
                if gcd(e, m) != 1:
                    continue
                phi = integer_coefficients(sympy.Poly(sympy.cyclotomic_poly(m, X), X))
                expected = primitive_part(
                    [c * r.numerator ** i * r.denominator ** (d - i) for i, c in enumerate(phi)]
                )
                if expected != a.minpoly:
                    continue
                candidate = cls(r, m, e)
                if abs(candidate.approx(128) - a.center) <= a.radius + mpmath.mpf(10) ** -20:
                    return candidate
        raise UnsupportedCoordinateError(
            f"coordinate with minimal polynomial {list(a.minpoly)} is not a rational "
            f"multiple of a root of unity"
        )

    # group law -------------------------------------------------------------

    def __mul__(self, other: "Coordinate") -> "Coordinate":
        m = self.order * other.order // gcd(self.order, other.order)
        e = self.exponent * (m // self.order) + other.exponent * (m // other.order)
        return Coordinate(self.modulus * other.modulus, m, e)

    def inverse(self) -> "Coordinate":
        return Coordinate(1 / self.modulus, self.order, -self.exponent)

    def __truediv__(self, other: "Coordinate") -> "Coordinate":
        return self * other.inverse()

    def __pow__(self, k: int) -> "Coordinate":
        k = int(k)
        base = self if k >= 0 else self.inverse()
        return Coordinate(base.modulus ** abs(k), base.order, base.exponent * abs(k))

    @property
    def is_root_of_unity(self) -> bool:
        return self.modulus == 1

    @property
    def is_one(self) -> bool:
        return self.modulus == 1 and self.order == 1

    def prime_valuations(self) -> Dict[int, int]:
        out = dict(factorint(self.modulus.numerator))
        for p, k in factorint(self.modulus.denominator).items():
            out[p] = out.get(p, 0) - k
        return out

    # conversions -----------------------------------------------------------

    def approx(self, precision_bits: int = 128) -> mpmath.mpc:
        with mp.workprec(precision_bits):
            r = mpmath.mpf(self.modulus.numerator) / self.modulus.denominator
            return r * mpmath.expjpi(mpmath.mpf(2 * self.exponent) / self.order)

    def to_algebraic(self, precision_bits: int = 128) -> AlgebraicNumber:
        if self.order == 1:
            return AlgebraicNumber.from_rational(self.modulus)
        if self.order == 2:
            return AlgebraicNumber.from_rational(-self.modulus)
        phi = integer_coefficients(sympy.Poly(sympy.cyclotomic_poly(self.order, X), X))
        d = len(phi) - 1
        r = self.modulus
        coeffs = [c * r.numerator ** i * r.denominator ** (d - i) for i, c in enumerate(phi)]
        return AlgebraicNumber.from_minpoly(coeffs, self.approx(precision_bits), precision_bits)

    def to_dict(self) -> dict:
        return {"modulus": str(self.modulus), "root": [self.exponent, self.order]}

    def __str__(self) -> str:
        if self.order == 1:
            return str(self.modulus)
        return f"{self.modulus}*zeta_{self.order}^{self.exponent}"


def monomial(coords: Sequence[Coordinate], exponents: Sequence[int]) -> Coordinate:
    """x^a = prod x_i^a_i."""
    out = Coordinate(Fraction(1))
    for c, k in zip(coords, exponents):
        if k:
            out = out * c ** k
    return out


def valuation_matrix(coords: Iterable[Coordinate]) -> List[List[int]]:
    """Rows indexed by the primes occurring in the moduli, columns by coordinates."""
    coords = list(coords)
    vals = [c.prime_valuations() for c in coords]
    primes = sorted({p for v in vals for p in v})
    return [[v.get(p, 0) for v in vals] for p in primes]
