"""
Algebraic numbers as (minimal polynomial, isolating complex ball).

The polynomial carries the exact information; the ball picks out one root
and is only ever used to say which one. Numerical values are recomputed
from the polynomial at whatever precision a caller asks for.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence, Tuple

import mpmath
import sympy
from mpmath import mp

logger = logging.getLogger(__name__)

X = sympy.Symbol("x")


class AlgebraicNumberError(ValueError):
    """Malformed minimal polynomial or a ball that does not isolate a root."""


def primitive_part(coeffs: Sequence[int]) -> Tuple[int, ...]:
    """Strip leading zeros, divide by content, make the leading coefficient positive."""
    cs = [int(c) for c in coeffs]
    while cs and cs[0] == 0:
        cs.pop(0)
    if not cs:
        raise AlgebraicNumberError("zero polynomial has no roots to select")
    content = 0
    for c in cs:
        content = gcd(content, c)
    cs = [c // content for c in cs]
    if cs[0] < 0:
        cs = [-c for c in cs]
    return tuple(cs)


def integer_coefficients(poly: sympy.Poly) -> Tuple[int, ...]:
    """Integer coefficient tuple (highest first) of a polynomial over QQ or ZZ."""
    coeffs = [sympy.Rational(c) for c in poly.all_coeffs()]
    den = sympy.ilcm(*[c.q for c in coeffs]) if coeffs else 1
    return primitive_part([int(c * den) for c in coeffs])


def mp_coefficients(poly: sympy.Poly) -> list:
    """Coefficients of a rational polynomial as mpf at the current precision."""
    out = []
    for c in poly.all_coeffs():
        c = sympy.Rational(c)
        out.append(mpmath.mpf(int(c.p)) / int(c.q))
    return out


def polynomial_roots(coeffs: Sequence[int], precision_bits: int) -> list:
    if len(coeffs) == 2:
        return [mpmath.mpf(-coeffs[1]) / coeffs[0]]
    with mp.workprec(precision_bits):
        steps = 100
        while True:
            try:
                return mpmath.polyroots(
                    list(coeffs), maxsteps=steps, extraprec=precision_bits + 10 * len(coeffs)
                )
            except mpmath.libmp.NoConvergence:
                if steps > 3200:
                    raise
                steps *= 2
                logger.debug(f"polyroots did not converge, retrying with maxsteps={steps}")


@dataclass(frozen=True, eq=False)
class AlgebraicNumber:
    """
    minpoly: integer coefficients, highest degree first, primitive, leading > 0.
    center/radius: a disc containing exactly one root of minpoly.
    """

    minpoly: Tuple[int, ...]
    center: mpmath.mpc
    radius: mpmath.mpf

    def __post_init__(self):
        if len(self.minpoly) < 2:
            raise AlgebraicNumberError(f"minimal polynomial {self.minpoly} has degree < 1")
        if self.minpoly[0] <= 0:
            raise AlgebraicNumberError("leading coefficient must be positive")

    # construction ------------------------------------------------------

    @classmethod
    def from_rational(cls, value) -> "AlgebraicNumber":
        q = Fraction(value)
        return cls(
            (q.denominator, -q.numerator),
            mpmath.mpc(mpmath.mpf(q.numerator) / q.denominator),
            mpmath.mpf(0),
        )

    @classmethod
    def from_minpoly(
        cls, coeffs: Sequence[int], approx, precision_bits: int = 128
    ) -> "AlgebraicNumber":
        """Select the root of `coeffs` nearest to `approx`."""
        cs = primitive_part(coeffs)
        if len(cs) == 2:
            return cls.from_rational(Fraction(-cs[1], cs[0]))
        with mp.workprec(precision_bits):
            roots = [mpmath.mpc(r) for r in polynomial_roots(cs, precision_bits)]
            target = mpmath.mpc(approx)
            order = sorted(range(len(roots)), key=lambda i: abs(roots[i] - target))
            best = roots[order[0]]
            others = [abs(roots[i] - best) for i in order[1:]]
            separation = min(others) if others else mpmath.mpf(1)
            if separation == 0:
                raise AlgebraicNumberError(f"polynomial {cs} has a repeated root near {approx}")
            if abs(best - target) > separation / 2:
                logger.warning(
                    f"approximation {mpmath.nstr(target, 12)} is far from every root of {cs}"
                )
            return cls(cs, best, separation / 4)

    @classmethod
    def from_sympy(cls, expr, precision_bits: int = 128) -> "AlgebraicNumber":
        """Exact algebraic sympy expression -> AlgebraicNumber (raises NotAlgebraic otherwise)."""
        expr = sympy.sympify(expr)
        if expr.is_Rational:
            return cls.from_rational(Fraction(int(expr.p), int(expr.q)))
        poly = sympy.minimal_polynomial(expr, X, polys=True)
        digits = int(precision_bits * 0.302) + 5
        re, im = sympy.N(expr, digits).as_real_imag()
        with mp.workprec(precision_bits):
            approx = mpmath.mpc(mpmath.mpf(str(re)), mpmath.mpf(str(im)))
        return cls.from_minpoly(integer_coefficients(poly), approx, precision_bits)

    @classmethod
    def root_of_unity(cls, order: int, exponent: int = 1, precision_bits: int = 128):
        """zeta_order ** exponent, reduced to its exact order."""
        if order < 1:
            raise AlgebraicNumberError(f"order must be positive, got {order}")
        e = exponent % order
        g = gcd(e, order)
        m, e = order // g, e // g
        if m == 1:
            return cls.from_rational(1)
        phi = sympy.Poly(sympy.cyclotomic_poly(m, X), X)
        with mp.workprec(precision_bits):
            approx = mpmath.expjpi(mpmath.mpf(2 * e) / m)
        return cls.from_minpoly(integer_coefficients(phi), approx, precision_bits)

    # queries -----------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.minpoly) - 1

    @property
    def leading_coefficient(self) -> int:
        return self.minpoly[0]

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise AlgebraicNumberError(f"degree-{self.degree} number is not rational")
        return Fraction(-self.minpoly[1], self.minpoly[0])

    def poly(self) -> sympy.Poly:
        return sympy.Poly(list(self.minpoly), X, domain="ZZ")

    def is_irreducible(self) -> bool:
        return self.poly().is_irreducible

    def conjugates(self, precision_bits: int = 128) -> list:
        return [mpmath.mpc(r) for r in polynomial_roots(self.minpoly, precision_bits)]

    def value(self, precision_bits: int = 128) -> mpmath.mpc:
        """The selected root at `precision_bits`."""
        if self.is_rational:
            q = self.as_fraction()
            with mp.workprec(precision_bits):
                return mpmath.mpc(mpmath.mpf(q.numerator) / q.denominator)
        roots = self.conjugates(precision_bits)
        with mp.workprec(precision_bits):
            return min(roots, key=lambda r: abs(r - self.center))

    def is_real(self, tolerance: float = 1e-20) -> bool:
        if self.is_rational:
            return True
        # a non-real root's conjugate lies outside the ball, so the ball must meet R
        return abs(mpmath.im(self.center)) <= self.radius + tolerance

    def same_number(self, other: "AlgebraicNumber") -> bool:
        if self.minpoly != other.minpoly:
            return False
        if self.is_rational:
            return True
        return abs(self.center - other.center) < max(self.radius, other.radius)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebraicNumber):
            return NotImplemented
        return self.same_number(other)

    def __hash__(self) -> int:
        return hash(self.minpoly)

    def __repr__(self) -> str:
        return f"AlgebraicNumber(minpoly={list(self.minpoly)}, ~{mpmath.nstr(self.center, 12)})"

    # serialisation -----------------------------------------------------

    def to_dict(self, digits: int = 30) -> dict:
        out = {
            "minpoly": [str(c) for c in self.minpoly],
            "approx": [
                mpmath.nstr(mpmath.re(self.center), digits),
                mpmath.nstr(mpmath.im(self.center), digits),
            ],
            "radius": mpmath.nstr(self.radius, 6),
        }
        if self.is_rational:
            out["rational"] = str(self.as_fraction())
        return out

    @classmethod
    def from_dict(cls, data, precision_bits: int = 128) -> "AlgebraicNumber":
        """Accepts "p/q" strings, ints, or {"minpoly": [...], "approx": [re, im]}."""
        if isinstance(data, (int, str)):
            return cls.from_rational(Fraction(data))
        coeffs = [int(c) for c in data["minpoly"]]
        re, im = data.get("approx", ["0", "0"])
        with mp.workprec(precision_bits):
            approx = mpmath.mpc(mpmath.mpf(re), mpmath.mpf(im))
        return cls.from_minpoly(coeffs, approx, precision_bits)


def image_minpoly(
    t: AlgebraicNumber,
    numerator: sympy.Poly,
    denominator: Optional[sympy.Poly] = None,
    precision_bits: int = 128,
) -> AlgebraicNumber:
    """
    Minimal polynomial of num(t)/den(t) for an algebraic t.

    Takes the resultant in t of minpoly(t) and den(t)*y - num(t), factors it,
    and keeps the irreducible factor that vanishes at the numerical value.
    """
    tvar = numerator.gens[0]
    y = sympy.Symbol("y")
    den = denominator if denominator is not None else sympy.Poly(1, tvar)
    with mp.workprec(precision_bits + 32):
        tv = t.value(precision_bits + 32)
        nv = mpmath.polyval(mp_coefficients(numerator), tv)
        dv = mpmath.polyval(mp_coefficients(den), tv)
        if dv == 0:
            raise AlgebraicNumberError("denominator vanishes at the given root")
        target = nv / dv
    if t.is_rational:
        q = t.as_fraction()
        val = sympy.Rational(q.numerator, q.denominator)
        exact = numerator.as_expr().subs(tvar, val) / den.as_expr().subs(tvar, val)
        exact = sympy.Rational(exact)
        return AlgebraicNumber.from_rational(Fraction(int(exact.p), int(exact.q)))
    f = sympy.Poly(list(t.minpoly), tvar)
    res = sympy.resultant(
        f.as_expr(), den.as_expr() * y - numerator.as_expr(), tvar
    )
    res_poly = sympy.Poly(res, y)
    _, factors = res_poly.factor_list()
    best, best_val = None, None
    with mp.workprec(precision_bits + 32):
        for fac, _mult in factors:
            cs = integer_coefficients(fac)
            scale = sum(abs(c) for c in cs) * max(1, abs(target)) ** (len(cs) - 1)
            val = abs(mpmath.polyval(list(cs), target)) / scale
            if best_val is None or val < best_val:
                best, best_val = cs, val
    return AlgebraicNumber.from_minpoly(best, target, precision_bits)

