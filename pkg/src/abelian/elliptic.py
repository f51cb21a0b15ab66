"""
Elliptic curves y^2 = x^3 + a x + b over Q and their canonical height.

Heights use the normalisation h_hat(P) = lim 4^-n h(x(2^n P)) with
h(p/q) = log max(|p|, |q|). canonical_height evaluates that limit place by
place: after replacing P by a multiple with everywhere nonsingular reduction
on an integral model, the finite places contribute the log of the
denominator of x and the real place is summed by Tate's doubling series.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

import mpmath
from mpmath import mp
from sympy import factorint

from src.linalg.algebraic import polynomial_roots

logger = logging.getLogger(__name__)

Point = Optional[Tuple[Fraction, Fraction]]

MAX_TORSION_ORDER = 12


class NotOnCurveError(ValueError):
    """Point does not satisfy the curve equation."""


def _frac(value) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(str(value))


@dataclass(frozen=True)
class EllipticCurveQ:
    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", _frac(self.a))
        object.__setattr__(self, "b", _frac(self.b))
        if 4 * self.a ** 3 + 27 * self.b ** 2 == 0:
            raise ValueError(f"y^2 = x^3 + {self.a} x + {self.b} is singular")

    @property
    def discriminant(self) -> Fraction:
        return -16 * (4 * self.a ** 3 + 27 * self.b ** 2)

    def point(self, x, y) -> Point:
        p = (_frac(x), _frac(y))
        self.check_point(p)
        return p

    def is_on_curve(self, p: Point) -> bool:
        if p is None:
            return True
        x, y = p
        return y * y == x ** 3 + self.a * x + self.b

    def check_point(self, p: Point) -> None:
        if not self.is_on_curve(p):
            raise NotOnCurveError(f"{p} is not on y^2 = x^3 + ({self.a})x + ({self.b})")

    def negate(self, p: Point) -> Point:
        return None if p is None else (p[0], -p[1])

    def add(self, p: Point, q: Point) -> Point:
        if p is None:
            return q
        if q is None:
            return p
        x1, y1 = p
        x2, y2 = q
        if x1 == x2:
            if y1 + y2 == 0:
                return None
            slope = (3 * x1 * x1 + self.a) / (2 * y1)
        else:
            slope = (y2 - y1) / (x2 - x1)
        x3 = slope * slope - x1 - x2
        return x3, slope * (x1 - x3) - y1

    def double(self, p: Point) -> Point:
        return self.add(p, p)

    def multiply(self, p: Point, n: int) -> Point:
        if n < 0:
            return self.multiply(self.negate(p), -n)
        result = None
        addend = p
        while n:
            if n & 1:
                result = self.add(result, addend)
            addend = self.double(addend)
            n >>= 1
        return result

    def torsion_order(self, p: Point) -> Optional[int]:
        """Order of p if it is at most 12 (every torsion order over Q is), else None."""
        self.check_point(p)
        q = p
        for n in range(1, MAX_TORSION_ORDER + 1):
            if q is None:
                return n
            q = self.add(q, p)
        return None

    def to_dict(self) -> dict:
        return {"a": str(self.a), "b": str(self.b)}

    @classmethod
    def from_dict(cls, data: dict) -> "EllipticCurveQ":
        return cls(_frac(data["a"]), _frac(data["b"]))


def naive_height(p: Point):
    """log max(|num x|, den x); 0 at infinity."""
    if p is None:
        return mpmath.mpf(0)
    x = p[0]
    return mpmath.log(max(abs(x.numerator), x.denominator))


@dataclass
class DoublingLimit:
    values: list
    converged: bool

    @property
    def estimate(self):
        return self.values[-1]


def doubling_limit(curve: EllipticCurveQ, p: Point, steps: int = 6, tolerance: float = 1e-12) -> DoublingLimit:
    """4^-n h(x(2^n P)) for n = 0..steps with exact rational doubling."""
    curve.check_point(p)
    values = []
    q = p
    converged = False
    for n in range(steps + 1):
        if q is None:
            values.append(mpmath.mpf(0))
            converged = True
            break
        values.append(naive_height(q) / mpmath.mpf(4) ** n)
        if n and abs(values[-1] - values[-2]) < tolerance:
            converged = True
            break
        q = curve.double(q)
    return DoublingLimit(values, converged)


def _integral_model(curve: EllipticCurveQ) -> int:
    """Smallest u > 0 with a u^4 and b u^6 integral."""
    u = 1
    for c, w in ((curve.a, 4), (curve.b, 6)):
        for prime, e in _factor(c.denominator):
            need = -(-e // w)
            have = _valuation(u, prime)
            if have < need:
                u *= prime ** (need - have)
    return u


def _factor(n: int):
    return sorted(factorint(n).items())


def _valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _nonsingular_everywhere(a_int: int, x: Fraction, y: Fraction) -> bool:
    d = math.isqrt(x.denominator)
    if d * d != x.denominator:
        raise ArithmeticError(f"x = {x} on an integral model must have square denominator")
    big_x, big_y = x.numerator, y.numerator
    g = math.gcd(2 * big_y, 3 * big_x * big_x + a_int * d ** 4)
    common = math.gcd(g, d)
    while common > 1:
        g //= common
        common = math.gcd(g, d)
    return g == 1


def _archimedean(a, b, x, precision_bits: int, tolerance_bits: int):
    """2 * lambda_inf(P): log x' + (1/4) sum 4^-n log z(t_n) on the model shifted to x' >= 1."""
    with mp.workprec(precision_bits):
        roots = polynomial_roots([1, 0, int(a), int(b)], precision_bits)
        a, b, x = (mpmath.mpf(v.numerator) / v.denominator for v in (a, b, x))
        e_min = min(mpmath.re(r) for r in roots if abs(mpmath.im(r)) < mpmath.mpf(2) ** (-precision_bits // 2))
        r = 1 - e_min
        a2 = -3 * r
        a4 = 3 * r * r + a
        a6 = -(r ** 3) - a * r + b
        b2, b4, b6 = 4 * a2, 2 * a4, 4 * a6
        b8 = 4 * a2 * a6 - a4 * a4
        xs = x + r
        t = 1 / xs
        total = mpmath.mpf(0)
        scale = mpmath.mpf(1)
        eps = mpmath.mpf(2) ** (-tolerance_bits)
        n = 0
        while True:
            w = 4 * t + b2 * t ** 2 + 2 * b4 * t ** 3 + b6 * t ** 4
            z = 1 - b4 * t ** 2 - 2 * b6 * t ** 3 - b8 * t ** 4
            term = scale * mpmath.log(z)
            total += term
            n += 1
            if abs(term) < eps and n > 2:
                break
            if n > 4 * precision_bits:
                logger.warning("Tate series did not settle; returning the partial sum")
                break
            t = w / z
            scale /= 4
        return mpmath.log(xs) + total / 4


def canonical_height(
    curve: EllipticCurveQ,
    p: Point,
    precision_bits: int = 128,
    max_multiple: int = 120,
) -> mpmath.mpf:
    """h_hat(P) >= 0, zero exactly on torsion points."""
    curve.check_point(p)
    if p is None or curve.torsion_order(p) is not None:
        return mpmath.mpf(0)
    u = _integral_model(curve)
    a_int = curve.a * u ** 4
    b_int = curve.b * u ** 6
    model = EllipticCurveQ(a_int, b_int)
    base = (p[0] * u ** 2, p[1] * u ** 3)
    q = base
    m = 1
    while not _nonsingular_everywhere(int(a_int), q[0], q[1]):
        m += 1
        if m > max_multiple:
            raise ArithmeticError(f"no multiple up to {max_multiple} of {p} has nonsingular reduction")
        q = model.add(q, base)
    with mp.workprec(precision_bits + 32):
        finite = mpmath.log(q[0].denominator)
        infinite = _archimedean(model.a, model.b, q[0], precision_bits + 32, precision_bits + 8)
        value = (finite + infinite) / (m * m)
    logger.debug(f"canonical_height: multiple m={m}, finite={mpmath.nstr(finite, 10)}")
    with mp.workprec(precision_bits):
        return +value


def height_pairing(curve: EllipticCurveQ, p: Point, q: Point, precision_bits: int = 128) -> mpmath.mpf:
    """<P, Q> = (h_hat(P + Q) - h_hat(P) - h_hat(Q)) / 2."""
    with mp.workprec(precision_bits):
        s = canonical_height(curve, curve.add(p, q), precision_bits)
        return (s - canonical_height(curve, p, precision_bits) - canonical_height(curve, q, precision_bits)) / 2


def parse_point(data) -> Point:
    if data is None or data == "O":
        return None
    x, y = data
    return _frac(x), _frac(y)


def point_to_list(p: Point) -> Optional[List[str]]:
    return None if p is None else [str(p[0]), str(p[1])]
