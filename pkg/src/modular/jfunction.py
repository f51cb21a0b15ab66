"""
The j-function on the upper half plane.

Points are first moved into the standard fundamental domain, where
|q| <= exp(-pi*sqrt(3)), and j is then summed from the Eisenstein series E4
(Lambert form) and the discriminant via Euler's pentagonal series, with
truncation chosen from explicit geometric tail bounds.
"""

import logging
import re
from dataclasses import dataclass, field
from typing import Tuple

import mpmath
import sympy
from mpmath import mp
from sympy.parsing.sympy_parser import (
    implicit_multiplication_application,
    parse_expr,
    standard_transformations,
)

logger = logging.getLogger(__name__)

Matrix2 = Tuple[Tuple[int, int], Tuple[int, int]]
IDENTITY: Matrix2 = ((1, 0), (0, 1))


class PrecisionError(ValueError):
    """Requested precision needs more series terms than the configured maximum."""


@dataclass(frozen=True)
class UpperHalfPoint:
    value: mpmath.mpc

    def __post_init__(self):
        if not mpmath.im(self.value) > 0:
            raise ValueError(f"point {mpmath.nstr(self.value, 15)} is not in the upper half plane")

    @classmethod
    def from_parts(cls, re_part, im_part, precision_bits: int = 128) -> "UpperHalfPoint":
        with mp.workprec(precision_bits):
            return cls(mpmath.mpc(mpmath.mpf(re_part), mpmath.mpf(im_part)))

    @classmethod
    def parse(cls, text: str, precision_bits: int = 128) -> "UpperHalfPoint":
        """'a+bi', '(1+sqrt(3)i)/2', 'i/2', or 're,im'."""
        if "," in text:
            re_part, im_part = text.split(",", 1)
            return cls.from_parts(re_part.strip(), im_part.strip(), precision_bits)
        source = re.sub(r"(?<![A-Za-z])i(?![A-Za-z])", "I", text)
        expr = parse_expr(
            source,
            transformations=standard_transformations + (implicit_multiplication_application,),
        )
        digits = int(precision_bits * 0.302) + 10
        re_part, im_part = sympy.N(expr, digits).as_real_imag()
        return cls.from_parts(str(re_part), str(im_part), precision_bits)

    def to_list(self, digits: int = 30):
        return [mpmath.nstr(mpmath.re(self.value), digits), mpmath.nstr(mpmath.im(self.value), digits)]


def apply_matrix(gamma, z):
    (a, b), (c, d) = gamma
    return (a * z + b) / (c * z + d)


def mat_mul2(x, y) -> Matrix2:
    return (
        (x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]),
        (x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]),
    )


def reduce_to_fundamental_domain(
    z: UpperHalfPoint, precision_bits: int = 128, max_steps: int = 10000
) -> Tuple[UpperHalfPoint, Matrix2]:
    """(z', gamma) with z' = gamma z, |Re z'| <= 1/2, |z'| >= 1, det gamma = 1."""
    a, b, c, d = 1, 0, 0, 1
    with mp.workprec(precision_bits):
        w = mpmath.mpc(z.value)
        for _ in range(max_steps):
            n = int(mpmath.nint(mpmath.re(w)))
            if n:
                w = w - n
                a, b = a - n * c, b - n * d
            if mpmath.re(w) ** 2 + mpmath.im(w) ** 2 < 1:
                w = -1 / w
                a, b, c, d = -c, -d, a, b
            else:
                break
        else:
            raise PrecisionError(f"fundamental-domain reduction did not settle in {max_steps} steps")
    return UpperHalfPoint(w), ((a, b), (c, d))


@dataclass
class JValue:
    value: mpmath.mpc
    precision_bits: int
    reduced: UpperHalfPoint
    gamma: Matrix2
    metadata: dict = field(default_factory=dict)

    def to_dict(self, digits: int = 30) -> dict:
        return {
            "value": [mpmath.nstr(mpmath.re(self.value), digits), mpmath.nstr(mpmath.im(self.value), digits)],
            "precision_bits": self.precision_bits,
            "reduced": self.reduced.to_list(digits),
            "gamma": [list(r) for r in self.gamma],
            "metadata": self.metadata,
        }


def _lambert_terms(aq, eps, max_terms: int) -> int:
    m = 1
    while True:
        ratio = aq * ((m + 2) / mpmath.mpf(m + 1)) ** 3
        if ratio < 1:
            tail = (m + 1) ** 3 * aq ** (m + 1) / ((1 - aq) * (1 - ratio))
            if tail < eps:
                return m
        m += 1
        if m > max_terms:
            raise PrecisionError(
                f"E4 series needs more than {max_terms} terms; lower precision_bits or "
                f"raise bounds.j_max_terms"
            )


def _pentagonal_terms(aq, eps, max_terms: int) -> int:
    k = 1
    while 2 * aq ** ((k + 1) * (3 * k + 2) // 2) / (1 - aq) >= eps:
        k += 1
        if k > max_terms:
            raise PrecisionError(
                f"pentagonal series needs more than {max_terms} terms; lower precision_bits or "
                f"raise bounds.j_max_terms"
            )
    return k


def j_eval(
    z: UpperHalfPoint,
    precision_bits: int = 128,
    max_terms: int = 2000,
    guard_bits: int = 64,
) -> JValue:
    reduced, gamma = reduce_to_fundamental_domain(z, precision_bits + guard_bits)
    wp = precision_bits + guard_bits
    with mp.workprec(wp):
        q = mpmath.expjpi(2 * reduced.value)
        aq = abs(q)
        eps = mpmath.mpf(2) ** (-wp)
        m_terms = _lambert_terms(aq, eps, max_terms)
        k_terms = _pentagonal_terms(aq, eps, max_terms)

        e4 = mpmath.mpf(1)
        qn = mpmath.mpc(1)
        for n in range(1, m_terms + 1):
            qn *= q
            e4 += 240 * n ** 3 * qn / (1 - qn)

        eta = mpmath.mpc(1)
        for k in range(1, k_terms + 1):
            sign = -1 if k % 2 else 1
            eta += sign * (q ** (k * (3 * k - 1) // 2) + q ** (k * (3 * k + 1) // 2))
        delta = q * eta ** 24
        value = e4 ** 3 / delta
    with mp.workprec(precision_bits):
        value = +value
    metadata = {
        "lambert_terms": m_terms,
        "pentagonal_terms": k_terms,
        "tail_bound": mpmath.nstr(eps, 5),
        "relative_error_bound": mpmath.nstr(1000 * eps, 5),
        "working_bits": wp,
    }
    logger.debug(f"j_eval: {m_terms} Lambert terms, {k_terms} pentagonal terms at {wp} bits")
    return JValue(value, precision_bits, reduced, gamma, metadata)
