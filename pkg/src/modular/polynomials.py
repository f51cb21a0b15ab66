"""
Classical modular polynomials Phi_N(X, Y) and numerical relation tests.

Phi_N is assembled exactly: the power sums of j over the psi(N) coset
representatives (a*z + b)/d of level N are Laurent series in q whose
polar parts determine them as polynomials in j(z); Newton's identities
then give the elementary symmetric functions. Nothing is floating point
until evaluation.
"""

import json
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import mpmath
import sympy
from mpmath import mp
from sympy import divisor_sigma, divisors, mobius, primefactors

from .jfunction import UpperHalfPoint, apply_matrix, j_eval

logger = logging.getLogger(__name__)

Y = sympy.Symbol("Y")


class ModularLevelError(ValueError):
    """Level outside the configured modular-polynomial bound."""


def psi(n: int) -> int:
    """Dedekind psi: n * prod_{p | n} (1 + 1/p), the number of cosets of level n."""
    result = n
    for p in primefactors(n):
        result = result // p * (p + 1)
    return result


def _series_mul(a: List[int], b: List[int], length: int) -> List[int]:
    out = [0] * length
    for i, x in enumerate(a[:length]):
        if x == 0:
            continue
        for j in range(min(len(b), length - i)):
            out[i + j] += x * b[j]
    return out


def _series_inverse(a: List[int], length: int) -> List[int]:
    # a[0] == 1
    inv = [0] * length
    inv[0] = 1
    for n in range(1, length):
        inv[n] = -sum(a[k] * inv[n - k] for k in range(1, min(n, len(a) - 1) + 1))
    return inv


@lru_cache(maxsize=None)
def j_coefficients(count: int) -> Tuple[int, ...]:
    """The first `count` coefficients of q*j(q): 1, 744, 196884, ..."""
    length = max(count, 1)
    pentagonal = [0] * length
    k = 0
    while True:
        done = True
        for kk in (k, -k) if k else (0,):
            e = kk * (3 * kk - 1) // 2
            if e < length:
                pentagonal[e] = -1 if kk % 2 else 1
                done = False
        if done:
            break
        k += 1
    eta24 = [1] + [0] * (length - 1)
    square = pentagonal
    power = 24
    while power:
        if power & 1:
            eta24 = _series_mul(eta24, square, length)
        power >>= 1
        if power:
            square = _series_mul(square, square, length)
    e4 = [1] + [240 * int(divisor_sigma(n, 3)) for n in range(1, length)]
    e4_cubed = _series_mul(_series_mul(e4, e4, length), e4, length)
    return tuple(_series_mul(e4_cubed, _series_inverse(eta24, length), length)[:count])


@dataclass(frozen=True)
class ModularPolynomial:
    """Phi_N as a map (i, j) -> coefficient of X^i Y^j."""

    level: int
    terms: Dict[Tuple[int, int], int]

    @property
    def degree_x(self) -> int:
        return max(i for i, _ in self.terms)

    @property
    def degree_y(self) -> int:
        return max(j for _, j in self.terms)

    def is_symmetric(self) -> bool:
        return all(self.terms.get((j, i)) == c for (i, j), c in self.terms.items())

    def evaluate(self, x, y):
        total = 0
        for (i, j), c in self.terms.items():
            total += c * x ** i * y ** j
        return total

    def abs_weight(self, x_abs, y_abs):
        return sum(abs(c) * x_abs ** i * y_abs ** j for (i, j), c in self.terms.items())

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "terms": [[i, j, str(c)] for (i, j), c in sorted(self.terms.items())],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ModularPolynomial":
        return cls(int(data["level"]), {(int(i), int(j)): int(c) for i, j, c in data["terms"]})


def _divisor_weight(a: int, d: int, n: int) -> int:
    """
    Sum over b mod d of exp(2 pi i a b n / d^2) restricted to primitive (a, b, d):
    inclusion-exclusion over the common divisors of a and d.
    """
    total = 0
    for e in divisors(math.gcd(a, d)):
        m = d // e
        if n % m == 0:
            total += int(mobius(e)) * m
    return total


def _compute_modular_polynomial(level: int) -> ModularPolynomial:
    if level == 1:
        return ModularPolynomial(1, {(1, 0): 1, (0, 1): -1})
    degree = psi(level)
    top = level * degree
    coeffs = j_coefficients(top + 1)
    # powers[m][i]: coefficient of q^(i - m) in j^m, for i = 0..m
    powers: List[List[int]] = [[1]]
    running = [1] + [0] * top
    for m in range(1, top + 1):
        running = _series_mul(running, list(coeffs), top + 1)
        powers.append(running[: m + 1])

    power_sums = []
    for k in range(1, degree + 1):
        series: Dict[int, int] = {}
        for a in divisors(level):
            d = level // a
            for n in range(-k, 1):
                c = powers[k][n + k]
                if c == 0:
                    continue
                w = _divisor_weight(a, d, n)
                if w == 0:
                    continue
                exponent = a * n // d
                series[exponent] = series.get(exponent, 0) + c * w
        poly: Dict[int, int] = {}
        for m in range(-min(series), 0, -1):
            c = series.get(-m, 0)
            if c == 0:
                continue
            poly[m] = c
            for i in range(m + 1):
                series[i - m] = series.get(i - m, 0) - c * powers[m][i]
        poly[0] = series.get(0, 0)
        power_sums.append(sympy.Poly(sum(c * Y ** m for m, c in poly.items()), Y, domain="QQ"))

    elementary = [sympy.Poly(1, Y, domain="QQ")]
    for k in range(1, degree + 1):
        acc = sympy.Poly(0, Y, domain="QQ")
        for i in range(1, k + 1):
            term = elementary[k - i] * power_sums[i - 1]
            acc = acc + term if i % 2 else acc - term
        elementary.append(acc * sympy.Rational(1, k))

    terms: Dict[Tuple[int, int], int] = {}
    for k, e_k in enumerate(elementary):
        sign = -1 if k % 2 else 1
        for (j,), c in e_k.terms():
            if c.q != 1:
                raise ArithmeticError(f"non-integral coefficient {c} in Phi_{level}")
            if c:
                terms[(degree - k, j)] = sign * int(c.p)
    phi = ModularPolynomial(level, terms)
    if not phi.is_symmetric():
        raise ArithmeticError(f"Phi_{level} came out asymmetric")
    return phi


@lru_cache(maxsize=None)
def _cached_polynomial(level: int) -> ModularPolynomial:
    logger.info(f"Computing modular polynomial N={level}")
    phi = _compute_modular_polynomial(level)
    logger.info(f"Phi_{level}: {len(phi.terms)} terms, degree {phi.degree_x}")
    return phi


def modular_polynomial(
    level: int, max_level: int = 10, cache_dir: Optional[str] = None
) -> ModularPolynomial:
    if level < 1 or level > max_level:
        raise ModularLevelError(
            f"level {level} outside 1..{max_level}; raise bounds.modular_level to go further"
        )
    if cache_dir is None:
        return _cached_polynomial(level)
    path = Path(cache_dir) / f"phi_{level}.json"
    if path.exists():
        try:
            with open(path, "r", encoding="utf-8") as f:
                phi = ModularPolynomial.from_dict(json.load(f))
            if phi.level == level:
                return phi
            logger.warning(f"Cache file {path} holds level {phi.level}, recomputing")
        except (OSError, ValueError, KeyError) as e:
            logger.warning(f"Unreadable cache file {path}: {e}")
    phi = _cached_polynomial(level)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(phi.to_dict(), f)
        logger.debug(f"Wrote {path}")
    except OSError as e:
        logger.warning(f"Could not write cache file {path}: {e}")
    return phi


@dataclass
class RelationResidual:
    level: int
    residual: mpmath.mpf
    working_bits: int

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "residual": mpmath.nstr(self.residual, 10),
            "working_bits": self.working_bits,
        }


def _residual_at(phi, j1_of, j2_of, precision_bits, guard_bits, max_terms):
    rough1 = abs(j1_of(64))
    rough2 = abs(j2_of(64))
    with mp.workprec(64):
        weight = phi.abs_weight(rough1, rough2)
        boost = max(0, int(mpmath.ceil(mpmath.log(weight, 2)))) if weight > 0 else 0
    bits = precision_bits + boost + guard_bits
    j1 = j1_of(bits)
    j2 = j2_of(bits)
    with mp.workprec(bits):
        value = abs(phi.evaluate(j1, j2))
    return RelationResidual(phi.level, value, bits)


def relation_residual(
    phi: ModularPolynomial,
    z1: UpperHalfPoint,
    z2: UpperHalfPoint,
    precision_bits: int = 128,
    guard_bits: int = 64,
    max_terms: int = 2000,
) -> RelationResidual:
    """|Phi_N(j(z1), j(z2))| at a working precision that absorbs the coefficient sizes."""

    def j_of(z):
        return lambda bits: j_eval(z, bits, max_terms, guard_bits).value

    return _residual_at(phi, j_of(z1), j_of(z2), precision_bits, guard_bits, max_terms)


def graph_residual(
    phi: ModularPolynomial,
    tau: UpperHalfPoint,
    matrix,
    precision_bits: int = 128,
    guard_bits: int = 64,
    max_terms: int = 2000,
) -> RelationResidual:
    """Residual at (j(tau), j(g tau)) with g tau formed at the working precision."""

    def j1(bits):
        return j_eval(tau, bits, max_terms, guard_bits).value

    def j2(bits):
        with mp.workprec(bits + guard_bits):
            image = UpperHalfPoint(apply_matrix(matrix, tau.value))
        return j_eval(image, bits, max_terms, guard_bits).value

    return _residual_at(phi, j1, j2, precision_bits, guard_bits, max_terms)


def detect_modular_relation(
    z1: UpperHalfPoint,
    z2: UpperHalfPoint,
    n_max: int,
    tolerance: float = 1e-8,
    precision_bits: int = 128,
    max_level: int = 10,
    cache_dir: Optional[str] = None,
    guard_bits: int = 64,
    max_terms: int = 2000,
) -> Optional[Tuple[int, mpmath.mpf]]:
    """
    Smallest N <= n_max with |Phi_N(j(z1), j(z2))| < tolerance.

    A miss is numerical evidence of modular independence up to level n_max,
    never a proof.
    """
    if n_max > max_level:
        raise ModularLevelError(f"n_max={n_max} exceeds the modular-polynomial bound {max_level}")
    for level in range(1, n_max + 1):
        phi = modular_polynomial(level, max_level, cache_dir)
        res = relation_residual(phi, z1, z2, precision_bits, guard_bits, max_terms)
        logger.debug(f"Phi_{level} residual {mpmath.nstr(res.residual, 5)}")
        if res.residual < tolerance:
            return level, res.residual
    return None
