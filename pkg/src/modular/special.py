"""
Special and weakly special subvarieties of Y(1)^n and their Mobius fibres.

A subvariety is presented by a strict partition (R0, R1, ..., Rk) of the
coordinate indices 1..n: coordinates in R0 are fixed at quadratic points,
and inside each Ri the non-leading coordinates are g * z_leading for
rational scaling matrices g.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import mpmath
from mpmath import mp
from sympy import divisors, igcd

from src.counting.heights import k_height
from src.linalg.algebraic import AlgebraicNumber

from .jfunction import UpperHalfPoint, apply_matrix

logger = logging.getLogger(__name__)


class SpecialSubvarietyError(ValueError):
    """Malformed partition, quadratic point or scaling matrix."""


@dataclass(frozen=True)
class QuadraticPoint:
    """Root in H of the primitive form a Z^2 + b Z + c, a > 0."""

    a: int
    b: int
    c: int

    def __post_init__(self):
        if self.a <= 0:
            raise SpecialSubvarietyError(f"leading coefficient must be positive, got {self.a}")
        if math.gcd(math.gcd(self.a, self.b), self.c) != 1:
            raise SpecialSubvarietyError(f"form ({self.a}, {self.b}, {self.c}) is not primitive")
        if self.discriminant() >= 0:
            raise SpecialSubvarietyError(
                f"form ({self.a}, {self.b}, {self.c}) has no root in the upper half plane"
            )

    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def root(self, precision_bits: int = 128) -> UpperHalfPoint:
        with mp.workprec(precision_bits):
            re_part = mpmath.mpf(-self.b) / (2 * self.a)
            im_part = mpmath.sqrt(-self.discriminant()) / (2 * self.a)
            return UpperHalfPoint(mpmath.mpc(re_part, im_part))

    def real_coordinates(self) -> Tuple[AlgebraicNumber, AlgebraicNumber]:
        """Re and Im of the root as exact real algebraic numbers."""
        re_part = AlgebraicNumber.from_rational(Fraction(-self.b, 2 * self.a))
        d = -self.discriminant()
        root = math.isqrt(d)
        if root * root == d:
            im_part = AlgebraicNumber.from_rational(Fraction(root, 2 * self.a))
        else:
            # (2a y)^2 = |disc|
            g = math.gcd(4 * self.a * self.a, d)
            im_part = AlgebraicNumber.from_minpoly(
                (4 * self.a * self.a // g, 0, -d // g), mpmath.sqrt(d) / (2 * self.a)
            )
        return re_part, im_part

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        return not ((abs(b) == a or a == c) and b < 0)

    def to_list(self) -> List[int]:
        return [self.a, self.b, self.c]

    @classmethod
    def from_list(cls, data: Sequence[int]) -> "QuadraticPoint":
        a, b, c = (int(x) for x in data)
        return cls(a, b, c)


@dataclass(frozen=True)
class RationalScalingMatrix:
    """Primitive integer 2x2 matrix of positive determinant."""

    entries: Tuple[Tuple[int, int], Tuple[int, int]]

    def __post_init__(self):
        (a, b), (c, d) = self.entries
        if a * d - b * c <= 0:
            raise SpecialSubvarietyError(f"matrix {self.entries} must have positive determinant")
        if igcd(igcd(a, b), igcd(c, d)) != 1:
            raise SpecialSubvarietyError(f"matrix {self.entries} is not primitive")

    @classmethod
    def primitive(cls, rows: Sequence[Sequence]) -> "RationalScalingMatrix":
        """Scale a rational matrix to coprime integer entries."""
        fractions = [Fraction(str(x)) for row in rows for x in row]
        if len(fractions) != 4:
            raise SpecialSubvarietyError(f"expected a 2x2 matrix, got {rows}")
        denominator = 1
        for f in fractions:
            denominator = denominator * f.denominator // math.gcd(denominator, f.denominator)
        ints = [int(f * denominator) for f in fractions]
        g = 0
        for x in ints:
            g = math.gcd(g, x)
        if g == 0:
            raise SpecialSubvarietyError("zero matrix")
        ints = [x // g for x in ints]
        return cls(((ints[0], ints[1]), (ints[2], ints[3])))

    @property
    def n_of_g(self) -> int:
        (a, b), (c, d) = self.entries
        return a * d - b * c

    def to_list(self) -> List[List[int]]:
        return [list(r) for r in self.entries]


def discriminant(q: QuadraticPoint) -> int:
    return q.discriminant()


@dataclass
class SpecialSubvarietyModular:
    n: int
    partition: Tuple[Tuple[int, ...], ...]
    fixed_points: Dict[int, QuadraticPoint] = field(default_factory=dict)
    matrices: Dict[int, RationalScalingMatrix] = field(default_factory=dict)

    def __post_init__(self):
        _check_partition(self.n, self.partition)
        r0 = set(self.partition[0])
        if set(self.fixed_points) != r0:
            raise SpecialSubvarietyError(
                f"fixed points given for {sorted(self.fixed_points)}, expected {sorted(r0)}"
            )
        followers = {i for part in self.partition[1:] for i in part[1:]}
        if set(self.matrices) != followers:
            raise SpecialSubvarietyError(
                f"matrices given for {sorted(self.matrices)}, expected {sorted(followers)}"
            )

    @property
    def dim(self) -> int:
        return len(self.partition) - 1

    def fiber(self, precision_bits: int = 128) -> "MobiusFiber":
        return MobiusFiber(
            self.n,
            self.partition,
            {i: _as_real_matrix(g.entries) for i, g in self.matrices.items()},
            {i: q.root(precision_bits).value for i, q in self.fixed_points.items()},
        )

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "partition": [list(p) for p in self.partition],
            "fixed_points": {str(i): q.to_list() for i, q in sorted(self.fixed_points.items())},
            "matrices": {str(i): g.to_list() for i, g in sorted(self.matrices.items())},
            "dim": self.dim,
            "complexity": complexity(self),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SpecialSubvarietyModular":
        partition = tuple(tuple(int(i) for i in part) for part in data["partition"])
        fixed = {int(i): QuadraticPoint.from_list(v) for i, v in data.get("fixed_points", {}).items()}
        matrices = {
            int(i): RationalScalingMatrix.primitive(v) for i, v in data.get("matrices", {}).items()
        }
        n = int(data.get("n", sum(len(p) for p in partition)))
        return cls(n, partition, fixed, matrices)


def _check_partition(n: int, partition) -> None:
    if not partition:
        raise SpecialSubvarietyError("partition needs at least the (possibly empty) part R0")
    seen = [i for part in partition for i in part]
    if sorted(seen) != list(range(1, n + 1)):
        raise SpecialSubvarietyError(f"partition {partition} is not a partition of 1..{n}")
    if any(len(part) == 0 for part in partition[1:]):
        raise SpecialSubvarietyError("only R0 may be empty")


def complexity(s: SpecialSubvarietyModular) -> int:
    values = [abs(q.discriminant()) for q in s.fixed_points.values()]
    values += [g.n_of_g for g in s.matrices.values()]
    return max(values, default=1)


def _as_real_matrix(rows) -> Tuple[Tuple[mpmath.mpf, mpmath.mpf], Tuple[mpmath.mpf, mpmath.mpf]]:
    (a, b), (c, d) = rows
    return (
        (mpmath.mpf(str(a)), mpmath.mpf(str(b))),
        (mpmath.mpf(str(c)), mpmath.mpf(str(d))),
    )


@dataclass
class MobiusFiber:
    """{z in H^n : z_i = t_i on R0, z_i = g_i z_lead(R) inside each other part R}."""

    n: int
    partition: Tuple[Tuple[int, ...], ...]
    matrices: Dict[int, tuple]
    fixed_points: Dict[int, mpmath.mpc]

    @property
    def dim(self) -> int:
        return len(self.partition) - 1

    def parametrize(self, params: Sequence) -> List[mpmath.mpc]:
        if len(params) != self.dim:
            raise SpecialSubvarietyError(f"fiber of dimension {self.dim} got {len(params)} parameters")
        point: Dict[int, mpmath.mpc] = dict(self.fixed_points)
        for part, w in zip(self.partition[1:], params):
            w = mpmath.mpc(w)
            if not mpmath.im(w) > 0:
                raise SpecialSubvarietyError(f"parameter {w} is not in the upper half plane")
            point[part[0]] = w
            for i in part[1:]:
                point[i] = apply_matrix(self.matrices[i], w)
        return [point[i] for i in range(1, self.n + 1)]

    def membership(self, z: Sequence, tolerance: float = 1e-9) -> bool:
        if len(z) != self.n:
            return False
        z = [mpmath.mpc(x) for x in z]
        for i, t in self.fixed_points.items():
            if abs(z[i - 1] - t) >= tolerance:
                return False
        for part in self.partition[1:]:
            lead = z[part[0] - 1]
            for i in part[1:]:
                if abs(z[i - 1] - apply_matrix(self.matrices[i], lead)) >= tolerance:
                    return False
        return True

    def to_dict(self, digits: int = 20) -> dict:
        return {
            "n": self.n,
            "partition": [list(p) for p in self.partition],
            "dim": self.dim,
            "matrices": {
                str(i): [[mpmath.nstr(x, digits) for x in row] for row in g]
                for i, g in sorted(self.matrices.items())
            },
            "fixed_points": {
                str(i): [mpmath.nstr(mpmath.re(t), digits), mpmath.nstr(mpmath.im(t), digits)]
                for i, t in sorted(self.fixed_points.items())
            },
        }


def mobius_fiber(
    n: int,
    partition: Sequence[Sequence[int]],
    matrices: Dict[int, Sequence[Sequence]],
    fixed_points: Dict[int, UpperHalfPoint],
) -> MobiusFiber:
    partition = tuple(tuple(int(i) for i in part) for part in partition)
    _check_partition(n, partition)
    followers = {i for part in partition[1:] for i in part[1:]}
    if set(matrices) != followers:
        raise SpecialSubvarietyError(f"matrices needed for {sorted(followers)}, got {sorted(matrices)}")
    if set(fixed_points) != set(partition[0]):
        raise SpecialSubvarietyError(
            f"fixed points needed for {sorted(partition[0])}, got {sorted(fixed_points)}"
        )
    real = {}
    for i, rows in matrices.items():
        g = _as_real_matrix(rows)
        if g[0][0] * g[1][1] - g[0][1] * g[1][0] <= 0:
            raise SpecialSubvarietyError(f"matrix for coordinate {i} has non-positive determinant")
        real[i] = g
    return MobiusFiber(n, partition, real, {i: p.value for i, p in fixed_points.items()})


def special_point_parameter_height(s: SpecialSubvarietyModular) -> int:
    """
    2-height of the special parameter t of s: primitive matrix entries and the
    real and imaginary parts of the fixed quadratic points.
    """
    coordinates: List[AlgebraicNumber] = []
    for g in s.matrices.values():
        coordinates += [AlgebraicNumber.from_rational(Fraction(x)) for row in g.entries for x in row]
    for q in s.fixed_points.values():
        coordinates += list(q.real_coordinates())
    height = 1
    for a in coordinates:
        value = k_height(a, 2).value
        if value is None:
            raise ArithmeticError(f"special parameter coordinate {a} has degree above 2")
        height = max(height, value)
    return height


def reduced_quadratic_points(max_disc: int) -> List[QuadraticPoint]:
    """Reduced primitive forms with 0 < |disc| <= max_disc, ordered by |disc|."""
    points = []
    a = 1
    while 3 * a * a <= max_disc:
        for b in range(-a + 1, a + 1):
            c = a
            while 4 * a * c - b * b <= max_disc:
                if math.gcd(math.gcd(a, b), c) == 1 and 4 * a * c - b * b > 0:
                    q = QuadraticPoint(a, b, c)
                    if q.is_reduced():
                        points.append(q)
                c += 1
        a += 1
    points.sort(key=lambda q: (-q.discriminant(), q.a, q.b))
    return points


def primitive_matrices(level: int) -> List[RationalScalingMatrix]:
    """Hermite representatives [[a, b], [0, d]] of primitive matrices of determinant level."""
    out = []
    for a in divisors(level):
        d = level // a
        for b in range(d):
            if math.gcd(math.gcd(a, b), d) == 1:
                out.append(RationalScalingMatrix(((a, b), (0, d))))
    return out


def enumerate_specials(max_complexity: int) -> List[SpecialSubvarietyModular]:
    """Canonical special subvarieties of Y(1)^2 with complexity <= max_complexity."""
    specials = [SpecialSubvarietyModular(2, ((), (1,), (2,)))]
    for level in range(1, max_complexity + 1):
        specials.append(
            SpecialSubvarietyModular(
                2, ((), (1, 2)), matrices={2: RationalScalingMatrix(((level, 0), (0, 1)))}
            )
        )
    cm = reduced_quadratic_points(max_complexity)
    for q in cm:
        specials.append(SpecialSubvarietyModular(2, ((1,), (2,)), fixed_points={1: q}))
        specials.append(SpecialSubvarietyModular(2, ((2,), (1,)), fixed_points={2: q}))
    for q1 in cm:
        for q2 in cm:
            specials.append(SpecialSubvarietyModular(2, ((1, 2),), fixed_points={1: q1, 2: q2}))
    logger.info(f"Enumerated {len(specials)} special subvarieties of complexity <= {max_complexity}")
    return specials
