"""
Unlikely-intersection search for curves in G_m^n, n >= 3.

For primitive exponent vectors a, the equation curve(t)^a = 1 is turned
into a polynomial N_a(t). Two independent relations meet the curve where
N_a and N_b share an irreducible factor, so factoring each N_a once and
grouping vectors by factor finds every hit within the bounds.
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, List, Sequence, Tuple

import mpmath
import sympy

from src.linalg.algebraic import AlgebraicNumber, image_minpoly, integer_coefficients
from src.linalg.lattice import IntegerLattice, intersect, kernel_lattice
from src.torus.coordinates import Coordinate, valuation_matrix
from src.torus.heights import multiplicative_height, weil_height
from src.torus.subgroups import SubgroupSpec

logger = logging.getLogger(__name__)

T = sympy.Symbol("t")


class DegenerateCurveError(ValueError):
    """The curve lies in a proper algebraic subgroup or has a vanishing coordinate."""


@dataclass
class CurveCoordinate:
    """lam * t^valuation * prod f_j^e_j with primitive irreducible f_j (leading > 0)."""

    expr: sympy.Expr
    valuation: int
    unit: sympy.Poly
    scalar: Fraction
    factors: Dict[Tuple[int, ...], int]


def _laurent_in_t(expr) -> Dict[int, Fraction]:
    expanded = sympy.expand(sympy.sympify(expr, locals={"t": T}))
    extra = expanded.free_symbols - {T}
    if extra:
        raise ValueError(f"unexpected symbols {sorted(map(str, extra))} in curve coordinate")
    terms: Dict[int, Fraction] = {}
    for term in sympy.Add.make_args(expanded):
        coeff, mono = term.as_coeff_Mul()
        k = mono.as_powers_dict().get(T, 0) if mono != 1 else 0
        if not (coeff.is_Rational and sympy.Integer(k) == k):
            raise ValueError(f"term {term} is not a rational Laurent monomial in t")
        terms[int(k)] = terms.get(int(k), Fraction(0)) + Fraction(int(coeff.p), int(coeff.q))
    return {k: c for k, c in terms.items() if c}


def parse_coordinate(expr) -> CurveCoordinate:
    terms = _laurent_in_t(expr)
    if not terms:
        raise DegenerateCurveError(f"coordinate {expr} is identically zero on the torus")
    v = min(terms)
    unit = sympy.Poly(sum(sympy.Rational(c.numerator, c.denominator) * T ** (k - v)
                          for k, c in terms.items()), T, domain="QQ")
    content, factors = unit.factor_list()
    scalar = Fraction(int(sympy.Rational(content).p), int(sympy.Rational(content).q))
    table: Dict[Tuple[int, ...], int] = {}
    for fac, mult in factors:
        cs = list(integer_coefficients(fac))
        # fac = (lc / prim_lc) * prim, fold the rational scale into the scalar
        raw = [sympy.Rational(c) for c in fac.all_coeffs()]
        scale = raw[0] / cs[0]
        scalar *= Fraction(int(scale.p), int(scale.q)) ** mult
        table[tuple(cs)] = table.get(tuple(cs), 0) + mult
    return CurveCoordinate(sympy.sympify(expr, locals={"t": T}), v, unit, scalar, table)


@dataclass
class UnlikelyHit:
    parameter: AlgebraicNumber
    parameter_height: object
    subgroup: SubgroupSpec
    relations: Tuple[Tuple[int, ...], Tuple[int, ...]]
    point: List[AlgebraicNumber]
    heights: list
    verified: bool
    conjugates: int = field(default=1)

    def to_dict(self) -> dict:
        return {
            "parameter": self.parameter.to_dict(),
            "parameter_height": mpmath.nstr(self.parameter_height, 20),
            "subgroup": self.subgroup.to_dict(),
            "relations": [list(r) for r in self.relations],
            "point": [c.to_dict() for c in self.point],
            "heights": [mpmath.nstr(h, 20) for h in self.heights],
            "verified": self.verified,
            "conjugates": self.conjugates,
        }


def curve_lattices(coords: Sequence[CurveCoordinate]) -> Tuple[IntegerLattice, IntegerLattice]:
    """(L, M) for the curve: monomials constant on it, and those equal to a root of unity."""
    n = len(coords)
    keys = sorted({k for c in coords for k in c.factors})
    rows = [[c.valuation for c in coords]]
    rows += [[c.factors.get(k, 0) for c in coords] for k in keys]
    lat_l = kernel_lattice(rows, n)
    scalars = [Coordinate.rational(c.scalar) for c in coords]
    lat_m = intersect(lat_l, kernel_lattice(valuation_matrix(scalars), n))
    return lat_l, lat_m


def relation_polynomial(coords: Sequence[CurveCoordinate], a: Sequence[int]) -> sympy.Poly:
    """Numerator of curve(t)^a - 1 after clearing powers of t and denominators."""
    s = sum(k * c.valuation for k, c in zip(a, coords))
    plus = sympy.Poly(T ** max(s, 0), T, domain="QQ")
    minus = sympy.Poly(T ** max(-s, 0), T, domain="QQ")
    for k, c in zip(a, coords):
        if k > 0:
            plus = plus * c.unit ** k
        elif k < 0:
            minus = minus * c.unit ** (-k)
    return plus - minus


def primitive_vectors(n: int, bound: int) -> List[Tuple[int, ...]]:
    """Primitive vectors with sup-norm <= bound, first nonzero entry positive."""
    out = []
    for v in itertools.product(range(-bound, bound + 1), repeat=n):
        lead = next((x for x in v if x), 0)
        if lead <= 0:
            continue
        g = 0
        for x in v:
            g = gcd(g, x)
        if g == 1:
            out.append(v)
    return out


def parse_curve(data) -> List[CurveCoordinate]:
    exprs = data["coordinates"] if isinstance(data, dict) else data
    return [parse_coordinate(e) for e in exprs]


def unlikely_search(
    curve: Sequence,
    exponent_bound: int,
    t_height_bound: int,
    precision_bits: int = 128,
) -> List[UnlikelyHit]:
    coords = [c if isinstance(c, CurveCoordinate) else parse_coordinate(c) for c in curve]
    n = len(coords)
    if n < 3:
        raise ValueError(f"unlikely search needs n >= 3 coordinates, got {n}")
    lat_l, lat_m = curve_lattices(coords)
    if lat_l.rank == n:
        raise DegenerateCurveError("all curve coordinates are constant")
    if lat_m.rank > 0:
        raise DegenerateCurveError(
            f"curve lies in a proper algebraic subgroup: x^a is a root of unity on it "
            f"for a in {lat_m.rows()}"
        )
    if lat_l.rank > 0:
        logger.info(f"Curve lies in a translate of a subtorus, constant monomials {lat_l.rows()}")

    off_torus = [tuple(integer_coefficients(c.unit))
                 for c in coords if c.unit.degree() > 0]
    by_factor: Dict[Tuple[int, ...], List[Tuple[int, ...]]] = {}
    height_cache: Dict[Tuple[int, ...], object] = {}
    vectors = primitive_vectors(n, exponent_bound)
    logger.info(f"Unlikely search: {len(vectors)} primitive vectors, sup-norm <= {exponent_bound}")
    for a in vectors:
        if lat_l.contains_vector(a):
            continue
        rel = relation_polynomial(coords, a)
        if rel.is_zero or rel.degree() < 1:
            continue
        for fac, _mult in rel.factor_list()[1]:
            cs = integer_coefficients(fac)
            if cs == (1, 0):
                continue
            if any(sympy.Poly(list(u), T).rem(sympy.Poly(list(cs), T)).is_zero for u in off_torus):
                continue
            if cs not in height_cache:
                t0 = AlgebraicNumber.from_minpoly(cs, 0, precision_bits)
                height_cache[cs] = multiplicative_height(t0, precision_bits)
            if height_cache[cs] > t_height_bound * (1 + mpmath.mpf(10) ** -12):
                continue
            by_factor.setdefault(cs, []).append(a)

    hits: List[UnlikelyHit] = []
    for cs in sorted(by_factor):
        group = sorted(by_factor[cs])
        seen = set()
        for a, b in itertools.combinations(group, 2):
            lattice = IntegerLattice.from_rows([a, b], n)
            if lattice.rank < 2 or lattice in seen:
                continue
            seen.add(lattice)
            hits.append(_make_hit(coords, cs, a, b, lattice, height_cache[cs], precision_bits))
    hits.sort(key=lambda h: (list(h.parameter.minpoly), h.subgroup.relations.rows()))
    logger.info(f"Unlikely search finished: {len(hits)} hits on {len(by_factor)} parameter orbits")
    return hits


def _make_hit(coords, cs, a, b, lattice, t_height, precision_bits) -> UnlikelyHit:
    fac = sympy.Poly(list(cs), T)
    verified = all(relation_polynomial(coords, v).rem(fac).is_zero for v in (a, b))
    with mpmath.mp.workprec(precision_bits):
        roots = sorted(
            AlgebraicNumber.from_minpoly(cs, 0, precision_bits).conjugates(precision_bits),
            key=lambda r: (mpmath.im(r) < 0, mpmath.re(r), abs(mpmath.im(r))),
        )
    t0 = AlgebraicNumber.from_minpoly(cs, roots[0], precision_bits)
    point = []
    for c in coords:
        num = c.unit * sympy.Poly(T ** max(c.valuation, 0), T)
        den = sympy.Poly(T ** max(-c.valuation, 0), T)
        point.append(image_minpoly(t0, num, den, precision_bits))
    heights = [weil_height(p, precision_bits) for p in point]
    return UnlikelyHit(
        parameter=t0,
        parameter_height=t_height,
        subgroup=SubgroupSpec(lattice),
        relations=(tuple(a), tuple(b)),
        point=point,
        heights=heights,
        verified=verified,
        conjugates=len(cs) - 1,
    )
