"""
Explicit plane sets to count on: graphs y -> f(y), parametrised curves,
finite point lists and unions of these.

Every set answers the same question for the counting code: given a
height-restricted first coordinate y (an exact algebraic number), which
second coordinates z make (y, z) a point of the set, and is that fibre
finite?
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
import sympy

from src.linalg.algebraic import AlgebraicNumber

from .enumeration import parse_box
from .heights import KHeightValue, k_height

logger = logging.getLogger(__name__)

T = sympy.Symbol("t")
X = sympy.Symbol("x")


class SampleSpecError(ValueError):
    """Malformed set specification or expression tree."""


# expression trees ----------------------------------------------------------

_BINARY = {
    "sub": lambda a, b: a - b,
    "div": lambda a, b: a / b,
    "pow": lambda a, b: a ** b,
}


def build_expression(node, variables: Dict[str, sympy.Symbol]):
    """Expression tree (const, var, add, sub, mul, div, neg, pow, exp) -> sympy."""
    if isinstance(node, bool):
        raise SampleSpecError(f"unexpected boolean {node} in expression")
    if isinstance(node, int):
        return sympy.Integer(node)
    if isinstance(node, str):
        if node in variables:
            return variables[node]
        try:
            q = Fraction(node)
        except ValueError as e:
            raise SampleSpecError(f"unknown symbol {node!r}") from e
        return sympy.Rational(q.numerator, q.denominator)
    if not isinstance(node, dict) or "op" not in node:
        raise SampleSpecError(f"expression node must be an object with 'op', got {node!r}")
    op = node["op"]
    if op == "const":
        q = Fraction(str(node["value"]))
        return sympy.Rational(q.numerator, q.denominator)
    if op == "var":
        name = node.get("name", next(iter(variables)))
        if name not in variables:
            raise SampleSpecError(f"unknown variable {name!r}")
        return variables[name]
    args = [build_expression(a, variables) for a in node.get("args", [])]
    if op == "add":
        return sympy.Add(*args)
    if op == "mul":
        return sympy.Mul(*args)
    if op == "neg" and len(args) == 1:
        return -args[0]
    if op == "exp" and len(args) == 1:
        return sympy.exp(args[0])
    if op in _BINARY and len(args) == 2:
        return _BINARY[op](*args)
    raise SampleSpecError(f"bad expression node {op!r} with {len(args)} arguments")


# exact heights of expressions -----------------------------------------------

def _rational_power_degree(base: sympy.Rational, exponent: sympy.Rational) -> int:
    """Degree of base^(p/q) for rational base > 0: q / t with t | q maximal, base a perfect t-th power."""
    q = int(exponent.q)
    num, den = int(base.p), int(base.q)
    best = 1
    for t in sympy.divisors(q):
        rn, exact_n = sympy.integer_nthroot(num, t)
        rd, exact_d = sympy.integer_nthroot(den, t)
        if exact_n and exact_d:
            best = max(best, t)
    return q // best


def _is_transcendental(expr) -> bool:
    """Lindemann / Gelfond-Schneider on the atoms of an evaluated expression."""
    for node in sympy.preorder_traversal(expr):
        if isinstance(node, sympy.exp) or node == sympy.E:
            arg = node.args[0] if node.args else sympy.Integer(1)
            if arg != 0 and not arg.has(sympy.pi):
                return True
        if isinstance(node, sympy.Pow):
            base, exponent = node.args
            if exponent.is_Rational or exponent.is_Symbol:
                continue
            if base.is_number and base not in (0, 1) and exponent.is_number and not exponent.is_rational:
                return True
    return False


def algebraic_of(expr, precision_bits: int = 128) -> Optional[AlgebraicNumber]:
    """Exact AlgebraicNumber for an algebraic real expression, None if transcendental."""
    if expr.is_Rational:
        return AlgebraicNumber.from_rational(Fraction(int(expr.p), int(expr.q)))
    if _is_transcendental(expr):
        return None
    try:
        return AlgebraicNumber.from_sympy(expr, precision_bits)
    except sympy.polys.polyerrors.NotAlgebraic:
        return None


def expression_k_height(expr, k: int, precision_bits: int = 128) -> KHeightValue:
    if expr.is_Rational:
        return k_height(Fraction(int(expr.p), int(expr.q)), k)
    if k == 1 and expr.is_rational is False:
        return KHeightValue(k, None)
    if isinstance(expr, sympy.Pow) and expr.base.is_Rational and expr.exp.is_Rational and expr.base > 0:
        if _rational_power_degree(expr.base, expr.exp) > k:
            return KHeightValue(k, None)
    a = algebraic_of(expr, precision_bits)
    if a is None:
        return KHeightValue(k, None)
    return k_height(a, k)


def to_sympy(a: AlgebraicNumber, precision_bits: int = 128):
    """Exact sympy form of a real algebraic number (Rational or CRootOf)."""
    if a.is_rational:
        q = a.as_fraction()
        return sympy.Rational(q.numerator, q.denominator)
    poly = a.poly()
    roots = poly.real_roots()
    target = mpmath.re(a.center)
    best = min(range(len(roots)), key=lambda i: abs(mpmath.mpf(str(sympy.N(roots[i], 40))) - target))
    return roots[best]


def numeric(expr, digits: int = 30) -> float:
    return float(sympy.N(expr, digits))


# sets ------------------------------------------------------------------------

@dataclass
class Fiber:
    """Points (y, z) over one height-restricted y."""

    y: AlgebraicNumber
    z_values: List = field(default_factory=list)
    isolated: bool = True


class DefinableSample(ABC):
    m: int = 1
    n: int = 1

    @property
    def dim(self) -> int:
        return self.m + self.n

    @abstractmethod
    def y_box(self) -> Tuple[Fraction, Fraction]:
        """Box for the height-restricted coordinate."""

    @abstractmethod
    def fiber(self, y: AlgebraicNumber) -> Fiber:
        ...

    @abstractmethod
    def contains(self, point: Sequence[float], tolerance: float = 1e-9) -> bool:
        ...

    def parametrize(self, s) -> Optional[Tuple[float, ...]]:
        return None


class GraphSample(DefinableSample):
    """{(x, f(x)) : x in domain}."""

    def __init__(self, expr, domain):
        self.expr = expr
        self.domain = parse_box(domain)
        self._func = sympy.lambdify(X, expr, modules="mpmath")
        self._cache: Dict[Tuple, Fiber] = {}

    def y_box(self):
        return self.domain

    def fiber(self, y: AlgebraicNumber) -> Fiber:
        key = (y.minpoly, mpmath.nstr(y.center, 25))
        if key not in self._cache:
            z = sympy.sympify(self.expr.subs(X, to_sympy(y)))
            self._cache[key] = Fiber(y, [(z,)], True)
        return self._cache[key]

    def contains(self, point, tolerance: float = 1e-9) -> bool:
        x, y = (float(c) for c in point)
        lo, hi = self.domain
        if not float(lo) - tolerance <= x <= float(hi) + tolerance:
            return False
        return abs(float(self._func(x)) - y) < tolerance

    def parametrize(self, s):
        return float(s), float(self._func(float(s)))


class CurveSample(DefinableSample):
    """{(x1(t), x2(t)) : t in domain} with x1 a rational function of t."""

    def __init__(self, x1, x2, domain, box, isolation_radius: float = 1e-6):
        self.x1, self.x2 = x1, x2
        self.domain = parse_box(domain)
        self.box = parse_box(box)
        self.isolation_radius = isolation_radius
        self._f1 = sympy.lambdify(T, x1, modules="mpmath")
        self._f2 = sympy.lambdify(T, x2, modules="mpmath")
        self._cache: Dict[Tuple, Fiber] = {}

    def y_box(self):
        return self.box

    def _numerator(self, c) -> sympy.Poly:
        numerator, _ = sympy.fraction(sympy.together(self.x1 - c))
        try:
            return sympy.Poly(numerator, T)
        except sympy.PolynomialError as e:
            raise SampleSpecError(f"x1(t) = {self.x1} must be a rational function of t") from e

    def _parameters(self, y: AlgebraicNumber):
        """(isolated, exact real t in the domain with x1(t) = y)."""
        lo, hi = (sympy.Rational(v.numerator, v.denominator) for v in self.domain)
        if y.is_rational:
            poly = self._numerator(to_sympy(y))
            if poly.is_zero:
                return False, []
            return True, [r for r in poly.real_roots() if lo <= r <= hi]
        c = sympy.Symbol("c")
        numerator, _ = sympy.fraction(sympy.together(self.x1 - c))
        try:
            joint = sympy.Poly(numerator, T, c)
        except sympy.PolynomialError as e:
            raise SampleSpecError(f"x1(t) = {self.x1} must be a rational function of t") from e
        minpoly = sympy.Poly(y.poly().as_expr().subs(sympy.Symbol("x"), c), c)
        by_t = sympy.Poly(numerator, T)
        if all(sympy.Poly(coeff, c).rem(minpoly).is_zero for coeff in by_t.all_coeffs()):
            return False, []
        eliminated = sympy.Poly(sympy.resultant(joint.as_expr(), minpoly.as_expr(), c), T)
        if eliminated.is_zero:
            return False, []
        target = mpmath.re(y.center)
        roots = []
        for r in eliminated.real_roots():
            if not lo <= r <= hi:
                continue
            if abs(mpmath.mpf(str(sympy.N(self.x1.subs(T, r), 40))) - target) < mpmath.mpf(10) ** -25:
                roots.append(r)
        return True, roots

    def fiber(self, y: AlgebraicNumber) -> Fiber:
        key = (y.minpoly, mpmath.nstr(y.center, 25))
        if key in self._cache:
            return self._cache[key]
        isolated, roots = self._parameters(y)
        if not isolated:
            logger.warning(f"Fiber over y = {y} is positive-dimensional")
            result = Fiber(y, [], isolated=False)
        else:
            values = [(sympy.sympify(self.x2.subs(T, r)),) for r in dict.fromkeys(roots)]
            result = Fiber(y, values, True)
        self._cache[key] = result
        return result

    def contains(self, point, tolerance: float = 1e-9) -> bool:
        x, y = (float(c) for c in point)
        numerator, _ = sympy.fraction(sympy.together(self.x1 - sympy.Float(x, 30)))
        coeffs = [float(c) for c in sympy.Poly(numerator, T).all_coeffs()]
        if all(abs(c) < tolerance for c in coeffs):
            return any(
                abs(float(self._f2(float(t))) - y) < tolerance
                for t in np.linspace(float(self.domain[0]), float(self.domain[1]), 2001)
            )
        lo, hi = self.domain
        for t in np.roots(coeffs) if len(coeffs) > 1 else []:
            if abs(t.imag) > self.isolation_radius:
                continue
            t = t.real
            if float(lo) - tolerance <= t <= float(hi) + tolerance and abs(float(self._f2(t)) - y) < tolerance:
                return True
        return False

    def parametrize(self, s):
        return float(self._f1(float(s))), float(self._f2(float(s)))


class PointsSample(DefinableSample):
    """A finite list of exact points; the first coordinate is height-restricted."""

    def __init__(self, points: Sequence[Sequence]):
        self.points = [tuple(_exact(c) for c in p) for p in points]
        dims = {len(p) for p in self.points}
        if len(dims) > 1:
            raise SampleSpecError(f"points of mixed dimension {sorted(dims)}")
        total = dims.pop() if dims else 2
        if total < 2:
            raise SampleSpecError("points need at least two coordinates")
        self.n = total - 1

    def y_box(self):
        if not self.points:
            return Fraction(0), Fraction(0)
        values = [numeric(p[0]) for p in self.points]
        return Fraction(math.floor(min(values))), Fraction(math.ceil(max(values)))

    def fiber(self, y: AlgebraicNumber) -> Fiber:
        target = to_sympy(y)
        zs = [p[1:] for p in self.points if sympy.simplify(p[0] - target) == 0]
        return Fiber(y, zs, True)

    def contains(self, point, tolerance: float = 1e-9) -> bool:
        return any(
            all(abs(numeric(c) - float(v)) < tolerance for c, v in zip(p, point)) for p in self.points
        )


class UnionSample(DefinableSample):
    def __init__(self, parts: Sequence[DefinableSample]):
        if not parts:
            raise SampleSpecError("union of no sets")
        if len({(p.m, p.n) for p in parts}) != 1:
            raise SampleSpecError("union parts must share one split")
        self.parts = list(parts)
        self.m, self.n = parts[0].m, parts[0].n

    def y_box(self):
        boxes = [p.y_box() for p in self.parts]
        return min(b[0] for b in boxes), max(b[1] for b in boxes)

    def fiber(self, y: AlgebraicNumber) -> Fiber:
        values, isolated = [], True
        for part in self.parts:
            lo, hi = part.y_box()
            value = Fraction(mpmath.nstr(mpmath.re(y.center), 30)) if not y.is_rational else y.as_fraction()
            if not lo <= value <= hi:
                continue
            f = part.fiber(y)
            values.extend(f.z_values)
            isolated = isolated and f.isolated
        return Fiber(y, values, isolated)

    def contains(self, point, tolerance: float = 1e-9) -> bool:
        return any(p.contains(point, tolerance) for p in self.parts)


def _exact(value):
    if isinstance(value, dict):
        return to_sympy(AlgebraicNumber.from_dict(value))
    q = Fraction(str(value))
    return sympy.Rational(q.numerator, q.denominator)


def parse_sample(data: dict, isolation_radius: float = 1e-6) -> DefinableSample:
    kind = data.get("kind")
    if kind == "graph":
        expr = build_expression(data["expr"], {data.get("var", "x"): X})
        return GraphSample(expr, data["domain"])
    if kind == "curve":
        variables = {data.get("param", "t"): T}
        x1, x2 = (build_expression(e, variables) for e in data["coords"])
        return CurveSample(x1, x2, data["domain"], data["box"], isolation_radius)
    if kind == "points":
        return PointsSample(data["points"])
    if kind == "union":
        return UnionSample([parse_sample(p, isolation_radius) for p in data["parts"]])
    if kind == "empty":
        return PointsSample([])
    raise SampleSpecError(f"unknown set kind {kind!r}")
