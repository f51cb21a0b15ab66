import random
from fractions import Fraction
from math import gcd

import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from src.linalg.algebraic import AlgebraicNumber
from src.linalg.lattice import IntegerLattice
from src.torus.coordinates import Coordinate, UnsupportedCoordinateError, monomial
from src.torus.heights import HeightError, multiplicative_height, weil_height
from src.torus.subgroups import (
    ContainmentError,
    MonomialSubvariety,
    SubgroupSpec,
    constant_monomial_lattices,
    defect_condition_check,
    defect_report,
    random_nested_pair,
    smallest_special,
    subgroup_dim,
    torsion_translate,
)
from src.torus.torsion import (
    LaurentPolynomial,
    evaluates_to_zero,
    reduce_cyclotomic,
    torsion_points_on_curve,
)
from src.torus.unlikely import (
    DegenerateCurveError,
    parse_coordinate,
    primitive_vectors,
    unlikely_search,
)


# -- coordinates ------------------------------------------------------------

def test_negative_rational_is_modulus_times_minus_one():
    c = Coordinate.rational(-2)
    assert (c.modulus, c.order, c.exponent) == (Fraction(2), 2, 1)


def test_root_exponent_is_reduced():
    c = Coordinate(Fraction(1), 4, 2)
    assert (c.order, c.exponent) == (2, 1)
    assert Coordinate(Fraction(1), 3, 3).is_one


def test_group_law():
    z = Coordinate.root_of_unity(3)
    assert (z * z * z).is_one
    assert (z * z.inverse()).is_one
    q = Coordinate.rational(Fraction(2, 3)) ** -2
    assert q.modulus == Fraction(9, 4)
    assert monomial([Coordinate.rational(2), Coordinate.rational(3)], [1, -1]).modulus == Fraction(2, 3)


def test_prime_valuations():
    assert Coordinate.rational(Fraction(12, 5)).prime_valuations() == {2: 2, 3: 1, 5: -1}


def test_parse_forms():
    assert Coordinate.parse("-1/2") == Coordinate(Fraction(1, 2), 2, 1)
    assert Coordinate.parse({"modulus": "2/3", "root": [1, 4]}) == Coordinate(Fraction(2, 3), 4, 1)
    assert Coordinate.parse(5) == Coordinate(Fraction(5))


def test_algebraic_round_trip():
    c = Coordinate(Fraction(2), 3, 1)
    a = c.to_algebraic()
    assert a.minpoly == (1, 2, 4)
    assert Coordinate.from_algebraic(a) == c


def test_irrational_modulus_is_rejected():
    with pytest.raises(UnsupportedCoordinateError):
        Coordinate.from_algebraic(AlgebraicNumber.from_sympy(sympy.sqrt(2)))


def test_zero_is_rejected():
    with pytest.raises(UnsupportedCoordinateError):
        Coordinate.rational(0)


# -- heights ----------------------------------------------------------------

def test_weil_height_of_rational():
    h = weil_height(AlgebraicNumber.from_rational(Fraction(3, 2)))
    assert abs(h - mpmath.log(3)) < 1e-15
    assert multiplicative_height(AlgebraicNumber.from_rational(Fraction(-3, 7))) == 7


def test_weil_height_of_sqrt2_and_roots_of_unity():
    assert abs(weil_height(AlgebraicNumber.from_sympy(sympy.sqrt(2))) - mpmath.log(2) / 2) < 1e-15
    assert weil_height(AlgebraicNumber.root_of_unity(5)) == 0


@settings(max_examples=25)
@given(
    st.integers(1, 30),
    st.integers(1, 30),
    st.sampled_from([1, 2, 3, 5, 7]),
    st.sampled_from([1, -1]),
    st.integers(-3, 3).filter(lambda n: n != 0),
)
def test_weil_height_scales_with_powers_and_inverts(p, q, r, sign, n):
    a = sign * sympy.Rational(p, q) * sympy.sqrt(r)
    h = weil_height(AlgebraicNumber.from_sympy(a))
    assert abs(weil_height(AlgebraicNumber.from_sympy(a ** n)) - abs(n) * h) < 1e-20
    assert abs(weil_height(AlgebraicNumber.from_sympy(1 / a)) - h) < 1e-20


def test_height_rejects_reducible_polynomial():
    with pytest.raises(HeightError):
        weil_height(AlgebraicNumber((1, 0, -1), mpmath.mpc(1), mpmath.mpf("0.5")))


# -- subgroups and defects --------------------------------------------------

def test_subgroup_spec():
    s = SubgroupSpec(IntegerLattice.from_rows([[2, 0]]))
    assert s.dim == 1
    assert not s.is_connected
    assert s.contains_point([Coordinate.rational(-1), Coordinate.rational(5)])
    assert not s.contains_point([Coordinate.rational(2), Coordinate.rational(5)])


def test_defect_of_generic_point():
    report = defect_report(MonomialSubvariety.point([2, 3]))
    assert (report.delta, report.delta_geo) == (2, 0)
    assert (report.rank_L, report.rank_M) == (2, 0)
    assert report.invariants_hold()


def test_defect_of_torsion_point():
    report = defect_report(MonomialSubvariety.point([{"root": [1, 3]}, -1]))
    assert (report.delta, report.delta_geo) == (0, 0)


def test_defect_of_torsion_coset():
    v = MonomialSubvariety.build([2, 2], [[1, 1]])
    report = defect_report(v)
    assert report.dim_A == 1
    assert (report.delta, report.delta_geo) == (0, 0)
    assert report.rank_L == report.rank_M == 1


def test_torsion_translate_order():
    t = torsion_translate(MonomialSubvariety.build([2, -2], [[1, 1]]))
    assert t.order == 2
    assert monomial(t.point, [1, -1]) == Coordinate.rational(-1)
    with pytest.raises(ValueError, match="not a torsion coset"):
        torsion_translate(MonomialSubvariety.build([2, 3], [[1, 1]]))


def test_containment_and_point_at():
    b = MonomialSubvariety.build([1, 5], [[2, 0]])
    assert b.point_at([Coordinate.rational(3)]) == (Coordinate.rational(3), Coordinate.rational(5))
    assert b.contains(MonomialSubvariety.point([7, 5]))
    assert not b.contains(MonomialSubvariety.point([7, 6]))


def test_defect_condition_requires_containment():
    with pytest.raises(ContainmentError):
        defect_condition_check(MonomialSubvariety.point([2, 3]), MonomialSubvariety.point([3, 2]))


def test_smallest_special():
    v = smallest_special([2, 4])
    assert v.dim == 1
    assert v.directions == IntegerLattice.from_rows([[1, 2]])
    assert smallest_special([-1, {"root": [1, 3]}]).dim == 0


def test_defect_condition_on_random_pairs():
    rng = random.Random(11)
    for _ in range(60):
        a, b = random_nested_pair(rng)
        assert b.contains(a)
        assert defect_report(a).invariants_hold()
        assert defect_report(b).invariants_hold()
        assert defect_condition_check(a, b)


# -- torsion points ---------------------------------------------------------

def test_laurent_parse():
    f = LaurentPolynomial.parse("x + y - 1")
    assert f.terms == {(1, 0): 1, (0, 1): 1, (0, 0): -1}
    g = LaurentPolynomial.parse("x*y^-1 - 1")
    assert g.terms == {(1, -1): 1, (0, 0): -1}
    with pytest.raises(ValueError):
        LaurentPolynomial.parse("x + z")


def test_reduce_cyclotomic():
    assert reduce_cyclotomic({0: 1, 1: 1, 2: 1}, 3) == (0, 0)
    assert reduce_cyclotomic({0: 1}, 4) == (1, 0)


def test_line_has_two_torsion_points():
    f = LaurentPolynomial.parse("x + y - 1")
    result = torsion_points_on_curve(f, 30)
    assert [(p.order, p.exponents) for p in result.points] == [(6, (1, 5)), (6, (5, 1))]
    assert result.cosets == []
    assert evaluates_to_zero(f, 6, 1, 5)
    assert not evaluates_to_zero(f, 6, 1, 1)


def test_subtorus_points_are_flagged():
    f = LaurentPolynomial.parse("x*y^-1 - 1")
    result = torsion_points_on_curve(f, 3)
    assert [c.to_dict() for c in result.cosets] == [{"character": [1, -1], "root_order": 1}]
    assert len(result.points) == 4
    assert all(p.on_coset for p in result.points)
    assert all(p.exponents[0] == p.exponents[1] for p in result.points)


@pytest.mark.parametrize("power", [1, 2, 3, 4])
def test_repeated_factor_keeps_torsion_points(power):
    f = LaurentPolynomial.parse(f"(x + y - 1)**{power}")
    result = torsion_points_on_curve(f, 12)
    assert [(p.order, p.exponents) for p in result.points] == [(6, (1, 5)), (6, (5, 1))]


def test_singular_torsion_point_is_found():
    # (1, 1) is a double root of f(1, y)
    f = LaurentPolynomial.parse("(y - 1)**2 - (x - 1)**3")
    result = torsion_points_on_curve(f, 6)
    assert (1, (0, 0)) in [(p.order, p.exponents) for p in result.points]


laurent_terms = st.dictionaries(
    st.tuples(st.integers(0, 3), st.integers(0, 3)),
    st.integers(-2, 2).filter(bool),
    min_size=2,
    max_size=4,
)


@settings(max_examples=25)
@given(laurent_terms)
def test_torsion_output_is_closed_under_galois(terms):
    f = LaurentPolynomial(terms)
    result = torsion_points_on_curve(f, 10)
    found = {(p.order, p.exponents) for p in result.points}
    for m, (a, b) in found:
        assert evaluates_to_zero(f, m, a, b)
        for u in range(1, m + 1):
            if gcd(u, m) == 1:
                assert (m, ((u * a) % m, (u * b) % m)) in found


def test_galois_orbit_of_order_twelve():
    # y = i x or y = -i x, so every x of order 12 gives a point of order 12
    f = LaurentPolynomial.parse("x**2 + y**2")
    result = torsion_points_on_curve(f, 12)
    orders = {p.order for p in result.points}
    assert 12 in orders
    twelve = {p.exponents for p in result.points if p.order == 12}
    assert all(((5 * a) % 12, (5 * b) % 12) in twelve for a, b in twelve)


def test_torsion_search_rejects_bad_order():
    with pytest.raises(ValueError):
        torsion_points_on_curve(LaurentPolynomial.parse("x - 2"), 0)


# -- unlikely intersections -------------------------------------------------

def test_primitive_vectors():
    assert primitive_vectors(2, 1) == [(0, 1), (1, -1), (1, 0), (1, 1)]


def test_parse_coordinate_factors():
    c = parse_coordinate("2*t**2 - 2")
    assert c.valuation == 0
    assert c.scalar == 2
    assert c.factors == {(1, -1): 1, (1, 1): 1}
    assert parse_coordinate("t**-1").valuation == -1


def test_unlikely_search_finds_sixth_root_of_unity():
    hits = unlikely_search(["t", "1 - t", "2"], exponent_bound=5, t_height_bound=1)
    assert hits
    assert all(h.verified for h in hits)
    assert any(h.parameter.minpoly == (1, -1, 1) for h in hits)
    for h in hits:
        assert h.subgroup.codim == 2
        assert h.parameter_height <= 1 + 1e-12


def test_unlikely_search_rejects_curve_in_subgroup():
    with pytest.raises(DegenerateCurveError):
        unlikely_search(["t", "t", "2"], exponent_bound=2, t_height_bound=1)


def test_unlikely_search_needs_three_coordinates():
    with pytest.raises(ValueError):
        unlikely_search(["t", "1 - t"], exponent_bound=2, t_height_bound=1)


def test_subgroup_dim():
    assert subgroup_dim(SubgroupSpec(IntegerLattice.zero(3))) == 3
    assert subgroup_dim(SubgroupSpec(IntegerLattice.from_rows([[1, 1, 0], [0, 2, 1]], 3))) == 1
    assert subgroup_dim(SubgroupSpec(IntegerLattice.from_rows([[1, 0, 0], [0, 1, 0], [0, 0, 1]], 3))) == 0


def test_constant_monomial_lattices_of_a_curve_coset():
    v = MonomialSubvariety.build([1, 1, 3], [[1, 2, 0]])
    lat_l, lat_m = constant_monomial_lattices(v)
    expected_l = IntegerLattice.from_rows([[2, -1, 0], [0, 0, 1]], 3)
    expected_m = IntegerLattice.from_rows([[2, -1, 0]], 3)
    assert lat_l.contains(expected_l) and expected_l.contains(lat_l)
    assert lat_m.contains(expected_m) and expected_m.contains(lat_m)
    assert lat_l.contains(lat_m)


def test_constant_monomial_lattices_extremes():
    whole = MonomialSubvariety.build([1, 1], [[1, 0], [0, 1]])
    lat_l, lat_m = constant_monomial_lattices(whole)
    assert lat_l.rank == 0 and lat_m.rank == 0
    torsion = MonomialSubvariety.point([Coordinate.root_of_unity(6)])
    lat_l, lat_m = constant_monomial_lattices(torsion)
    assert lat_l.rank == 1 and lat_m.rank == 1
    assert lat_m.contains_vector([1])
