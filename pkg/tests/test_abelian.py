from fractions import Fraction

import mpmath
import pytest

from src.abelian.complexity import complexity_bound, lambda_value, torsion_coset_complexity
from src.abelian.elliptic import (
    EllipticCurveQ,
    NotOnCurveError,
    canonical_height,
    doubling_limit,
    height_pairing,
    naive_height,
    parse_point,
)
from src.abelian.homs import HomomorphismError, SearchBoundError, holomorphy_residual, small_annihilating_hom
from src.abelian.torus import (
    PolarizationError,
    PolarizedTorus,
    Subtorus,
    TangentSpaceError,
    degree,
    degree_comparability,
    elliptic_torus,
    minimal_torsion_order,
    nearby_period,
    product_torus,
    small_period_basis,
)
from src.app import projection_generators
from src.linalg.lattice import IntegerLattice

TAU = "0.3+1.1i"
DIAGONAL = [[1, 0, 1, 0], [0, 1, 0, 1]]


@pytest.fixture(scope="module")
def curve_e():
    return elliptic_torus(TAU)


@pytest.fixture(scope="module")
def e_times_e(curve_e):
    return product_torus(curve_e, curve_e)


# -- polarized tori -------------------------------------------------------------

def test_principal_polarization_has_degree_one(curve_e):
    assert abs(degree(curve_e.full()) - 1) < 1e-30
    assert curve_e.integrality_deviation < 1e-30


def test_torus_validation():
    with pytest.raises(PolarizationError):
        elliptic_torus("0.3-1i")
    with pytest.raises(PolarizationError):
        PolarizedTorus(1, [[1], ["0.3+1.1i"]], [[mpmath.mpf("1.5") / mpmath.mpf("1.1")]])
    with pytest.raises(PolarizationError):
        PolarizedTorus(1, [[1], [2]], [[1]])
    with pytest.raises(PolarizationError):
        PolarizedTorus(1, [[1]], [[1]])


def test_torus_dict_round_trip(curve_e):
    again = PolarizedTorus.from_dict(curve_e.to_dict())
    assert abs(degree(again.full()) - 1) < 1e-15


def test_diagonal_subtorus(e_times_e):
    diag = Subtorus(e_times_e, IntegerLattice.from_rows(DIAGONAL))
    assert diag.dim == 1
    assert abs(degree(diag) - 2) < 1e-30
    assert abs(degree(e_times_e.full()) - 1) < 1e-30


def test_subtorus_must_be_complex(e_times_e):
    with pytest.raises(TangentSpaceError):
        Subtorus(e_times_e, IntegerLattice.from_rows([[1, 0, 0, 0], [0, 0, 1, 0]]))
    with pytest.raises(TangentSpaceError):
        Subtorus(e_times_e, IntegerLattice.from_rows([[1, 0, 0, 0]]))


def test_unsaturated_lattice_is_saturated(e_times_e):
    t = Subtorus(e_times_e, IntegerLattice.from_rows([[2, 0, 2, 0], [0, 1, 0, 1]]))
    assert t.lattice == IntegerLattice.from_rows(DIAGONAL)


def test_degree_comparability_of_scaled_form(curve_e):
    report = degree_comparability(curve_e.full(), [[2 * curve_e.hermitian[0, 0]]])
    assert abs(report.ratio_low - 2) < 1e-25
    assert abs(report.constant - 2) < 1e-25


def test_small_period_basis(curve_e):
    report = small_period_basis(curve_e.full())
    assert report.achieving_vectors == [[1, 0], [0, 1]]
    assert abs(report.minima[0] - mpmath.sqrt(mpmath.mpf(1) / mpmath.mpf("1.1"))) < 1e-15
    assert report.minkowski_holds()
    assert report.achieved_constant > 0


def test_nearby_period_on_full_torus(curve_e):
    z = [mpmath.mpc("3.2", "0.1")]
    found = nearby_period(z, curve_e.full())
    assert found.omega_coords == [3, 0]
    bound = found.z_norm + sum(found.basis_norms) / 2
    assert found.omega_norm <= bound + 1e-20


def test_nearby_period_on_diagonal(e_times_e):
    diag = Subtorus(e_times_e, IntegerLattice.from_rows(DIAGONAL))
    z = [mpmath.mpc("1.1", "0.2"), mpmath.mpc("0.1", "0.2")]
    found = nearby_period(z, diag)
    assert found.tangent_residual < 1e-20
    remainder = found.remainder
    assert abs(remainder[0] - remainder[1]) < 1e-20
    with pytest.raises(TangentSpaceError):
        nearby_period([mpmath.mpc("0.5"), mpmath.mpc(0)], diag)


def test_minimal_torsion_order(e_times_e):
    diag = Subtorus(e_times_e, IntegerLattice.from_rows(DIAGONAL))
    assert minimal_torsion_order(["1/3", "0", "0", "0"], diag) == 3
    assert minimal_torsion_order(["1/4", "0", "1/4", "0"], diag) == 1
    assert minimal_torsion_order(["1/2", "1/5", "0", "0"], e_times_e.full()) == 1


# -- complexity -----------------------------------------------------------------

def test_torsion_coset_complexity(curve_e, e_times_e):
    assert torsion_coset_complexity(3, curve_e.full()).total == 3
    diag = Subtorus(e_times_e, IntegerLattice.from_rows(DIAGONAL))
    c = torsion_coset_complexity(1, diag)
    assert (c.arith, c.total) == (1, 2)
    with pytest.raises(ValueError):
        torsion_coset_complexity(0, diag)


def test_lambda_value():
    assert lambda_value([(1, 2), (2, 1)], 1, 2) == 2
    assert lambda_value([], 2, 2) == 0
    with pytest.raises(ValueError):
        lambda_value([], 1, 2)
    with pytest.raises(ValueError):
        lambda_value([(1, 1)], 3, 2)


def test_complexity_bound():
    arith, total = complexity_bound(1, 2, 1, 3, 2)
    assert arith == 2 ** 7
    assert total == mpmath.mpf(2) ** 60 * 9
    with pytest.raises(ValueError):
        complexity_bound(0, 2, 1, 3, 2)


# -- annihilating homomorphisms -----------------------------------------------

def test_projections_are_holomorphic(curve_e, e_times_e):
    for gen in projection_generators():
        assert holomorphy_residual(gen, e_times_e, curve_e) < 1e-30


def test_difference_map_kills_diagonal_point(curve_e, e_times_e):
    z = mpmath.mpc("0.1234567", "0.4567891")
    found = small_annihilating_hom(projection_generators(), [z, z], e_times_e, curve_e)
    assert found.coefficients == [1, -1]
    assert found.residual == 0
    assert found.matrix == [[1, 0, -1, 0], [0, 1, 0, -1]]
    assert found.surjective


def test_exact_torsion_residual(curve_e, e_times_e):
    beta = [Fraction(1, 3), Fraction(0), Fraction(1, 3), Fraction(0)]
    found = small_annihilating_hom(projection_generators(), None, e_times_e, curve_e, period_coords=beta)
    assert found.coefficients == [1, -1]
    assert found.residual == Fraction(0)


def test_generator_validation(curve_e, e_times_e):
    gens = projection_generators()
    z = [mpmath.mpc("0.1", "0.2")] * 2
    with pytest.raises(HomomorphismError, match="linearly dependent"):
        small_annihilating_hom([gens[0], gens[0]], z, e_times_e, curve_e)
    with pytest.raises(HomomorphismError, match="complex structures"):
        small_annihilating_hom([[[1, 0, 0, 0], [0, 0, 1, 0]]], z, e_times_e, curve_e)
    with pytest.raises(HomomorphismError):
        small_annihilating_hom([[[1, 0], [0, 1]]], z, e_times_e, curve_e)
    with pytest.raises(HomomorphismError):
        small_annihilating_hom([], z, e_times_e, curve_e)


def test_no_annihilator_in_box(curve_e):
    # a non-torsion point of E; only the zero map kills it
    z = [mpmath.mpc("0.1234567", "0.4567891")]
    with pytest.raises(SearchBoundError):
        small_annihilating_hom([[[1, 0], [0, 1]]], z, curve_e, curve_e, box=1)


# -- elliptic curves ------------------------------------------------------------

@pytest.fixture(scope="module")
def curve():
    return EllipticCurveQ(Fraction(0), Fraction(-2))


def test_curve_validation(curve):
    with pytest.raises(NotOnCurveError):
        curve.point(1, 1)
    with pytest.raises(ValueError):
        EllipticCurveQ(Fraction(0), Fraction(0))
    assert parse_point("O") is None
    assert parse_point(["3", "5"]) == (Fraction(3), Fraction(5))


def test_group_law(curve):
    p = curve.point(3, 5)
    assert curve.double(p) == (Fraction(129, 100), Fraction(-383, 1000))
    assert curve.multiply(p, 3) == curve.add(curve.double(p), p)
    assert curve.multiply(p, -1) == curve.negate(p)
    assert curve.add(p, curve.negate(p)) is None
    assert curve.is_on_curve(curve.multiply(p, 5))


def test_torsion_orders(curve):
    e = EllipticCurveQ(Fraction(0), Fraction(1))
    assert e.torsion_order(e.point(-1, 0)) == 2
    assert e.torsion_order(e.point(0, 1)) == 3
    assert e.torsion_order(e.point(2, 3)) == 6
    assert curve.torsion_order(curve.point(3, 5)) is None


def test_naive_height(curve):
    assert abs(naive_height(curve.point(3, 5)) - mpmath.log(3)) < 1e-15
    assert naive_height(None) == 0


def test_canonical_height_is_quadratic(curve):
    p = curve.point(3, 5)
    h = canonical_height(curve, p)
    assert h > 0
    assert abs(canonical_height(curve, curve.double(p)) - 4 * h) < 1e-6
    assert abs(canonical_height(curve, curve.multiply(p, 3)) - 9 * h) < 1e-6
    assert abs(canonical_height(curve, curve.negate(p)) - h) < 1e-12
    assert abs(height_pairing(curve, p, p) - h) < 1e-6


def test_parallelogram_law():
    e = EllipticCurveQ(Fraction(0), Fraction(17))
    p, q = e.point(-1, 4), e.point(2, 5)
    lhs = canonical_height(e, e.add(p, q)) + canonical_height(e, e.add(p, e.negate(q)))
    rhs = 2 * canonical_height(e, p) + 2 * canonical_height(e, q)
    assert abs(lhs - rhs) < 1e-5


@pytest.mark.parametrize(
    "a, b, xy",
    [(0, 1, (-1, 0)), (0, 1, (0, 1)), (0, 1, (2, 3)), (-1, 0, (0, 0))],
)
def test_torsion_points_have_height_zero(a, b, xy):
    e = EllipticCurveQ(Fraction(a), Fraction(b))
    assert canonical_height(e, e.point(*xy)) == 0


def test_doubling_limit_approaches_canonical_height(curve):
    p = curve.point(3, 5)
    limit = doubling_limit(curve, p, steps=6)
    assert len(limit.values) == 7
    assert abs(limit.estimate - canonical_height(curve, p)) < 0.01


def test_doubling_limit_stops_at_torsion():
    e = EllipticCurveQ(Fraction(0), Fraction(1))
    limit = doubling_limit(e, e.point(-1, 0), steps=6)
    assert limit.converged
    assert limit.estimate == 0
