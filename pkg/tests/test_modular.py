import random

import mpmath
import pytest
from mpmath import mp

from src.app import random_sl2z, random_tau
from src.modular.jfunction import (
    PrecisionError,
    UpperHalfPoint,
    apply_matrix,
    j_eval,
    reduce_to_fundamental_domain,
)
from src.modular.polynomials import (
    ModularLevelError,
    detect_modular_relation,
    graph_residual,
    j_coefficients,
    modular_polynomial,
    psi,
)
from src.modular.special import (
    QuadraticPoint,
    RationalScalingMatrix,
    SpecialSubvarietyError,
    SpecialSubvarietyModular,
    complexity,
    enumerate_specials,
    mobius_fiber,
    primitive_matrices,
    reduced_quadratic_points,
    special_point_parameter_height,
)

TAU = UpperHalfPoint.from_parts("0.1", "1.2")


# -- j-function ---------------------------------------------------------------

def test_upper_half_point_rejects_lower_half():
    with pytest.raises(ValueError):
        UpperHalfPoint.from_parts("0.5", "-1")


def test_parse_forms():
    assert UpperHalfPoint.parse("0.25,2").value == mpmath.mpc("0.25", "2")
    z = UpperHalfPoint.parse("(1+sqrt(3)i)/2")
    assert abs(z.value - mpmath.mpc(0.5, mpmath.sqrt(3) / 2)) < 1e-15


def test_reduction_lands_in_fundamental_domain():
    rng = random.Random(5)
    for _ in range(20):
        z = UpperHalfPoint.from_parts(f"{rng.uniform(-5, 5):.6f}", f"{rng.uniform(0.01, 0.5):.6f}")
        w, gamma = reduce_to_fundamental_domain(z)
        (a, b), (c, d) = gamma
        assert a * d - b * c == 1
        assert abs(mpmath.re(w.value)) <= 0.5 + 1e-30
        assert abs(w.value) >= 1 - 1e-30
        with mp.workprec(128):
            assert abs(apply_matrix(gamma, z.value) - w.value) < 1e-20


def test_j_special_values():
    j_i = j_eval(UpperHalfPoint.parse("i")).value
    assert abs(j_i - 1728) < 1e-9
    with mp.workprec(128):
        rho = UpperHalfPoint(mpmath.mpc(mpmath.mpf(1) / 2, mpmath.sqrt(3) / 2))
    assert abs(j_eval(rho).value) < 1e-9


def test_j_metadata_records_truncation():
    value = j_eval(TAU, precision_bits=128, guard_bits=64)
    assert value.metadata["working_bits"] == 192
    assert value.metadata["lambert_terms"] >= 1
    assert value.metadata["pentagonal_terms"] >= 1


def test_j_is_modular_invariant():
    rng = random.Random(3)
    for _ in range(10):
        tau = random_tau(rng)
        gamma = random_sl2z(rng)
        with mp.workprec(192):
            moved = UpperHalfPoint(apply_matrix(gamma, tau.value))
        assert abs(j_eval(tau).value - j_eval(moved).value) < 1e-8


def test_j_term_budget_is_enforced():
    with pytest.raises(PrecisionError):
        j_eval(TAU, precision_bits=2000, max_terms=3)


# -- modular polynomials ------------------------------------------------------

def test_j_coefficients():
    assert j_coefficients(4) == (1, 744, 196884, 21493760)


def test_psi():
    assert [psi(n) for n in range(1, 7)] == [1, 3, 4, 6, 6, 12]


def test_phi_1():
    assert modular_polynomial(1).terms == {(1, 0): 1, (0, 1): -1}


def test_phi_2_known_coefficients():
    phi = modular_polynomial(2)
    assert phi.degree_x == phi.degree_y == 3
    assert phi.is_symmetric()
    assert phi.terms[(3, 0)] == 1
    assert phi.terms[(2, 2)] == -1
    assert phi.terms[(2, 1)] == 1488
    assert phi.terms[(2, 0)] == -162000
    assert phi.terms[(1, 1)] == 40773375
    assert phi.terms[(1, 0)] == 8748000000
    assert phi.terms[(0, 0)] == -157464000000000


@pytest.mark.parametrize("level", [3, 4, 5])
def test_phi_symmetric_with_degree_psi(level):
    phi = modular_polynomial(level)
    assert phi.is_symmetric()
    assert phi.degree_x == psi(level)
    assert phi.terms[(psi(level), 0)] == 1


@pytest.mark.parametrize("level, matrix", [(2, ((2, 0), (0, 1))), (3, ((1, 1), (0, 3)))])
def test_graph_residual_vanishes(level, matrix):
    res = graph_residual(modular_polynomial(level), TAU, matrix)
    assert res.residual < 1e-6


def test_level_bound():
    with pytest.raises(ModularLevelError):
        modular_polynomial(11, max_level=10)
    with pytest.raises(ModularLevelError):
        modular_polynomial(0)


def test_cache_round_trip(tmp_path):
    first = modular_polynomial(2, cache_dir=str(tmp_path))
    assert (tmp_path / "phi_2.json").exists()
    assert modular_polynomial(2, cache_dir=str(tmp_path)).terms == first.terms


def test_corrupt_cache_is_recomputed(tmp_path):
    (tmp_path / "phi_2.json").write_text("{not json", encoding="utf-8")
    phi = modular_polynomial(2, cache_dir=str(tmp_path))
    assert phi.terms[(1, 1)] == 40773375


def test_detect_relation():
    doubled = UpperHalfPoint.from_parts("0.2", "2.4")
    found = detect_modular_relation(TAU, doubled, 3)
    assert found is not None and found[0] == 2
    assert detect_modular_relation(TAU, TAU, 2)[0] == 1
    with pytest.raises(ModularLevelError):
        detect_modular_relation(TAU, TAU, 12, max_level=10)


def test_no_relation_for_unrelated_points():
    other = UpperHalfPoint.from_parts("0.37", "1.71")
    assert detect_modular_relation(TAU, other, 2) is None


# -- special subvarieties ---------------------------------------------------

def test_quadratic_point_validation():
    with pytest.raises(SpecialSubvarietyError):
        QuadraticPoint(1, 0, -1)
    with pytest.raises(SpecialSubvarietyError):
        QuadraticPoint(2, 0, 2)
    q = QuadraticPoint(1, 0, 1)
    assert q.discriminant() == -4
    assert abs(q.root().value - mpmath.mpc(0, 1)) < 1e-30


def test_reduced_quadratic_points():
    assert [q.to_list() for q in reduced_quadratic_points(4)] == [[1, 1, 1], [1, 0, 1]]


def test_primitive_matrices_count_psi():
    for n in range(1, 7):
        assert len(primitive_matrices(n)) == psi(n)


def test_scaling_matrix():
    g = RationalScalingMatrix.primitive([["1/2", 0], [0, 1]])
    assert g.to_list() == [[1, 0], [0, 2]]
    assert g.n_of_g == 2
    with pytest.raises(SpecialSubvarietyError):
        RationalScalingMatrix(((0, 1), (1, 0)))


def test_complexity_and_parameter_height():
    graph = SpecialSubvarietyModular.from_dict(
        {"n": 2, "partition": [[], [1, 2]], "matrices": {"2": [[3, 0], [0, 1]]}}
    )
    assert graph.dim == 1
    assert complexity(graph) == 3
    assert special_point_parameter_height(graph) == 3
    cm = SpecialSubvarietyModular.from_dict({"n": 1, "partition": [[1]], "fixed_points": {"1": [1, 0, 1]}})
    assert cm.dim == 0
    assert complexity(cm) == 4


def test_partition_validation():
    with pytest.raises(SpecialSubvarietyError):
        SpecialSubvarietyModular.from_dict({"n": 2, "partition": [[], [1, 2]]})
    with pytest.raises(SpecialSubvarietyError):
        SpecialSubvarietyModular.from_dict({"n": 3, "partition": [[], [1, 2]], "matrices": {"2": [[1, 0], [0, 1]]}})


def test_fiber_parametrize_and_membership():
    special = SpecialSubvarietyModular.from_dict(
        {"n": 3, "partition": [[3], [1, 2]], "fixed_points": {"3": [1, 0, 1]}, "matrices": {"2": [[2, 0], [0, 1]]}}
    )
    fiber = special.fiber()
    w = mpmath.mpc("0.1", "1.3")
    z = fiber.parametrize([w])
    assert abs(z[1] - 2 * w) < 1e-30
    assert abs(z[2] - mpmath.mpc(0, 1)) < 1e-30
    assert fiber.membership(z)
    assert not fiber.membership([w, 3 * w, mpmath.mpc(0, 1)])
    with pytest.raises(SpecialSubvarietyError):
        fiber.parametrize([mpmath.mpc(0, -1)])


def test_mobius_fiber_rejects_negative_determinant():
    with pytest.raises(SpecialSubvarietyError):
        mobius_fiber(2, [[], [1, 2]], {2: [[0, 1], [1, 0]]}, {})


def test_enumerate_specials_contains_graphs():
    specials = enumerate_specials(3)
    graphs = [s for s in specials if s.partition == ((), (1, 2))]
    assert [s.matrices[2].n_of_g for s in graphs] == [1, 2, 3]
    assert all(complexity(s) <= 3 for s in specials)
