import random
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from src.linalg.algebraic import AlgebraicNumber, AlgebraicNumberError, primitive_part
from src.linalg.gram import (
    EnumerationBoundError,
    GramForm,
    hadamard_ratio,
    lattice_volume,
    lll_reduce,
    lll_reduce_vectors,
    random_unimodular,
    short_coefficients,
    small_kernel_basis,
    successive_minima,
    unit_ball_volume,
    vectors_volume,
)
from src.linalg.lattice import (
    IntegerLattice,
    LatticeError,
    determinant,
    hnf,
    intersect,
    is_unimodular,
    kernel_lattice,
    mat_mul,
    orthogonal_complement,
    saturation,
    saturation_index,
    snf,
    unimodular_completion,
)

small_matrices = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(
            st.lists(st.integers(-20, 20), min_size=n, max_size=n), min_size=m, max_size=m
        )
    )
)


# -- normal forms ------------------------------------------------------------

def test_hnf_identity():
    eye = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    h, u = hnf(eye)
    assert h == eye
    assert u == eye


def test_hnf_small_example():
    m = [[2, 4], [6, 8]]
    h, u = hnf(m)
    assert h == [[2, 0], [0, 4]]
    assert mat_mul(u, m) == h
    assert is_unimodular(u)


def test_hnf_zero_matrix():
    h, u = hnf([[0, 0], [0, 0]])
    assert h == [[0, 0], [0, 0]]
    assert u == [[1, 0], [0, 1]]


@given(small_matrices)
def test_hnf_transform_and_idempotence(m):
    h, u = hnf(m)
    assert mat_mul(u, m) == h
    assert abs(determinant(u)) == 1
    assert hnf(h)[0] == h


@given(small_matrices)
def test_hnf_echelon_shape(m):
    h, _ = hnf(m)
    last_pivot = -1
    for r, row in enumerate(h):
        if not any(row):
            assert not any(x for later in h[r:] for x in later)
            break
        c = next(j for j, x in enumerate(row) if x)
        assert c > last_pivot
        assert row[c] > 0
        for above in h[:r]:
            assert 0 <= above[c] < row[c]
        last_pivot = c


def test_snf_examples():
    assert snf([[1, 0], [0, 1]])[0] == [1, 1]
    assert snf([[2, 0], [0, 3]])[0] == [1, 6]
    assert snf([[0]])[0] == [0]


@given(small_matrices)
def test_snf_diagonalises_with_divisibility(m):
    diag, left, right = snf(m)
    d = mat_mul(mat_mul(left, m), right)
    for i, row in enumerate(d):
        for j, x in enumerate(row):
            assert x == (diag[i] if i == j else 0)
    nonzero = [x for x in diag if x]
    assert all(x > 0 for x in nonzero)
    assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))
    assert diag[len(nonzero):] == [0] * (len(diag) - len(nonzero))
    assert is_unimodular(left) and is_unimodular(right)


# -- lattices ----------------------------------------------------------------

def test_lattice_is_canonical():
    a = IntegerLattice.from_rows([[1, 2], [3, 4]])
    b = IntegerLattice.from_rows([[3, 4], [1, 2], [4, 6]])
    assert a == b
    assert a.rank == 2


def test_lattice_rejects_bad_lengths():
    with pytest.raises(LatticeError):
        IntegerLattice.from_rows([[1, 2], [1, 2, 3]])


def test_kernel_and_complement():
    k = kernel_lattice([[1, 1, 1]], 3)
    assert k.rank == 2
    for v in k.basis:
        assert sum(v) == 0
    lat = IntegerLattice.from_rows([[1, 1, 0]])
    comp = orthogonal_complement(lat)
    assert comp.rank == 2
    assert all(v[0] + v[1] == 0 for v in comp.basis)


def test_saturation():
    lat = IntegerLattice.from_rows([[2, 4]])
    assert saturation(lat) == IntegerLattice.from_rows([[1, 2]])
    assert saturation_index(lat) == 2
    assert saturation_index(IntegerLattice.from_rows([[1, 2]])) == 1


def test_intersect():
    a = IntegerLattice.from_rows([[2, 0], [0, 1]])
    b = IntegerLattice.from_rows([[1, 0], [0, 3]])
    assert intersect(a, b) == IntegerLattice.from_rows([[2, 0], [0, 3]])


def test_unimodular_completion_spans_saturation():
    lat = IntegerLattice.from_rows([[2, 4, 0], [0, 0, 3]])
    u, u_inv = unimodular_completion(lat)
    assert mat_mul(u, u_inv) == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert IntegerLattice.from_rows(u[: lat.rank], 3) == saturation(lat)


# -- Gram forms and volumes ---------------------------------------------------

def test_gram_form_rejects_indefinite():
    with pytest.raises(LatticeError):
        GramForm([[1, 2], [2, 1]])


def test_unit_ball_volume():
    assert abs(unit_ball_volume(2) - mpmath.pi) < 1e-12
    assert abs(unit_ball_volume(3) - 4 * mpmath.pi / 3) < 1e-12


def test_lattice_volume_examples():
    form = GramForm.identity(2)
    assert abs(lattice_volume(IntegerLattice.standard(2), form) - 1) < 1e-30
    rect = IntegerLattice.from_rows([[2, 0], [0, 3]])
    assert abs(lattice_volume(rect, form) - 6) < 1e-30


def test_volume_invariant_under_unimodular_change(rng):
    form = GramForm([[2, 1, 0], [1, 3, 1], [0, 1, 4]])
    basis = [[1, 2, 0], [0, 1, 5], [3, 0, 1]]
    base = lattice_volume(IntegerLattice.from_rows(basis), form)
    for _ in range(20):
        u = random_unimodular(3, rng)
        moved = mat_mul(u, basis)
        assert abs(vectors_volume(moved, form) - base) < 1e-9 * base


# -- LLL and minima ---------------------------------------------------------

def test_lll_finds_short_vector():
    lat = IntegerLattice.from_rows([[1, 1000], [0, 1001]])
    reduced = lll_reduce(lat, GramForm.identity(2))
    assert abs(min(reduced.norms) - mpmath.sqrt(2)) < 1e-15
    assert IntegerLattice.from_rows(reduced.vectors, 2) == lat


def test_lll_keeps_orthogonal_basis():
    reduced = lll_reduce(IntegerLattice.from_rows([[3, 0], [0, 1]]), GramForm.identity(2))
    assert sorted(map(tuple, reduced.vectors)) == [(0, 1), (3, 0)]


def test_lll_rejects_bad_delta():
    with pytest.raises(LatticeError):
        lll_reduce_vectors([[1, 0], [0, 1]], GramForm.identity(2), delta=0.2)


def test_lll_breaks_lovasz_ties_lexicographically():
    # under diag(2, 1) with delta 1/2 the unit vectors sit exactly on the Lovasz boundary
    form = GramForm([[2, 0], [0, 1]])
    expected = [[0, 1], [1, 0]]
    assert lll_reduce_vectors([[1, 0], [0, 1]], form, delta=0.5) == expected
    assert lll_reduce_vectors([[0, 1], [1, 0]], form, delta=0.5) == expected


def test_short_coefficients_runs_at_working_precision():
    with mpmath.workprec(128):
        gram = mpmath.matrix([[1, 0], [0, 1 + mpmath.mpf(2) ** -80]])
        radius_sq = 1 + mpmath.mpf(2) ** -90
    assert short_coefficients(gram, radius_sq, 128) == [(1, 0)]
    assert short_coefficients([[2, 1], [1, 2]], 2) == [(-1, 1), (0, 1), (1, 0)]


@settings(max_examples=25)
@given(st.lists(st.lists(st.integers(-9, 9), min_size=3, max_size=3), min_size=3, max_size=3))
def test_lll_preserves_lattice(rows):
    if determinant(rows) == 0:
        return
    lat = IntegerLattice.from_rows(rows)
    reduced = lll_reduce(lat, GramForm.identity(3))
    assert IntegerLattice.from_rows(reduced.vectors, 3) == lat


def test_successive_minima_examples():
    form = GramForm.identity(2)
    report = successive_minima(IntegerLattice.standard(2), form)
    assert [float(x) for x in report.minima] == [1.0, 1.0]
    report = successive_minima(IntegerLattice.from_rows([[1, 0], [0, 5]]), form)
    assert [float(x) for x in report.minima] == [1.0, 5.0]
    assert report.achieving_vectors == [[1, 0], [0, 5]]


def test_successive_minima_rank_bound():
    with pytest.raises(EnumerationBoundError, match="lll_reduce"):
        successive_minima(IntegerLattice.standard(3), GramForm.identity(3), max_rank=2)


def test_minkowski_bound_on_random_lattices():
    from src.app import random_lattice

    rng = random.Random(7)
    for _ in range(30):
        lat, form = random_lattice(rng)
        report = successive_minima(lat, form)
        assert report.minkowski_holds()
        assert all(a <= b for a, b in zip(report.minima, report.minima[1:]))
        for v, m in zip(report.achieving_vectors, report.minima):
            assert lat.contains_vector(v)
            assert abs(form.norm(v) - m) < 1e-20


def test_hadamard_ratio_at_least_one():
    form = GramForm.identity(2)
    assert hadamard_ratio([[1, 0], [0, 1]], form) == 1
    assert hadamard_ratio([[1, 0], [1, 1]], form) > 1


# -- small kernel bases ---------------------------------------------------------

def test_small_kernel_projection():
    phi = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]]
    report = small_kernel_basis(phi, GramForm.identity(4))
    assert report.vectors == [[0, 0, 0, 1]]
    assert report.product == 1


def test_small_kernel_single_row():
    report = small_kernel_basis([[1, 1]], GramForm.identity(2))
    assert report.vectors == [[1, -1]]
    assert abs(report.product - mpmath.sqrt(2)) < 1e-15


def test_small_kernel_trivial_kernel():
    with pytest.raises(LatticeError, match="trivial kernel"):
        small_kernel_basis([[1, 0], [0, 1]], GramForm.identity(2))


def test_small_kernel_close_to_covolume(rng):
    form = GramForm.identity(4)
    for _ in range(10):
        phi = [[rng.randint(-3, 3) for _ in range(4)] for _ in range(2)]
        if sympy.Matrix(phi).rank() != 2:
            continue
        report = small_kernel_basis(phi, form)
        assert len(report.vectors) == 2
        for v in report.vectors:
            assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in phi)
        # any basis has product >= covolume; LLL stays within a small factor of it
        covolume = lattice_volume(report.kernel, form)
        assert covolume * (1 - 1e-20) <= report.product <= 2 * covolume


# -- algebraic numbers --------------------------------------------------------

def test_primitive_part_normalises_sign_and_content():
    assert primitive_part([-2, 4, -6]) == (1, -2, 3)


def test_algebraic_from_rational():
    a = AlgebraicNumber.from_rational(Fraction(-3, 4))
    assert a.is_rational
    assert a.minpoly == (4, 3)
    assert a.as_fraction() == Fraction(-3, 4)


def test_algebraic_from_sympy_sqrt2():
    a = AlgebraicNumber.from_sympy(sympy.sqrt(2))
    assert a.minpoly == (1, 0, -2)
    assert abs(a.value() - mpmath.sqrt(2)) < 1e-15
    assert a.is_real()


def test_algebraic_root_of_unity():
    zeta = AlgebraicNumber.root_of_unity(6)
    assert zeta.minpoly == (1, -1, 1)
    assert abs(zeta.value() - mpmath.expjpi(mpmath.mpf(1) / 3)) < 1e-15


def test_algebraic_rejects_bad_minpoly():
    with pytest.raises(AlgebraicNumberError):
        AlgebraicNumber((3,), mpmath.mpc(0), mpmath.mpf(1))


def test_algebraic_dict_round_trip_preserves_root():
    a = AlgebraicNumber.from_sympy(-sympy.sqrt(3))
    b = AlgebraicNumber.from_dict(a.to_dict())
    assert b == a
    assert mpmath.re(b.value()) < 0
