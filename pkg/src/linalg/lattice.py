"""
Exact integer lattice algebra.

Hermite and Smith normal forms with unimodular transforms, and the lattice
operations built on them (kernels, orthogonal complements, saturation).
Everything here works on Python integers, so results are exact at any size.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

try:
    from sympy.core.intfunc import igcdex
except ImportError:  # sympy < 1.13
    from sympy.core.numbers import igcdex

logger = logging.getLogger(__name__)

Matrix = List[List[int]]


class LatticeError(ValueError):
    """Raised for malformed lattice input or degenerate lattice data."""


def identity_matrix(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    if not a:
        return []
    cols = len(b[0]) if b else 0
    return [
        [sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(cols)]
        for i in range(len(a))
    ]


def transpose(a: Sequence[Sequence[int]], ncols: Optional[int] = None) -> Matrix:
    if not a:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*a)]


def determinant(a: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(row) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _combine_rows(rows: Matrix, r: int, i: int, s: int, t: int, u: int, v: int):
    """Replace (row_r, row_i) by (s*row_r + t*row_i, u*row_r + v*row_i)."""
    a, b = rows[r], rows[i]
    rows[r] = [s * x + t * y for x, y in zip(a, b)]
    rows[i] = [u * x + v * y for x, y in zip(a, b)]


def hnf(matrix: Sequence[Sequence[int]]) -> Tuple[Matrix, Matrix]:
    """
    Row Hermite normal form.

    Returns (H, U) with U unimodular and U * matrix = H. H is in row echelon
    form, pivots are positive, entries above a pivot lie in [0, pivot) and
    zero rows sit at the bottom.
    """
    h = [[int(x) for x in row] for row in matrix]
    m = len(h)
    n = len(h[0]) if m else 0
    u = identity_matrix(m)

    r = 0
    for c in range(n):
        if r >= m:
            break
        for i in range(r + 1, m):
            b = h[i][c]
            if b == 0:
                continue
            a = h[r][c]
            s, t, g = igcdex(a, b)
            s, t, g = int(s), int(t), int(g)
            _combine_rows(h, r, i, s, t, -b // g, a // g)
            _combine_rows(u, r, i, s, t, -b // g, a // g)
        pivot = h[r][c]
        if pivot == 0:
            continue
        if pivot < 0:
            h[r] = [-x for x in h[r]]
            u[r] = [-x for x in u[r]]
            pivot = -pivot
        for i in range(r):
            q = h[i][c] // pivot
            if q:
                h[i] = [x - q * y for x, y in zip(h[i], h[r])]
                u[i] = [x - q * y for x, y in zip(u[i], u[r])]
        r += 1
    return h, u


def _snf_full(matrix: Sequence[Sequence[int]]):
    a = [[int(x) for x in row] for row in matrix]
    m = len(a)
    n = len(a[0]) if m else 0
    left = identity_matrix(m)
    right = identity_matrix(n)
    right_inv = identity_matrix(n)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        left[i], left[j] = left[j], left[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in right:
            row[i], row[j] = row[j], row[i]
        right_inv[i], right_inv[j] = right_inv[j], right_inv[i]

    def add_row(dst, src, q):
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        left[dst] = [x + q * y for x, y in zip(left[dst], left[src])]

    def add_col(dst, src, q):
        # col_dst += q * col_src; the inverse gets row_src -= q * row_dst
        for row in a:
            row[dst] += q * row[src]
        for row in right:
            row[dst] += q * row[src]
        right_inv[src] = [x - q * y for x, y in zip(right_inv[src], right_inv[dst])]

    t = 0
    while t < min(m, n):
        entries = [
            (abs(a[i][j]), i, j)
            for i in range(t, m)
            for j in range(t, n)
            if a[i][j] != 0
        ]
        if not entries:
            break
        _, pi, pj = min(entries)
        swap_rows(t, pi)
        swap_cols(t, pj)

        while True:
            clean = True
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // a[t][t]))
                    if a[i][t]:
                        clean = False
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // a[t][t]))
                    if a[t][j]:
                        clean = False
            if not clean:
                cands = [(abs(a[i][t]), i, t) for i in range(t, m) if a[i][t]]
                cands += [(abs(a[t][j]), t, j) for j in range(t, n) if a[t][j]]
                _, pi, pj = min(cands)
                swap_rows(t, pi)
                swap_cols(t, pj)
                continue
            bad = next(
                (
                    i
                    for i in range(t + 1, m)
                    for j in range(t + 1, n)
                    if a[i][j] % a[t][t]
                ),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)

        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            left[t] = [-x for x in left[t]]
        t += 1

    diag = [a[i][i] for i in range(min(m, n))]
    return diag, left, right, right_inv


def snf(matrix: Sequence[Sequence[int]]) -> Tuple[List[int], Matrix, Matrix]:
    """
    Smith normal form.

    Returns (diag, left, right) with left * matrix * right diagonal, the
    diagonal nonnegative and d1 | d2 | ... (zeros last).
    """
    diag, left, right, _ = _snf_full(matrix)
    return diag, left, right


@dataclass(frozen=True)
class IntegerLattice:
    """
    Sublattice of Z^n held by its canonical basis (row HNF, zero rows removed).

    Build instances with IntegerLattice.from_rows(); the dataclass fields are
    assumed canonical.
    """

    basis: Tuple[Tuple[int, ...], ...]
    ambient_dim: int

    def __post_init__(self):
        if self.ambient_dim < 1:
            raise LatticeError(f"ambient_dim must be positive, got {self.ambient_dim}")
        for row in self.basis:
            if len(row) != self.ambient_dim:
                raise LatticeError(
                    f"basis vector {row} has length {len(row)}, expected {self.ambient_dim}"
                )

    @classmethod
    def from_rows(
        cls, rows: Iterable[Sequence[int]], ambient_dim: Optional[int] = None
    ) -> "IntegerLattice":
        rows = [[int(x) for x in row] for row in rows]
        if ambient_dim is None:
            if not rows:
                raise LatticeError("ambient_dim is required for an empty generator list")
            ambient_dim = len(rows[0])
        for row in rows:
            if len(row) != ambient_dim:
                raise LatticeError(
                    f"generator {row} has length {len(row)}, expected {ambient_dim}"
                )
        if not rows:
            return cls((), ambient_dim)
        h, _ = hnf(rows)
        basis = tuple(tuple(row) for row in h if any(row))
        return cls(basis, ambient_dim)

    @classmethod
    def zero(cls, ambient_dim: int) -> "IntegerLattice":
        return cls((), ambient_dim)

    @classmethod
    def standard(cls, ambient_dim: int) -> "IntegerLattice":
        return cls(tuple(tuple(r) for r in identity_matrix(ambient_dim)), ambient_dim)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def rows(self) -> Matrix:
        return [list(r) for r in self.basis]

    def contains_vector(self, v: Sequence[int]) -> bool:
        if len(v) != self.ambient_dim:
            return False
        return IntegerLattice.from_rows(self.rows() + [list(v)], self.ambient_dim) == self

    def contains(self, other: "IntegerLattice") -> bool:
        return all(self.contains_vector(row) for row in other.basis)

    def to_dict(self) -> dict:
        return {"ambient_dim": self.ambient_dim, "basis": self.rows()}

    @classmethod
    def from_dict(cls, data: dict) -> "IntegerLattice":
        return cls.from_rows(data.get("basis", []), int(data["ambient_dim"]))


def kernel_lattice(matrix: Sequence[Sequence[int]], ncols: int) -> IntegerLattice:
    """Integer kernel {v in Z^ncols : matrix * v = 0}; always saturated."""
    rows = [list(r) for r in matrix if any(r)]
    if not rows:
        return IntegerLattice.standard(ncols)
    h, u = hnf(transpose(rows))
    kernel = [u[i] for i in range(len(h)) if not any(h[i])]
    return IntegerLattice.from_rows(kernel, ncols)


def orthogonal_complement(lat: IntegerLattice) -> IntegerLattice:
    """{a in Z^n : a . b = 0 for all b in lat}."""
    return kernel_lattice(lat.rows(), lat.ambient_dim)


def saturation(lat: IntegerLattice) -> IntegerLattice:
    """(Q * lat) intersected with Z^n, read off the Smith form."""
    if lat.rank == 0:
        return lat
    diag, _, _, right_inv = _snf_full(lat.rows())
    r = sum(1 for d in diag if d != 0)
    return IntegerLattice.from_rows(right_inv[:r], lat.ambient_dim)


def saturation_index(lat: IntegerLattice) -> int:
    """Index [saturation(lat) : lat]."""
    diag, _, _ = snf(lat.rows()) if lat.rank else ([], None, None)
    index = 1
    for d in diag:
        if d:
            index *= d
    return index


def intersect(a: IntegerLattice, b: IntegerLattice) -> IntegerLattice:
    """Intersection of two sublattices of the same Z^n."""
    if a.ambient_dim != b.ambient_dim:
        raise LatticeError("lattices live in different ambient spaces")
    if a.rank == 0 or b.rank == 0:
        return IntegerLattice.zero(a.ambient_dim)
    # x*A = y*B  <=>  (x, -y) in the left kernel of [A; B]
    stacked = a.rows() + b.rows()
    left_kernel = kernel_lattice(transpose(stacked), len(stacked))
    vectors = []
    for coeffs in left_kernel.basis:
        x = coeffs[: a.rank]
        vectors.append(
            [sum(x[i] * a.basis[i][j] for i in range(a.rank)) for j in range(a.ambient_dim)]
        )
    return IntegerLattice.from_rows(vectors, a.ambient_dim)


def is_unimodular(u: Sequence[Sequence[int]]) -> bool:
    return len(u) == (len(u[0]) if u else 0) and abs(determinant(u)) == 1


def unimodular_completion(lat: IntegerLattice) -> Tuple[Matrix, Matrix]:
    """
    Unimodular U whose first rank(lat) rows span saturation(lat), with U^-1.

    Coordinates x = y * U split Z^n into the saturated sublattice (first
    block) and a complement; y = x * U^-1 recovers them.
    """
    n = lat.ambient_dim
    if lat.rank == 0:
        return identity_matrix(n), identity_matrix(n)
    _, _, right, right_inv = _snf_full(lat.rows())
    return right_inv, right
