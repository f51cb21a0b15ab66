"""
Geometry of numbers under a real Gram form.

Lattice bases are exact integer vectors; inner products come from a
symmetric positive-definite Gram matrix held in mpmath at a configurable
precision. Provides volumes, LLL reduction, successive minima by
Fincke-Pohst enumeration and small kernel bases (Siegel-type).
"""

import logging
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import mpmath
from mpmath import mp
from sympy import Matrix

from src.linalg.lattice import (
    IntegerLattice,
    LatticeError,
    kernel_lattice,
)

logger = logging.getLogger(__name__)

DEFAULT_PRECISION = 128
DEFAULT_ENUMERATION_RANK = 10


class EnumerationBoundError(LatticeError):
    """Rank or size exceeds the configured enumeration bound."""


class GramForm:
    """
    Symmetric positive-definite Gram matrix on Z^dim.

    Validated at construction: symmetry within `tolerance` and a successful
    Cholesky factorisation (all leading principal minors positive).
    """

    def __init__(
        self,
        matrix,
        precision_bits: int = DEFAULT_PRECISION,
        tolerance: float = 1e-9,
    ):
        self.precision_bits = precision_bits
        with mp.workprec(precision_bits):
            m = mpmath.matrix(matrix)
            if m.rows != m.cols:
                raise LatticeError(f"Gram matrix must be square, got {m.rows}x{m.cols}")
            self.dim = m.rows
            scale = max([abs(m[i, j]) for i in range(self.dim) for j in range(self.dim)] + [1])
            for i in range(self.dim):
                for j in range(i + 1, self.dim):
                    if abs(m[i, j] - m[j, i]) > tolerance * scale:
                        raise LatticeError(
                            f"Gram matrix not symmetric at ({i},{j}): "
                            f"{mpmath.nstr(m[i, j], 10)} vs {mpmath.nstr(m[j, i], 10)}"
                        )
                    avg = (m[i, j] + m[j, i]) / 2
                    m[i, j] = avg
                    m[j, i] = avg
            try:
                mpmath.cholesky(m)
            except ZeroDivisionError as e:
                raise LatticeError(f"Gram matrix is not positive definite: {e}") from e
            except ValueError as e:
                raise LatticeError(f"Gram matrix is not positive definite: {e}") from e
            self.matrix = m

    @classmethod
    def identity(cls, dim: int, precision_bits: int = DEFAULT_PRECISION) -> "GramForm":
        return cls(mpmath.eye(dim), precision_bits)

    def scaled(self, factor) -> "GramForm":
        with mp.workprec(self.precision_bits):
            return GramForm(self.matrix * mpmath.mpf(factor), self.precision_bits)

    def inner(self, u: Sequence[int], v: Sequence[int]):
        with mp.workprec(self.precision_bits):
            total = mpmath.mpf(0)
            for i, ui in enumerate(u):
                if not ui:
                    continue
                row = mpmath.fsum(self.matrix[i, j] * vj for j, vj in enumerate(v) if vj)
                total += ui * row
            return total

    def norm(self, v: Sequence[int]):
        with mp.workprec(self.precision_bits):
            return mpmath.sqrt(max(self.inner(v, v), 0))

    def restricted_gram(self, vectors: Sequence[Sequence[int]]):
        """Gram matrix <v_i, v_j> of the given integer vectors."""
        with mp.workprec(self.precision_bits):
            k = len(vectors)
            g = mpmath.matrix(k, k)
            for i in range(k):
                for j in range(i, k):
                    g[i, j] = self.inner(vectors[i], vectors[j])
                    g[j, i] = g[i, j]
            return g

    def to_list(self) -> List[List[str]]:
        return [
            [mpmath.nstr(self.matrix[i, j], 20) for j in range(self.dim)]
            for i in range(self.dim)
        ]


def unit_ball_volume(r: int):
    """mu(r) = pi^(r/2) / Gamma(r/2 + 1)."""
    return mpmath.pi ** (mpmath.mpf(r) / 2) / mpmath.gamma(mpmath.mpf(r) / 2 + 1)


def _check_dims(lat: IntegerLattice, form: GramForm):
    if form.dim != lat.ambient_dim:
        raise LatticeError(
            f"form dimension {form.dim} does not match lattice ambient dimension "
            f"{lat.ambient_dim}"
        )


def lattice_volume(lat: IntegerLattice, form: GramForm):
    """|det Gram(basis)|^(1/2); 1 for the zero lattice."""
    _check_dims(lat, form)
    with mp.workprec(form.precision_bits):
        if lat.rank == 0:
            return mpmath.mpf(1)
        g = form.restricted_gram(lat.rows())
        return mpmath.sqrt(abs(mpmath.det(g)))


def vectors_volume(vectors: Sequence[Sequence[int]], form: GramForm):
    with mp.workprec(form.precision_bits):
        if not vectors:
            return mpmath.mpf(1)
        return mpmath.sqrt(abs(mpmath.det(form.restricted_gram(vectors))))


@dataclass
class ReducedBasis:
    """LLL output: the reduced generators and the (canonical) lattice they span."""

    lattice: IntegerLattice
    vectors: List[List[int]]
    norms: list
    delta: float


def _gso(vectors, form):
    k = len(vectors)
    g = form.restricted_gram(vectors)
    mu = [[mpmath.mpf(0)] * k for _ in range(k)]
    bstar = [mpmath.mpf(0)] * k
    for i in range(k):
        for j in range(i):
            s = g[i, j] - mpmath.fsum(mu[j][l] * mu[i][l] * bstar[l] for l in range(j))
            mu[i][j] = s / bstar[j]
        bstar[i] = g[i, i] - mpmath.fsum(mu[i][l] ** 2 * bstar[l] for l in range(i))
        if bstar[i] <= 0:
            raise LatticeError(
                "degenerate Gram form on this basis (non-positive Gram-Schmidt norm)"
            )
    return mu, bstar


def lll_reduce_vectors(
    vectors: Sequence[Sequence[int]], form: GramForm, delta: float = 0.99
) -> List[List[int]]:
    """LLL on linearly independent integer vectors under `form`."""
    if not 0.25 < delta < 1:
        raise LatticeError(f"LLL delta must lie in (0.25, 1), got {delta}")
    b = [list(v) for v in vectors]
    n = len(b)
    if n <= 1:
        return b
    with mp.workprec(form.precision_bits):
        d = mpmath.mpf(delta)
        eps = mpmath.mpf(2) ** -(form.precision_bits // 2)
        mu, bstar = _gso(b, form)
        k = 1
        while k < n:
            for j in range(k - 1, -1, -1):
                q = int(mpmath.nint(mu[k][j]))
                if q:
                    b[k] = [x - q * y for x, y in zip(b[k], b[j])]
                    for l in range(j):
                        mu[k][l] -= q * mu[j][l]
                    mu[k][j] -= q
            gap = bstar[k] - (d - mu[k][k - 1] ** 2) * bstar[k - 1]
            # Lovasz ties within precision go to the lexicographically smaller vector
            if gap > eps * bstar[k - 1] or (abs(gap) <= eps * bstar[k - 1] and b[k - 1] <= b[k]):
                k += 1
            else:
                b[k], b[k - 1] = b[k - 1], b[k]
                mu, bstar = _gso(b, form)
                k = max(k - 1, 1)
    # sign convention: first nonzero entry positive
    for i, v in enumerate(b):
        lead = next((x for x in v if x), 0)
        if lead < 0:
            b[i] = [-x for x in v]
    return b


def lll_reduce(lat: IntegerLattice, form: GramForm, delta: float = 0.99) -> ReducedBasis:
    _check_dims(lat, form)
    reduced = lll_reduce_vectors(lat.rows(), form, delta)
    spanned = IntegerLattice.from_rows(reduced, lat.ambient_dim)
    if spanned != lat:
        raise LatticeError("LLL changed the lattice; this indicates a precision failure")
    norms = [form.norm(v) for v in reduced]
    logger.debug(f"LLL reduced rank-{lat.rank} lattice, norms={[mpmath.nstr(x, 8) for x in norms]}")
    return ReducedBasis(lattice=lat, vectors=reduced, norms=norms, delta=delta)


@dataclass
class MinimaReport:
    minima: list
    achieving_vectors: List[List[int]]
    volume: object
    rank: int
    exact: bool = True

    def product(self):
        p = mpmath.mpf(1)
        for m in self.minima:
            p *= m
        return p

    def minkowski_bound(self):
        """2^r * vol / mu(r), the upper envelope for the product of minima."""
        return 2 ** self.rank * self.volume / unit_ball_volume(self.rank)

    def minkowski_holds(self, slack: float = 1e-20) -> bool:
        return self.product() <= self.minkowski_bound() * (1 + slack)

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "exact": self.exact,
            "minima": [mpmath.nstr(x, 20) for x in self.minima],
            "achieving_vectors": self.achieving_vectors,
            "volume": mpmath.nstr(self.volume, 20),
            "product": mpmath.nstr(self.product(), 20),
            "minkowski_bound": mpmath.nstr(self.minkowski_bound(), 20),
        }


def short_coefficients(gram, radius_sq, precision_bits: int = DEFAULT_PRECISION):
    """
    Fincke-Pohst: all nonzero integer x (up to sign) with x^T gram x <= radius_sq.

    `gram` is a square list-of-lists (or mpmath matrix) of reals; the
    decomposition and the pruning bounds run at `precision_bits`.
    Enumeration is a pruning device, the caller recomputes norms exactly.
    """
    r = len(gram) if not isinstance(gram, mpmath.matrix) else gram.rows
    found = []
    with mp.workprec(precision_bits):
        if isinstance(gram, mpmath.matrix):
            q = [[mpmath.mpf(gram[i, j]) for j in range(r)] for i in range(r)]
        else:
            q = [[mpmath.mpf(gram[i][j]) for j in range(r)] for i in range(r)]
        # x^T G x = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2
        for i in range(r):
            for j in range(i + 1, r):
                q[j][i] = q[i][j]
                q[i][j] = q[i][j] / q[i][i]
            for k in range(i + 1, r):
                for l in range(k, r):
                    q[k][l] -= q[k][i] * q[i][l]
        x = [0] * r

        def recurse(i, remaining):
            centre = -mpmath.fsum(q[i][j] * x[j] for j in range(i + 1, r))
            width = mpmath.sqrt(max(remaining, 0) / q[i][i])
            lo, hi = int(mpmath.ceil(centre - width)), int(mpmath.floor(centre + width))
            for xi in range(lo, hi + 1):
                x[i] = xi
                used = q[i][i] * (xi - centre) ** 2
                if used > remaining:
                    continue
                if i == 0:
                    if any(x):
                        found.append(tuple(x))
                else:
                    recurse(i - 1, remaining - used)
            x[i] = 0

        recurse(r - 1, mpmath.mpf(radius_sq))
    canonical = set()
    for v in found:
        lead = next(c for c in reversed(v) if c)
        canonical.add(v if lead > 0 else tuple(-c for c in v))
    return sorted(canonical)


def _rank_over_q(vectors: Sequence[Sequence[int]]) -> int:
    if not vectors:
        return 0
    return Matrix(vectors).rank()


def successive_minima(
    lat: IntegerLattice,
    form: GramForm,
    max_rank: int = DEFAULT_ENUMERATION_RANK,
    delta: float = 0.99,
) -> MinimaReport:
    """
    Exact successive minima by bounded enumeration after LLL.

    The radius starts at the shortest reduced basis vector and grows to the
    next basis vector outside the span found so far, so the final radius is
    the smallest that certifies all r minima.
    """
    _check_dims(lat, form)
    r = lat.rank
    if r > max_rank:
        raise EnumerationBoundError(
            f"lattice rank {r} exceeds the enumeration bound {max_rank}; "
            f"use lll_reduce() for LLL-approximate minima or raise bounds.enumeration_rank"
        )
    volume = lattice_volume(lat, form)
    if r == 0:
        return MinimaReport([], [], volume, 0)

    reduced = lll_reduce(lat, form, delta)
    basis = reduced.vectors
    with mp.workprec(form.precision_bits):
        gram_mp = form.restricted_gram(basis)
        slack = mpmath.mpf(2) ** -(form.precision_bits // 2)
        basis_norms = sorted((form.norm(v), tuple(v)) for v in basis)

        chosen: List[Tuple] = []
        chosen_vectors: List[List[int]] = []
        radius = basis_norms[0][0]
        while len(chosen) < r:
            radius_sq = radius ** 2 * (1 + slack) + slack
            coeffs = short_coefficients(gram_mp, radius_sq, form.precision_bits)
            candidates = []
            for c in coeffs:
                v = [sum(c[i] * basis[i][j] for i in range(r)) for j in range(lat.ambient_dim)]
                lead = next(x for x in v if x)
                if lead < 0:
                    v = [-x for x in v]
                candidates.append((form.norm(v), tuple(v)))
            candidates.sort()
            chosen, chosen_vectors = [], []
            for nrm, v in candidates:
                if _rank_over_q(chosen_vectors + [list(v)]) > len(chosen_vectors):
                    chosen.append(nrm)
                    chosen_vectors.append(list(v))
                    if len(chosen) == r:
                        break
            if len(chosen) < r:
                outside = [
                    nrm
                    for nrm, v in basis_norms
                    if _rank_over_q(chosen_vectors + [list(v)]) > len(chosen_vectors)
                ]
                radius = min(outside)
        logger.debug(f"Successive minima rank={r}: {[mpmath.nstr(x, 8) for x in chosen]}")
        return MinimaReport(chosen, chosen_vectors, volume, r)


@dataclass
class KernelBasisReport:
    vectors: List[List[int]]
    norms: list
    product: object
    phi_norm: object
    image_rank: int
    bound_shape: object
    achieved_constant: object
    kernel: IntegerLattice = field(repr=False, default=None)

    def to_dict(self) -> dict:
        return {
            "vectors": self.vectors,
            "norms": [mpmath.nstr(x, 20) for x in self.norms],
            "product": mpmath.nstr(self.product, 20),
            "phi_norm": mpmath.nstr(self.phi_norm, 20),
            "image_rank": self.image_rank,
            "bound_shape": mpmath.nstr(self.bound_shape, 20),
            "achieved_constant": mpmath.nstr(self.achieved_constant, 20),
        }


def small_kernel_basis(
    phi: Sequence[Sequence[int]], form: GramForm, delta: float = 0.99
) -> KernelBasisReport:
    """
    Linearly independent kernel vectors of phi with small product of norms.

    The kernel is taken exactly (HNF), then LLL-reduced under `form`. The
    report carries the achieved constant against ||phi||^rank(phi), the shape
    of the Siegel-lemma bound.
    """
    ncols = form.dim
    for row in phi:
        if len(row) != ncols:
            raise LatticeError(f"phi row {list(row)} has length {len(row)}, expected {ncols}")
    kernel = kernel_lattice(phi, ncols)
    if kernel.rank == 0:
        raise LatticeError("phi has trivial kernel")
    reduced = lll_reduce(kernel, form, delta)
    for v in reduced.vectors:
        if any(sum(a * b for a, b in zip(row, v)) for row in phi):
            raise LatticeError(f"kernel vector {v} is not annihilated by phi")
    image_rank = ncols - kernel.rank
    with mp.workprec(form.precision_bits):
        product = mpmath.mpf(1)
        for nrm in reduced.norms:
            product *= nrm
        phi_norm = mpmath.sqrt(sum(mpmath.mpf(x) ** 2 for row in phi for x in row))
        shape = max(phi_norm, 1) ** image_rank
        achieved = product / shape
    logger.info(
        f"Kernel basis of rank {kernel.rank}: product of norms {mpmath.nstr(product, 10)}, "
        f"||phi||^{image_rank} = {mpmath.nstr(shape, 10)}"
    )
    return KernelBasisReport(
        vectors=reduced.vectors,
        norms=reduced.norms,
        product=product,
        phi_norm=phi_norm,
        image_rank=image_rank,
        bound_shape=shape,
        achieved_constant=achieved,
        kernel=kernel,
    )


def hadamard_ratio(vectors: Sequence[Sequence[int]], form: GramForm):
    """prod ||v_i|| / vol(v); >= 1 by Hadamard's inequality."""
    with mp.workprec(form.precision_bits):
        p = mpmath.mpf(1)
        for v in vectors:
            p *= form.norm(v)
        return p / vectors_volume(vectors, form)


def random_unimodular(rank: int, rng, steps: int = 12, spread: int = 3) -> List[List[int]]:
    """Product of random elementary matrices; used by property checks and demos."""
    u = [[1 if i == j else 0 for j in range(rank)] for i in range(rank)]
    if rank < 2:
        return u
    for _ in range(steps):
        i, j = rng.sample(range(rank), 2)
        q = rng.randint(-spread, spread)
        u[i] = [a + q * b for a, b in zip(u[i], u[j])]
    if rng.random() < 0.5:
        u[0] = [-a for a in u[0]]
    return u
