"""
Small homomorphisms of complex tori that kill a given point.

A homomorphism X -> Y is held by its rational representation: the integer
2g' x 2g matrix M with phi(omega_j) = sum_i M[i][j] omega'_i. A point
P = exp(p_log) is killed by phi exactly when M beta is integral, beta being
the real period coordinates of p_log.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

import mpmath
import sympy
from mpmath import mp

from src.linalg.gram import GramForm, lll_reduce_vectors
from src.linalg.lattice import identity_matrix

from .torus import PolarizedTorus

logger = logging.getLogger(__name__)


class SearchBoundError(ValueError):
    """No candidate found inside the configured search box."""


class HomomorphismError(ValueError):
    """Matrix is not the rational representation of a homomorphism of the tori."""


@dataclass
class AnnihilatorResult:
    coefficients: List[int]
    matrix: List[List[int]]
    norm: mpmath.mpf
    residual: object
    image_rank: int
    surjective: bool
    candidates_checked: int
    box: int

    def to_dict(self) -> dict:
        return {
            "coefficients": self.coefficients,
            "matrix": self.matrix,
            "norm": mpmath.nstr(self.norm, 20),
            "residual": str(self.residual) if isinstance(self.residual, Fraction) else mpmath.nstr(self.residual, 5),
            "image_rank": self.image_rank,
            "surjective": self.surjective,
            "candidates_checked": self.candidates_checked,
            "box": self.box,
        }


def holomorphy_residual(matrix: Sequence[Sequence[int]], source: PolarizedTorus, target: PolarizedTorus):
    """max |M J_source - J_target M|: zero iff M commutes with multiplication by i."""
    bits = max(source.precision_bits, target.precision_bits)
    with mp.workprec(bits):
        m = mpmath.matrix([[mpmath.mpf(x) for x in row] for row in matrix])
        diff = m * source.complex_structure() - target.complex_structure() * m
        return max(abs(diff[i, j]) for i in range(diff.rows) for j in range(diff.cols))


def _combine(coeffs: Sequence[int], generators) -> List[List[int]]:
    rows, cols = len(generators[0]), len(generators[0][0])
    return [
        [sum(c * g[i][j] for c, g in zip(coeffs, generators) if c) for j in range(cols)]
        for i in range(rows)
    ]


def _distance_to_integers(values):
    """Sup-norm distance to Z^n; exact for Fractions."""
    if all(isinstance(v, Fraction) for v in values):
        return max(abs(v - round(v)) for v in values)
    return max(abs(v - mpmath.nint(v)) for v in values)


def small_annihilating_hom(
    generators: Sequence[Sequence[Sequence[int]]],
    p_log: Optional[Sequence],
    source: PolarizedTorus,
    target: PolarizedTorus,
    box: int = 2,
    delta: float = 0.99,
    tolerance: float = 1e-9,
    period_coords: Optional[Sequence] = None,
    max_candidates: int = 200000,
) -> AnnihilatorResult:
    """
    Integer combination phi of the generators with phi(P) = 0 and small
    Frobenius norm.

    The search runs LLL on {(n, m)} under n^T G n + C^2 |V n - m|^2, with G
    the Frobenius Gram matrix of the generators and V the images of beta, then
    scans small combinations of the reduced vectors. Ties in norm go to the
    lexicographically smallest coefficient vector with positive leading entry.
    If period_coords are exact rationals the residual is exact.
    """
    if not generators:
        raise HomomorphismError("the homomorphism lattice needs at least one generator")
    rows, cols = 2 * target.g, 2 * source.g
    for k, gen in enumerate(generators):
        if len(gen) != rows or any(len(r) != cols for r in gen):
            raise HomomorphismError(f"generator {k} must be a {rows}x{cols} integer matrix")
        res = holomorphy_residual(gen, source, target)
        if res > source.tolerance:
            raise HomomorphismError(
                f"generator {k} does not commute with the complex structures (residual {mpmath.nstr(res, 5)})"
            )
    flat = [[x for r in gen for x in r] for gen in generators]
    if sympy.Matrix(flat).rank() != len(generators):
        raise HomomorphismError("generators are linearly dependent")

    bits = max(source.precision_bits, target.precision_bits)
    exact = period_coords is not None
    if exact:
        beta = [Fraction(str(b)) if not isinstance(b, Fraction) else b for b in period_coords]
    else:
        beta = source.real_coordinates([mpmath.mpc(c) for c in p_log])
    with mp.workprec(bits):
        images = [[sum(gen[i][j] * beta[j] for j in range(cols)) for i in range(rows)] for gen in generators]

    count = len(generators)
    size = count + rows
    with mp.workprec(bits):
        weight = mpmath.mpf(2) ** (bits // 2)
        v = [[mpmath.mpf(x.numerator) / x.denominator if exact else x for x in img] for img in images]
        gram = mpmath.matrix(size, size)
        for k in range(count):
            for l in range(count):
                frob = sum(a * b for a, b in zip(flat[k], flat[l]))
                gram[k, l] = frob + weight * mpmath.fsum(v[k][i] * v[l][i] for i in range(rows))
            for i in range(rows):
                gram[k, count + i] = -weight * v[k][i]
                gram[count + i, k] = -weight * v[k][i]
        for i in range(rows):
            gram[count + i, count + i] = weight
        form = GramForm(gram, bits, tolerance=1e-20)
        reduced = lll_reduce_vectors(identity_matrix(size), form, delta)

    width = 2 * box + 1
    depth = min(size, max(1, int(math.log(max_candidates) / math.log(width))))
    if depth < size:
        logger.warning(f"Annihilator search limited to the {depth} shortest of {size} reduced vectors")
    ordered = sorted(reduced, key=lambda r: form.norm(r))[:depth]

    with mp.workprec(bits):
        best = None
        seen = set()
        for combo in itertools.product(range(-box, box + 1), repeat=depth):
            if not any(combo):
                continue
            w = [sum(c * b[j] for c, b in zip(combo, ordered)) for j in range(size)]
            n = w[:count]
            lead = next((x for x in n if x), 0)
            if lead == 0:
                continue
            if lead < 0:
                n = [-x for x in n]
            key = tuple(n)
            if key in seen:
                continue
            seen.add(key)
            image = [sum(c * img[i] for c, img in zip(n, images)) for i in range(rows)]
            residual = _distance_to_integers(image)
            if exact:
                if residual != 0:
                    continue
            elif residual > tolerance:
                continue
            matrix = _combine(n, generators)
            norm_sq = sum(x * x for r in matrix for x in r)
            candidate = (norm_sq, key, matrix, residual)
            if best is None or candidate[:2] < best[:2]:
                best = candidate
    logger.info(f"Annihilator search: {len(seen)} distinct combinations in a box of radius {box}")
    if best is None:
        raise SearchBoundError(
            f"no annihilating homomorphism among combinations with coefficients in "
            f"[-{box}, {box}] of {depth} reduced vectors; raise bounds.annihilator_box"
        )
    norm_sq, key, matrix, residual = best
    image_rank = sympy.Matrix(matrix).rank()
    with mp.workprec(bits):
        norm = mpmath.sqrt(norm_sq)
    return AnnihilatorResult(
        coefficients=list(key),
        matrix=matrix,
        norm=norm,
        residual=residual,
        image_rank=image_rank,
        surjective=image_rank == rows,
        candidates_checked=len(seen),
        box=box,
    )
