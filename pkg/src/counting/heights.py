"""
k-heights of real algebraic numbers.

H_k(y) is the smallest max|a_i| over coprime integers a_0..a_k, not all
zero, with a_0 y^k + ... + a_k = 0. The vanishing polynomials of degree
<= k are the multiples c(y) * P(y) of the minimal polynomial P with
deg c <= k - deg P, so the minimum is a shortest-vector question (in the
sup norm) on the lattice spanned by y^i P(y).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from src.linalg.algebraic import AlgebraicNumber
from src.linalg.gram import short_coefficients

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KHeightValue:
    k: int
    value: Optional[int]
    witness: Optional[Tuple[int, ...]] = None

    @property
    def is_finite(self) -> bool:
        return self.value is not None

    def __le__(self, bound) -> bool:
        return self.value is not None and self.value <= bound

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "value": self.value if self.value is not None else "inf",
            "witness": list(self.witness) if self.witness else None,
        }


def _shifted_rows(minpoly: Tuple[int, ...], k: int):
    """Coefficient vectors (highest degree first, length k + 1) of y^i * P, i = 0..k - deg P."""
    d = len(minpoly) - 1
    rows = []
    for i in range(k - d + 1):
        lead_pad = k - d - i
        rows.append([0] * lead_pad + list(minpoly) + [0] * i)
    return rows


def k_height(a, k: int) -> KHeightValue:
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if not isinstance(a, AlgebraicNumber):
        a = AlgebraicNumber.from_rational(Fraction(a))
    d = a.degree
    if d > k:
        return KHeightValue(k, None)
    if d == 1:
        # a multiple c(y) (q y - p) has leading |q c_lead| and, after removing
        # factors of y, constant |p c_0|; so max(|p|, |q|) is optimal
        q, p = a.minpoly[0], -a.minpoly[1]
        return KHeightValue(k, max(abs(p), abs(q)), (q, -p))

    rows = _shifted_rows(a.minpoly, k)
    best_value = max(abs(c) for c in a.minpoly)
    best = tuple(a.minpoly)
    if len(rows) > 1:
        gram = [[sum(x * y for x, y in zip(r, s)) for s in rows] for r in rows]
        radius_sq = (k + 1) * best_value ** 2 * (1 + 1e-9) + 1e-9
        for coeffs in short_coefficients(gram, radius_sq):
            v = [sum(c * r[j] for c, r in zip(coeffs, rows)) for j in range(k + 1)]
            h = max(abs(x) for x in v)
            lead = next(x for x in v if x)
            v = tuple(v) if lead > 0 else tuple(-x for x in v)
            if (h, v) < (best_value, best):
                best_value, best = h, v
    logger.debug(f"H_{k} of degree-{d} number {a}: {best_value}")
    return KHeightValue(k, best_value, best)
