"""
Complexity of torsion cosets and the what-if bounds built on it.
"""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import mpmath

from .torus import Subtorus, degree

logger = logging.getLogger(__name__)


@dataclass
class TorsionCosetComplexity:
    """
    arith: smallest order of a torsion point in the coset (caller supplied).
    geom: deg_L Y.
    total: max(arith, ceil(geom)), where geom within `tolerance` of an
    integer rounds to that integer first.
    """

    arith: int
    geom: mpmath.mpf
    total: int

    def to_dict(self) -> dict:
        return {"arith": self.arith, "geom": mpmath.nstr(self.geom, 20), "total": self.total}


def torsion_coset_complexity(order: int, t: Subtorus, tolerance: float = 1e-9) -> TorsionCosetComplexity:
    if order < 1:
        raise ValueError(f"torsion order must be positive, got {order}")
    geom = degree(t)
    nearest = int(mpmath.nint(geom))
    geom_int = nearest if abs(geom - nearest) <= tolerance * max(1, abs(geom)) else int(mpmath.ceil(geom))
    total = max(order, geom_int, 1)
    return TorsionCosetComplexity(order, geom, total)


def lambda_value(quotients: Sequence[Tuple[int, int]], d: int, dim_x: int) -> int:
    """max of dim(X/H) * rank Hom(X, X/H) over the listed quotients by d-dimensional H."""
    if not 0 <= d <= dim_x:
        raise ValueError(f"subvariety dimension {d} outside 0..{dim_x}")
    if not quotients:
        if d == dim_x:
            return 0
        raise ValueError(f"no quotient data given for d={d} < dim X={dim_x}")
    for q_dim, rank in quotients:
        if q_dim < 0 or rank < 0:
            raise ValueError(f"quotient data ({q_dim}, {rank}) must be non-negative")
    return max(q_dim * rank for q_dim, rank in quotients)


def complexity_bound(c, degree_kp: int, g: int, height, lam: int) -> Tuple[mpmath.mpf, mpmath.mpf]:
    """(c D^(6g+1), c D^(60 g^4) max(1, h)^lambda) for auditing explicit constants."""
    if not c > 0:
        raise ValueError(f"c must be positive, got {c}")
    if degree_kp < 1 or g < 1 or lam < 0:
        raise ValueError(f"need D >= 1, g >= 1, lambda >= 0; got D={degree_kp}, g={g}, lambda={lam}")
    c = mpmath.mpf(c)
    d = mpmath.mpf(degree_kp)
    arith = c * d ** (6 * g + 1)
    total = c * d ** (60 * g ** 4) * max(mpmath.mpf(1), mpmath.mpf(height)) ** lam
    logger.debug(f"complexity_bound D={degree_kp} g={g}: arith={mpmath.nstr(arith, 8)}, total={mpmath.nstr(total, 8)}")
    return arith, total
