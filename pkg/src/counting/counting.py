"""
Counting points of bounded height on explicit sets, and growth fits.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import mpmath
import numpy as np
import sympy

from .enumeration import enumerate_bounded
from .samples import DefinableSample, expression_k_height, numeric, to_sympy

logger = logging.getLogger(__name__)


@dataclass
class CountResult:
    k: int
    t: int
    count: int
    mode: str
    witnesses: Optional[List[Tuple[str, ...]]] = None
    min_margin: Optional[float] = None
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {
            "k": self.k,
            "T": self.t,
            "count": self.count,
            "mode": self.mode,
            "min_margin": self.min_margin,
            "warnings": self.warnings,
        }
        if self.witnesses is not None:
            out["witnesses"] = [list(w) for w in self.witnesses]
        return out

    def csv_row(self) -> List:
        return [self.t, self.count, self.mode, "" if self.min_margin is None else f"{self.min_margin:.6g}"]


CSV_HEADER = ["T", "count", "mode", "min_margin"]


def _margin(points: Sequence[Tuple]) -> Optional[float]:
    """Smallest gap between consecutive counted points in lexicographic order."""
    if len(points) < 2:
        return None
    arr = np.array(sorted(tuple(numeric(c) for c in p) for p in points), dtype=float)
    gaps = np.linalg.norm(np.diff(arr, axis=0), axis=1)
    return float(gaps.min())


def _image_key(zs, digits: int = 30) -> Tuple[str, ...]:
    """Exact coordinates rendered to `digits` significant digits at mpmath precision."""
    with mpmath.workdps(digits + 10):
        return tuple(mpmath.nstr(mpmath.mpf(str(sympy.N(c, digits + 10))), digits) for c in zs)


def _audit(result: CountResult, points, tolerance: float) -> CountResult:
    result.min_margin = _margin(points)
    if result.min_margin is not None and result.min_margin < tolerance:
        result.warnings.append(
            f"two counted points lie within {result.min_margin:.3g} < membership tolerance {tolerance:g}"
        )
    return result


def _candidates(z: DefinableSample, k: int, t: int, max_degree: int, max_height: int):
    return enumerate_bounded(k, t, z.y_box(), max_degree=max_degree, max_height=max_height)


def count_points(
    z: DefinableSample,
    k: int,
    t: int,
    keep_witnesses: bool = False,
    tolerance: float = 1e-9,
    max_degree: int = 3,
    max_height: int = 10000,
) -> CountResult:
    """#{p in Z : H_k(p_i) <= T for every coordinate}."""
    found = {}
    for y in _candidates(z, k, t, max_degree, max_height):
        fiber = z.fiber(y)
        if not fiber.isolated:
            continue
        y_expr = None
        for zs in fiber.z_values:
            if all(expression_k_height(c, k) <= t for c in zs):
                if y_expr is None:
                    y_expr = to_sympy(y)
                point = (y_expr,) + tuple(zs)
                found.setdefault(tuple(str(c) for c in point), point)
    witnesses = sorted(found) if keep_witnesses else None
    result = CountResult(k, t, len(found), "full", witnesses)
    logger.info(f"count_points k={k} T={t}: {len(found)}")
    return _audit(result, list(found.values()), tolerance)


def semi_rational_count(
    z: DefinableSample,
    k: int,
    t: int,
    keep_witnesses: bool = False,
    tolerance: float = 1e-9,
    max_degree: int = 3,
    max_height: int = 10000,
) -> CountResult:
    """
    Number of distinct second coordinates z over height-restricted y with z
    isolated in its fibre. Positive-dimensional fibres are reported as
    warnings and left out of the count.
    """
    images = {}
    warnings = []
    for y in _candidates(z, k, t, max_degree, max_height):
        fiber = z.fiber(y)
        if not fiber.isolated:
            warnings.append(f"non-isolated fiber over y = {y}")
            continue
        for zs in fiber.z_values:
            key = tuple(str(c) for c in zs)
            images.setdefault(_image_key(zs), (key, zs))
    witnesses = sorted(v[0] for v in images.values()) if keep_witnesses else None
    result = CountResult(k, t, len(images), "pi2-image", witnesses, warnings=warnings)
    logger.info(f"semi_rational_count k={k} T={t}: {len(images)} images, {len(warnings)} non-isolated fibers")
    return _audit(result, [v[1] for v in images.values()], tolerance)


def count_series(
    z: DefinableSample,
    k: int,
    ts: Sequence[int],
    mode: str = "full",
    tolerance: float = 1e-9,
    max_degree: int = 3,
    max_height: int = 10000,
) -> List[CountResult]:
    if mode not in ("full", "pi2-image"):
        raise ValueError(f"unknown counting mode {mode!r}")
    fn = count_points if mode == "full" else semi_rational_count
    return [
        fn(z, k, t, tolerance=tolerance, max_degree=max_degree, max_height=max_height) for t in ts
    ]


@dataclass
class GrowthFit:
    epsilon: float
    log_c: float
    residuals: List[float]

    def to_dict(self) -> dict:
        return {"epsilon_hat": self.epsilon, "log_c_hat": self.log_c, "residuals": self.residuals}


def growth_fit(counts: Sequence[Tuple[float, float]]) -> GrowthFit:
    """Least-squares line through (log T, log count)."""
    usable = {}
    for t, c in counts:
        if t > 0 and c > 0:
            usable[float(t)] = float(c)
    if len(usable) < 3:
        raise ValueError(f"growth_fit needs at least 3 distinct T with positive counts, got {len(usable)}")
    ts = np.array(sorted(usable))
    cs = np.array([usable[t] for t in ts])
    x, y = np.log(ts), np.log(cs)
    slope, intercept = np.polyfit(x, y, 1)
    residuals = y - (slope * x + intercept)
    return GrowthFit(float(slope), float(intercept), [float(r) for r in residuals])
