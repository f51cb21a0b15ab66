"""
Polarized complex tori C^g / Omega given by explicit period vectors and a
hermitian form H, and their subtori.

Period vectors are indexed 0..2g-1; a subtorus is the saturated sublattice
of Z^2g whose real span is a complex subspace. Norms and volumes use the
real Gram form <u, v> = Re H(u, v) pulled back to period coordinates.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Sequence

import mpmath
from mpmath import mp

from src.linalg.gram import (
    GramForm,
    MinimaReport,
    lattice_volume,
    successive_minima,
)
from src.linalg.lattice import (
    IntegerLattice,
    LatticeError,
    saturation,
    saturation_index,
    unimodular_completion,
)

logger = logging.getLogger(__name__)


class PolarizationError(ValueError):
    """Hermitian form is not a polarization of the given period lattice."""


class TangentSpaceError(ValueError):
    """Real span of a period sublattice is not a complex subspace, or a vector is off it."""


def parse_complex(value) -> mpmath.mpc:
    if isinstance(value, (list, tuple)):
        re_part, im_part = value
        return mpmath.mpc(mpmath.mpf(str(re_part)), mpmath.mpf(str(im_part)))
    if isinstance(value, str):
        return mpmath.mpc(mpmath.mpmathify(value.replace(" ", "").replace("i", "j")))
    return mpmath.mpc(value)


class PolarizedTorus:
    """
    X = C^g / Omega with hermitian H(v, w) = v^T H conj(w).

    Validated at construction: H conjugate-symmetric and positive definite,
    E = Im H integral on all pairs of periods, periods R-independent.
    """

    def __init__(
        self,
        g: int,
        periods: Sequence[Sequence],
        hermitian: Sequence[Sequence],
        precision_bits: int = 128,
        tolerance: float = 1e-9,
    ):
        if g < 1:
            raise PolarizationError(f"dimension must be positive, got {g}")
        self.g = g
        self.precision_bits = precision_bits
        self.tolerance = tolerance
        with mp.workprec(precision_bits):
            self.periods = [[parse_complex(c) for c in omega] for omega in periods]
            self.hermitian = mpmath.matrix([[parse_complex(c) for c in row] for row in hermitian])
        if len(self.periods) != 2 * g or any(len(w) != g for w in self.periods):
            raise PolarizationError(f"expected {2 * g} period vectors in C^{g}")
        if self.hermitian.rows != g or self.hermitian.cols != g:
            raise PolarizationError(f"hermitian form must be {g}x{g}")
        self._validate()

    def _validate(self):
        g = self.g
        with mp.workprec(self.precision_bits):
            for i in range(g):
                for j in range(g):
                    if abs(self.hermitian[i, j] - mpmath.conj(self.hermitian[j, i])) > self.tolerance:
                        raise PolarizationError(f"H is not conjugate-symmetric at ({i},{j})")
            n = 2 * g
            values = [[self.h(self.periods[i], self.periods[j]) for j in range(n)] for i in range(n)]
            worst = mpmath.mpf(0)
            for i in range(n):
                for j in range(n):
                    e = mpmath.im(values[i][j])
                    worst = max(worst, abs(e - mpmath.nint(e)))
            if worst > self.tolerance:
                raise PolarizationError(
                    f"E = Im H is not integral on the periods (max deviation {mpmath.nstr(worst, 5)})"
                )
            self.integrality_deviation = worst
            try:
                self.gram = GramForm(
                    [[mpmath.re(values[i][j]) for j in range(n)] for i in range(n)],
                    self.precision_bits,
                    self.tolerance,
                )
            except LatticeError as e:
                raise PolarizationError(
                    f"Re H is not positive definite on the periods (H indefinite or periods dependent): {e}"
                ) from e
            self.real_periods = mpmath.matrix(n, n)
            for k, omega in enumerate(self.periods):
                for i, c in enumerate(omega):
                    self.real_periods[i, k] = mpmath.re(c)
                    self.real_periods[g + i, k] = mpmath.im(c)

    def h(self, v, w):
        with mp.workprec(self.precision_bits):
            total = mpmath.mpc(0)
            for i in range(self.g):
                for j in range(self.g):
                    total += v[i] * self.hermitian[i, j] * mpmath.conj(w[j])
            return total

    def norm(self, v) -> mpmath.mpf:
        with mp.workprec(self.precision_bits):
            return mpmath.sqrt(max(mpmath.re(self.h(v, v)), 0))

    def period(self, coords: Sequence) -> List[mpmath.mpc]:
        """sum coords[k] * omega_k (coords integer or real)."""
        with mp.workprec(self.precision_bits):
            out = [mpmath.mpc(0)] * self.g
            for c, w in zip(coords, self.periods):
                if c:
                    out = [o + mpmath.mpf(c) * wi for o, wi in zip(out, w)]
            return out

    def real_coordinates(self, z: Sequence) -> List[mpmath.mpf]:
        """Real beta with z = sum beta_k omega_k."""
        with mp.workprec(self.precision_bits):
            rhs = mpmath.matrix([mpmath.re(c) for c in z] + [mpmath.im(c) for c in z])
            beta = mpmath.lu_solve(self.real_periods, rhs)
            return [beta[k] for k in range(2 * self.g)]

    def complex_structure(self) -> mpmath.matrix:
        """Multiplication by i written in period coordinates."""
        n = 2 * self.g
        with mp.workprec(self.precision_bits):
            j = mpmath.matrix(n, n)
            for i in range(self.g):
                j[self.g + i, i] = 1
                j[i, self.g + i] = -1
            return mpmath.inverse(self.real_periods) * j * self.real_periods

    def with_hermitian(self, hermitian) -> "PolarizedTorus":
        return PolarizedTorus(self.g, self.periods, hermitian, self.precision_bits, self.tolerance)

    def scaled(self, factor) -> "PolarizedTorus":
        with mp.workprec(self.precision_bits):
            h = [[self.hermitian[i, j] * factor for j in range(self.g)] for i in range(self.g)]
        return self.with_hermitian(h)

    def full(self) -> "Subtorus":
        return Subtorus(self, IntegerLattice.standard(2 * self.g))

    def to_dict(self, digits: int = 20) -> dict:
        def pair(c):
            return [mpmath.nstr(mpmath.re(c), digits), mpmath.nstr(mpmath.im(c), digits)]

        return {
            "g": self.g,
            "periods": [[pair(c) for c in w] for w in self.periods],
            "hermitian": [[pair(self.hermitian[i, j]) for j in range(self.g)] for i in range(self.g)],
        }

    @classmethod
    def from_dict(cls, data: dict, precision_bits: int = 128, tolerance: float = 1e-9):
        return cls(int(data["g"]), data["periods"], data["hermitian"], precision_bits, tolerance)


def elliptic_torus(tau, precision_bits: int = 128, tolerance: float = 1e-9) -> PolarizedTorus:
    """C / (Z + tau Z) with the principal polarization H = 1 / Im tau."""
    with mp.workprec(precision_bits):
        tau = parse_complex(tau)
        if not mpmath.im(tau) > 0:
            raise PolarizationError(f"tau = {tau} must lie in the upper half plane")
        return PolarizedTorus(1, [[1], [tau]], [[1 / mpmath.im(tau)]], precision_bits, tolerance)


def product_torus(a: PolarizedTorus, b: PolarizedTorus) -> PolarizedTorus:
    """A x B with the block-diagonal polarization; periods of A first."""
    g = a.g + b.g
    zero_a = [mpmath.mpc(0)] * a.g
    zero_b = [mpmath.mpc(0)] * b.g
    periods = [list(w) + zero_b for w in a.periods] + [zero_a + list(w) for w in b.periods]
    h = [[mpmath.mpc(0)] * g for _ in range(g)]
    for i in range(a.g):
        for j in range(a.g):
            h[i][j] = a.hermitian[i, j]
    for i in range(b.g):
        for j in range(b.g):
            h[a.g + i][a.g + j] = b.hermitian[i, j]
    return PolarizedTorus(
        g, periods, h, max(a.precision_bits, b.precision_bits), max(a.tolerance, b.tolerance)
    )


class Subtorus:
    """Abelian subvariety Y given by its period lattice Omega_Y inside Z^2g."""

    def __init__(self, parent: PolarizedTorus, period_sublattice: IntegerLattice):
        if period_sublattice.ambient_dim != 2 * parent.g:
            raise TangentSpaceError(
                f"sublattice lives in Z^{period_sublattice.ambient_dim}, expected Z^{2 * parent.g}"
            )
        index = saturation_index(period_sublattice)
        if index != 1:
            logger.warning(f"Period sublattice has index {index} in its saturation; saturating")
            period_sublattice = saturation(period_sublattice)
        if period_sublattice.rank % 2:
            raise TangentSpaceError(f"period sublattice has odd rank {period_sublattice.rank}")
        self.parent = parent
        self.lattice = period_sublattice
        self.tangent_residual = self._tangent_check()

    @property
    def dim(self) -> int:
        return self.lattice.rank // 2

    def _basis_matrix(self, rows) -> mpmath.matrix:
        n = 2 * self.parent.g
        m = mpmath.matrix(n, len(rows))
        for k, row in enumerate(rows):
            for i in range(n):
                m[i, k] = row[i]
        return m

    def tangent_residual_of(self, beta: Sequence) -> mpmath.mpf:
        """Distance of a real period-coordinate vector from the real span of Omega_Y."""
        with mp.workprec(self.parent.precision_bits):
            target = mpmath.matrix([mpmath.mpf(b) for b in beta])
            if self.lattice.rank == 0:
                return mpmath.norm(target)
            _, residual = mpmath.qr_solve(self._basis_matrix(self.lattice.rows()), target)
            return residual

    def _tangent_check(self) -> mpmath.mpf:
        if self.lattice.rank == 0:
            return mpmath.mpf(0)
        parent = self.parent
        with mp.workprec(parent.precision_bits):
            j = parent.complex_structure()
            worst = mpmath.mpf(0)
            for row in self.lattice.rows():
                image = j * mpmath.matrix(row)
                worst = max(worst, self.tangent_residual_of([image[k] for k in range(2 * parent.g)]))
        if worst > parent.tolerance:
            raise TangentSpaceError(
                f"real span of {self.lattice.rows()} is not a complex subspace "
                f"(residual {mpmath.nstr(worst, 5)}); not an abelian subvariety"
            )
        return worst

    def to_dict(self) -> dict:
        return {"dim": self.dim, "lattice": self.lattice.to_dict()}


def degree(t: Subtorus) -> mpmath.mpf:
    """deg_L Y = (dim Y)! * vol(Omega_Y) under Re H."""
    with mp.workprec(t.parent.precision_bits):
        return math.factorial(t.dim) * lattice_volume(t.lattice, t.parent.gram)


@dataclass
class ComparabilityReport:
    degrees_l: list
    degrees_m: list
    ratio_low: mpmath.mpf
    ratio_high: mpmath.mpf

    @property
    def constant(self) -> mpmath.mpf:
        return max(self.ratio_high, 1 / self.ratio_low)

    def to_dict(self) -> dict:
        return {
            "degrees_l": [mpmath.nstr(d, 20) for d in self.degrees_l],
            "degrees_m": [mpmath.nstr(d, 20) for d in self.degrees_m],
            "ratio_low": mpmath.nstr(self.ratio_low, 20),
            "ratio_high": mpmath.nstr(self.ratio_high, 20),
            "constant": mpmath.nstr(self.constant, 20),
        }


def degree_comparability_batch(subtori: Sequence[Subtorus], h2) -> ComparabilityReport:
    """deg_M / deg_L over the subtori; `constant` is the smallest c with c^-1 <= ratio <= c."""
    if not subtori:
        raise ValueError("no subtori given")
    parent = subtori[0].parent
    other = parent.with_hermitian(h2)
    degrees_l, degrees_m, ratios = [], [], []
    for t in subtori:
        if t.parent is not parent:
            raise ValueError("all subtori must share one parent torus")
        d_l = degree(t)
        d_m = degree(Subtorus(other, t.lattice))
        degrees_l.append(d_l)
        degrees_m.append(d_m)
        ratios.append(d_m / d_l)
    return ComparabilityReport(degrees_l, degrees_m, min(ratios), max(ratios))


def degree_comparability(t: Subtorus, h2) -> ComparabilityReport:
    return degree_comparability_batch([t], h2)


class PeriodBasisReport(MinimaReport):
    """Successive-minima periods of a subtorus with its degree."""

    def __init__(self, base: MinimaReport, degree_value, periods):
        super().__init__(base.minima, base.achieving_vectors, base.volume, base.rank, base.exact)
        self.degree = degree_value
        self.periods = periods

    @property
    def achieved_constant(self):
        return self.product() / self.degree if self.rank else mpmath.mpf(1)

    def to_dict(self) -> dict:
        out = super().to_dict()
        out["degree"] = mpmath.nstr(self.degree, 20)
        out["achieved_constant"] = mpmath.nstr(self.achieved_constant, 20)
        out["periods"] = [
            [[mpmath.nstr(mpmath.re(c), 20), mpmath.nstr(mpmath.im(c), 20)] for c in w]
            for w in self.periods
        ]
        return out


def small_period_basis(t: Subtorus, max_rank: int = 10, delta: float = 0.99) -> PeriodBasisReport:
    with mp.workprec(t.parent.precision_bits):
        report = successive_minima(t.lattice, t.parent.gram, max_rank, delta)
        periods = [t.parent.period(v) for v in report.achieving_vectors]
        return PeriodBasisReport(report, degree(t), periods)


@dataclass
class NearbyPeriod:
    omega_coords: List[int]
    omega: list
    remainder: list
    z_norm: mpmath.mpf
    omega_norm: mpmath.mpf
    tangent_residual: mpmath.mpf
    degree: mpmath.mpf
    basis_norms: list = field(default_factory=list)

    @property
    def achieved_constant(self) -> mpmath.mpf:
        return max(mpmath.mpf(0), self.omega_norm - self.z_norm) / self.degree

    def to_dict(self, digits: int = 20) -> dict:
        def vec(v):
            return [[mpmath.nstr(mpmath.re(c), digits), mpmath.nstr(mpmath.im(c), digits)] for c in v]

        return {
            "omega_coords": self.omega_coords,
            "omega": vec(self.omega),
            "remainder": vec(self.remainder),
            "z_norm": mpmath.nstr(self.z_norm, digits),
            "omega_norm": mpmath.nstr(self.omega_norm, digits),
            "tangent_residual": mpmath.nstr(self.tangent_residual, 5),
            "degree": mpmath.nstr(self.degree, digits),
            "achieved_constant": mpmath.nstr(self.achieved_constant, digits),
        }


def _quotient_coordinates(beta: Sequence, t: Subtorus):
    """(gamma, U) with beta = gamma * U; gamma[r:] are coordinates in the quotient."""
    u, u_inv = unimodular_completion(t.lattice)
    n = len(beta)
    gamma = [sum(beta[i] * u_inv[i][k] for i in range(n)) for k in range(n)]
    return gamma, u


def nearby_period(z: Sequence, t: Subtorus, max_rank: int = 10, delta: float = 0.99) -> NearbyPeriod:
    """
    A period omega with z - omega in T_Y and ||omega|| <= ||z|| + (1/2) sum ||omega'_i||,
    where omega'_i are successive-minima periods of Y.
    """
    parent = t.parent
    n = 2 * parent.g
    r = t.lattice.rank
    with mp.workprec(parent.precision_bits):
        z = [parse_complex(c) for c in z]
        beta = parent.real_coordinates(z)
        gamma, u = _quotient_coordinates(beta, t)
        shift = [0] * n
        for k in range(r, n):
            rounded = int(mpmath.nint(gamma[k]))
            if abs(gamma[k] - rounded) > parent.tolerance * max(1, abs(gamma[k])):
                raise TangentSpaceError(
                    f"z is not in Omega_X + T_Y (quotient coordinate {k} = {mpmath.nstr(gamma[k], 12)})"
                )
            if rounded:
                shift = [s + rounded * x for s, x in zip(shift, u[k])]
        delta_beta = [b - s for b, s in zip(beta, shift)]

        basis_norms = []
        omega_coords = list(shift)
        if r:
            minima = successive_minima(t.lattice, parent.gram, max_rank, delta)
            basis = minima.achieving_vectors
            basis_norms = minima.minima
            alpha, _ = mpmath.qr_solve(t._basis_matrix(basis), mpmath.matrix(delta_beta))
            for k in range(r):
                a_k = int(mpmath.nint(alpha[k]))
                if a_k:
                    omega_coords = [o + a_k * x for o, x in zip(omega_coords, basis[k])]

        omega = parent.period(omega_coords)
        remainder = [zi - wi for zi, wi in zip(z, omega)]
        residual = t.tangent_residual_of([b - o for b, o in zip(beta, omega_coords)])
        if residual > parent.tolerance * max(1, mpmath.norm(mpmath.matrix(beta))):
            raise TangentSpaceError(f"remainder left the tangent space (residual {mpmath.nstr(residual, 5)})")
        result = NearbyPeriod(
            omega_coords=omega_coords,
            omega=omega,
            remainder=remainder,
            z_norm=parent.norm(z),
            omega_norm=parent.norm(omega),
            tangent_residual=residual,
            degree=degree(t),
            basis_norms=basis_norms,
        )
    logger.debug(
        f"nearby_period: ||z||={mpmath.nstr(result.z_norm, 8)}, ||omega||={mpmath.nstr(result.omega_norm, 8)}"
    )
    return result


def minimal_torsion_order(beta: Sequence, t: Subtorus) -> int:
    """
    Order of x + Y in X / Y for x with exact rational period coordinates beta;
    this is the smallest order of a torsion point in the translate x + Y.
    """
    fractions = [Fraction(str(b)) if not isinstance(b, Fraction) else b for b in beta]
    if len(fractions) != 2 * t.parent.g:
        raise ValueError(f"expected {2 * t.parent.g} period coordinates, got {len(fractions)}")
    gamma, _ = _quotient_coordinates(fractions, t)
    order = 1
    for c in gamma[t.lattice.rank:]:
        order = order * c.denominator // math.gcd(order, c.denominator)
    return order
