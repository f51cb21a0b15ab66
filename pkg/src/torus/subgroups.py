"""
Algebraic subgroups, monomial cosets and the defect calculus in G_m^n.

A subgroup is cut out by a relation lattice (rows a with x^a = 1). A
monomial subvariety c*T is a translate of the subtorus T whose cocharacter
lattice is the saturation of `directions`. For such cosets the lattices
L (monomials constant on v) and M (monomials that are roots of unity on v)
are computed exactly, which gives the defect and the geodesic defect.
"""

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Optional, Sequence, Tuple

from src.linalg.lattice import (
    IntegerLattice,
    intersect,
    kernel_lattice,
    orthogonal_complement,
    saturation,
    unimodular_completion,
)
from src.torus.coordinates import Coordinate, monomial, valuation_matrix

logger = logging.getLogger(__name__)


class ContainmentError(ValueError):
    """The first subvariety is not contained in the second."""


@dataclass(frozen=True)
class SubgroupSpec:
    relations: IntegerLattice

    @property
    def ambient_dim(self) -> int:
        return self.relations.ambient_dim

    @property
    def dim(self) -> int:
        return self.ambient_dim - self.relations.rank

    @property
    def codim(self) -> int:
        return self.relations.rank

    @property
    def is_connected(self) -> bool:
        return saturation(self.relations) == self.relations

    def contains_point(self, point: Sequence[Coordinate]) -> bool:
        return all(monomial(point, a).is_one for a in self.relations.basis)

    def to_dict(self) -> dict:
        return {
            "relations": self.relations.to_dict(),
            "dim": self.dim,
            "connected": self.is_connected,
        }


def subgroup_dim(s: SubgroupSpec) -> int:
    return s.dim


@dataclass(frozen=True)
class MonomialSubvariety:
    """constants * T, T the subtorus with cocharacters saturation(directions)."""

    constants: Tuple[Coordinate, ...]
    directions: IntegerLattice

    def __post_init__(self):
        if len(self.constants) != self.directions.ambient_dim:
            raise ValueError(
                f"{len(self.constants)} constants given for G_m^{self.directions.ambient_dim}"
            )

    @classmethod
    def build(cls, constants: Sequence, directions: Sequence[Sequence[int]]) -> "MonomialSubvariety":
        coords = tuple(Coordinate.parse(c) for c in constants)
        return cls(coords, IntegerLattice.from_rows(directions, len(coords)))

    @classmethod
    def point(cls, constants: Sequence) -> "MonomialSubvariety":
        coords = tuple(Coordinate.parse(c) for c in constants)
        return cls(coords, IntegerLattice.zero(len(coords)))

    @classmethod
    def from_dict(cls, data: dict) -> "MonomialSubvariety":
        return cls.build(data["constants"], data.get("directions", []))

    @property
    def ambient_dim(self) -> int:
        return self.directions.ambient_dim

    @property
    def dim(self) -> int:
        return self.directions.rank

    def cocharacters(self) -> IntegerLattice:
        return saturation(self.directions)

    def point_at(self, params: Sequence[Coordinate]) -> Tuple[Coordinate, ...]:
        """c * prod_j params_j^{s_j} over the saturated cocharacter basis s_j."""
        basis = self.cocharacters().basis
        if len(params) != len(basis):
            raise ValueError(f"expected {len(basis)} parameters, got {len(params)}")
        coords = list(self.constants)
        for t, s in zip(params, basis):
            coords = [c * t ** k for c, k in zip(coords, s)]
        return tuple(coords)

    def contains(self, other: "MonomialSubvariety") -> bool:
        if other.ambient_dim != self.ambient_dim:
            return False
        if not self.cocharacters().contains(other.directions):
            return False
        shift = [a / b for a, b in zip(other.constants, self.constants)]
        return all(monomial(shift, l).is_one for l in orthogonal_complement(self.directions).basis)

    def to_dict(self) -> dict:
        return {
            "constants": [c.to_dict() for c in self.constants],
            "directions": self.directions.to_dict(),
            "dim": self.dim,
        }


@dataclass
class DefectReport:
    dim_A: int
    dim_special_closure: int
    dim_geodesic_closure: int
    delta: int
    delta_geo: int
    rank_L: int
    rank_M: int

    def invariants_hold(self) -> bool:
        return (
            self.delta == self.dim_special_closure - self.dim_A
            and self.delta_geo == self.dim_geodesic_closure - self.dim_A
            and self.delta_geo <= self.delta
            and self.delta - self.delta_geo == self.rank_L - self.rank_M
        )

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def root_of_unity_relations(coords: Sequence[Coordinate]) -> IntegerLattice:
    """{a : x^a is a root of unity} = kernel of the prime valuation matrix."""
    n = len(coords)
    return kernel_lattice(valuation_matrix(coords), n)


def constant_monomial_lattices(v: MonomialSubvariety) -> Tuple[IntegerLattice, IntegerLattice]:
    """(L, M) with M contained in L."""
    lat_l = orthogonal_complement(v.directions)
    lat_m = intersect(lat_l, root_of_unity_relations(v.constants))
    logger.debug(f"L rank {lat_l.rank}, M rank {lat_m.rank} for dim-{v.dim} coset")
    return lat_l, lat_m


def defect_report(v: MonomialSubvariety) -> DefectReport:
    lat_l, lat_m = constant_monomial_lattices(v)
    n = v.ambient_dim
    special = n - lat_m.rank
    geodesic = n - lat_l.rank
    return DefectReport(
        dim_A=v.dim,
        dim_special_closure=special,
        dim_geodesic_closure=geodesic,
        delta=special - v.dim,
        delta_geo=geodesic - v.dim,
        rank_L=lat_l.rank,
        rank_M=lat_m.rank,
    )


def defect_condition_check(a: MonomialSubvariety, b: MonomialSubvariety) -> bool:
    """delta(B) - delta_geo(B) <= delta(A) - delta_geo(A) for A inside B."""
    if not b.contains(a):
        raise ContainmentError(
            f"subvariety of dim {a.dim} is not contained in the subvariety of dim {b.dim}"
        )
    ra, rb = defect_report(a), defect_report(b)
    return rb.delta - rb.delta_geo <= ra.delta - ra.delta_geo


def smallest_special(p: Sequence) -> MonomialSubvariety:
    """The torsion coset <p>: translate of the subtorus cut out by M(p)."""
    coords = tuple(Coordinate.parse(c) for c in p)
    relations = root_of_unity_relations(coords)
    directions = orthogonal_complement(relations)
    return MonomialSubvariety(coords, directions)


@dataclass
class TorsionTranslate:
    point: Tuple[Coordinate, ...]
    order: int

    def to_dict(self) -> dict:
        return {"point": [c.to_dict() for c in self.point], "order": self.order}


def torsion_translate(v: MonomialSubvariety) -> TorsionTranslate:
    """
    A point of minimal finite order on the torsion coset v.

    In coordinates y = x^U, with the first rows of U spanning L, the coset
    reads y_i = c^{u_i} (roots of unity) for those rows and is free in the
    rest; setting the free coordinates to 1 and pulling back gives the point.
    """
    lat_l, lat_m = constant_monomial_lattices(v)
    if lat_m != lat_l:
        raise ValueError(
            f"not a torsion coset: rank L = {lat_l.rank} but rank M = {lat_m.rank}"
        )
    n = v.ambient_dim
    u, u_inv = unimodular_completion(lat_l)
    s = lat_l.rank
    y = [monomial(v.constants, u[i]) if i < s else Coordinate(Fraction(1)) for i in range(n)]
    point = tuple(monomial(y, [u_inv[k][i] for i in range(n)]) for k in range(n))
    for l in lat_l.basis:
        if monomial(point, l) != monomial(v.constants, l):
            raise ValueError("torsion translate failed the coset membership check")
    order = 1
    for c in point:
        order = lcm(order, c.order)
    return TorsionTranslate(point, order)


def random_coordinate(rng: random.Random, primes: Sequence[int] = (2, 3, 5)) -> Coordinate:
    modulus = Fraction(1)
    for p in primes:
        modulus *= Fraction(p) ** rng.randint(-2, 2)
    order = rng.choice([1, 1, 2, 3, 4, 6])
    return Coordinate(modulus, order, rng.randrange(order))


def random_nested_pair(
    rng: random.Random, n: Optional[int] = None
) -> Tuple[MonomialSubvariety, MonomialSubvariety]:
    """Seeded A inside B in G_m^n, n <= 6, for defect sweeps."""
    n = n or rng.randint(1, 6)
    k_b = rng.randint(0, n)
    dirs_b = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(k_b)]
    # sometimes make B's constants a torsion point so that delta drops
    if rng.random() < 0.3:
        consts_b = [Coordinate(Fraction(1), rng.choice([1, 2, 3, 6]), rng.randrange(6)) for _ in range(n)]
    else:
        consts_b = [random_coordinate(rng) for _ in range(n)]
    b = MonomialSubvariety(tuple(consts_b), IntegerLattice.from_rows(dirs_b, n))

    basis_b = b.cocharacters().rows()
    k_a = rng.randint(0, len(basis_b))
    dirs_a = [
        [sum(rng.randint(-2, 2) * row[j] for row in basis_b) for j in range(n)]
        for _ in range(k_a)
    ]
    params = [random_coordinate(rng) if rng.random() < 0.5 else Coordinate.root_of_unity(rng.choice([1, 2, 3]))
              for _ in basis_b]
    consts_a = b.point_at(params) if basis_b else tuple(consts_b)
    a = MonomialSubvariety(tuple(consts_a), IntegerLattice.from_rows(dirs_a, n))
    return a, b
