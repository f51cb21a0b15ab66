"""
Main application orchestrator for zpkit.
Wires the lattice, torus, modular, abelian and counting modules to the
command line: reads JSON inputs, runs one operation or demo, and writes the
result envelope.
"""

import csv
import io
import json
import logging
import os
import random
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import mpmath
from mpmath import mp

from src.abelian.complexity import torsion_coset_complexity
from src.abelian.elliptic import (
    EllipticCurveQ,
    canonical_height,
    doubling_limit,
    naive_height,
    parse_point,
    point_to_list,
)
from src.abelian.homs import small_annihilating_hom
from src.abelian.torus import (
    PolarizedTorus,
    Subtorus,
    degree,
    degree_comparability,
    elliptic_torus,
    minimal_torsion_order,
    nearby_period,
    parse_complex,
    product_torus,
    small_period_basis,
)
from src.config_loader import RunConfig
from src.counting.counting import CSV_HEADER, count_points, count_series, growth_fit
from src.counting.enumeration import farey_count
from src.counting.samples import parse_sample
from src.linalg.gram import GramForm, successive_minima
from src.linalg.lattice import IntegerLattice, determinant
from src.modular.jfunction import (
    UpperHalfPoint,
    apply_matrix,
    j_eval,
    mat_mul2,
    reduce_to_fundamental_domain,
)
from src.modular.polynomials import (
    detect_modular_relation,
    graph_residual,
    modular_polynomial,
    psi,
)
from src.modular.special import (
    SpecialSubvarietyModular,
    complexity,
    special_point_parameter_height,
)
from src.torus.subgroups import (
    MonomialSubvariety,
    constant_monomial_lattices,
    defect_condition_check,
    defect_report,
    random_nested_pair,
    smallest_special,
    torsion_translate,
)
from src.torus.torsion import LaurentPolynomial, torsion_points_on_curve
from src.torus.unlikely import parse_curve, unlikely_search

logger = logging.getLogger(__name__)

DEMOS = (
    "manin-mumford",
    "unlikely",
    "counting-growth",
    "minkowski-sweep",
    "defect-sweep",
    "modular-sweep",
    "height-check",
    "annihilator",
)


def read_json_argument(value):
    """A path to a JSON file, an inline JSON document, or a bare string."""
    if value is None:
        return None
    if os.path.exists(value):
        with open(value, "r", encoding="utf-8") as f:
            return json.load(f)
    try:
        return json.loads(value)
    except json.JSONDecodeError:
        return value


def _nstr(x, digits: int) -> str:
    return mpmath.nstr(x, digits)


class DemoReport:
    """Pass/fail checks of one bundled scenario."""

    def __init__(self, name: str):
        self.name = name
        self.checks: List[dict] = []
        self.extra: dict = {}

    def check(self, label: str, passed: bool, achieved, expected) -> bool:
        self.checks.append(
            {"check": label, "passed": bool(passed), "achieved": achieved, "expected": expected}
        )
        level = logging.INFO if passed else logging.WARNING
        logger.log(level, f"[{self.name}] {label}: {'PASS' if passed else 'FAIL'} ({achieved})")
        return passed

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def to_dict(self) -> dict:
        out = {"name": self.name, "passed": self.passed, "checks": self.checks}
        out.update(self.extra)
        return out


class ZpkitApp:
    """
    Main application class: one instance per invocation.

    Flow:
    1. main.py parses argv and loads the RunConfig
    2. ZpkitApp.execute() maps (module, action) to a handler
    3. The handler returns a JSON-ready result (and CSV rows where relevant)
    4. write_output() embeds the result in the envelope and emits it
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self._handlers: Dict[Tuple[str, str], Callable] = {
            ("torus", "defect"): self.torus_defect,
            ("torus", "torsion"): self.torus_torsion,
            ("torus", "unlikely"): self.torus_unlikely,
            ("torus", "special"): self.torus_special,
            ("modular", "j"): self.modular_j,
            ("modular", "reduce"): self.modular_reduce,
            ("modular", "phi"): self.modular_phi,
            ("modular", "complexity"): self.modular_complexity,
            ("modular", "relate"): self.modular_relate,
            ("modular", "fiber"): self.modular_fiber,
            ("abelian", "degree"): self.abelian_degree,
            ("abelian", "minima"): self.abelian_minima,
            ("abelian", "nearby"): self.abelian_nearby,
            ("abelian", "annihilate"): self.abelian_annihilate,
            ("abelian", "height"): self.abelian_height,
            ("abelian", "complexity"): self.abelian_complexity,
            ("count", "run"): self.count_run,
            ("count", "fit"): self.count_fit,
        }
        self._demos: Dict[str, Callable[[], DemoReport]] = {
            "manin-mumford": self.demo_manin_mumford,
            "unlikely": self.demo_unlikely,
            "counting-growth": self.demo_counting_growth,
            "minkowski-sweep": self.demo_minkowski_sweep,
            "defect-sweep": self.demo_defect_sweep,
            "modular-sweep": self.demo_modular_sweep,
            "height-check": self.demo_height_check,
            "annihilator": self.demo_annihilator,
        }

    # -- plumbing --------------------------------------------------------

    @property
    def bits(self) -> int:
        return self.config.precision.bits

    @property
    def digits(self) -> int:
        return self.config.digits

    def execute(self, args) -> Tuple[str, dict, Optional[List[dict]]]:
        """Run the command named by args; returns (command, result, csv_rows)."""
        if args.module == "demo":
            if args.name not in self._demos:
                raise ValueError(f"unknown demo {args.name!r}; choose from {', '.join(DEMOS)}")
            logger.info(f"Running demo {args.name}")
            report = self._demos[args.name]()
            return f"demo {args.name}", report.to_dict(), None
        handler = self._handlers.get((args.module, args.action))
        if handler is None:
            raise ValueError(f"unknown command {args.module} {args.action}")
        logger.info(f"Running {args.module} {args.action}")
        result = handler(args)
        rows = None
        if isinstance(result, tuple):
            result, rows = result
        return f"{args.module} {args.action}", result, rows

    def envelope(self, command: str, result: dict) -> dict:
        return {
            "command": command,
            "config": self.config.to_dict(),
            "precision_bits": self.bits,
            "result": result,
        }

    def render(self, command: str, result: dict, rows: Optional[List[dict]] = None) -> str:
        if self.config.run.format == "csv":
            if rows is None:
                raise ValueError(f"'{command}' has no CSV form; use --format json")
            return rows_to_csv(rows)
        return json.dumps(self.envelope(command, result), sort_keys=True, indent=2, default=str) + "\n"

    def write_output(self, text: str) -> None:
        path = self.config.run.output
        if path:
            with open(path, "w", encoding="utf-8", newline="") as f:
                f.write(text)
            logger.info(f"Wrote {path}")
        else:
            print(text, end="")

    def _subtorus(self, data: dict, lattice_rows) -> Subtorus:
        tol = self.config.tolerances
        torus = PolarizedTorus.from_dict(data, self.bits, tol.integrality)
        if lattice_rows is None:
            return torus.full()
        return Subtorus(torus, IntegerLattice.from_rows(lattice_rows, 2 * torus.g))

    # -- torus -----------------------------------------------------------

    def torus_defect(self, args) -> dict:
        v = MonomialSubvariety.from_dict(read_json_argument(args.variety))
        report = defect_report(v)
        lat_l, lat_m = constant_monomial_lattices(v)
        result = {
            "variety": v.to_dict(),
            "defect": report.to_dict(),
            "L": lat_l.to_dict(),
            "M": lat_m.to_dict(),
            "invariants_hold": report.invariants_hold(),
        }
        if args.inside:
            b = MonomialSubvariety.from_dict(read_json_argument(args.inside))
            result["container"] = b.to_dict()
            result["defect_condition"] = defect_condition_check(v, b)
        return result

    def torus_torsion(self, args) -> dict:
        f = LaurentPolynomial.from_dict(read_json_argument(args.curve))
        max_order = args.max_order or self.config.bounds.max_order
        result = torsion_points_on_curve(f, max_order).to_dict()
        result["curve"] = f.to_dict()
        return result

    def torus_unlikely(self, args) -> dict:
        curve = parse_curve(read_json_argument(args.curve))
        hits = unlikely_search(curve, args.exp_bound, args.t_height, self.bits)
        return {
            "exponent_bound": args.exp_bound,
            "t_height_bound": args.t_height,
            "count": len(hits),
            "hits": [h.to_dict() for h in hits],
        }

    def torus_special(self, args) -> dict:
        point = read_json_argument(args.point)
        v = smallest_special(point)
        report = defect_report(v)
        result = {"special": v.to_dict(), "defect": report.to_dict()}
        if report.delta == report.delta_geo:
            result["torsion_translate"] = torsion_translate(v).to_dict()
        return result

    # -- modular ---------------------------------------------------------

    def _point(self, text) -> UpperHalfPoint:
        return UpperHalfPoint.parse(text, self.bits)

    def modular_j(self, args) -> dict:
        z = self._point(args.z)
        value = j_eval(z, self.bits, self.config.bounds.j_max_terms, self.config.precision.guard_bits)
        result = value.to_dict(self.digits)
        result["z"] = z.to_list(self.digits)
        return result

    def modular_reduce(self, args) -> dict:
        z = self._point(args.z)
        w, gamma = reduce_to_fundamental_domain(z, self.bits)
        return {"z": z.to_list(self.digits), "reduced": w.to_list(self.digits), "gamma": [list(r) for r in gamma]}

    def _cache_dir(self) -> Optional[str]:
        return self.config.run.cache_dir or None

    def modular_phi(self, args) -> dict:
        phi = modular_polynomial(args.level, self.config.bounds.modular_level, self._cache_dir())
        result = phi.to_dict()
        result["psi"] = psi(args.level)
        result["symmetric"] = phi.is_symmetric()
        result["degree"] = phi.degree_x
        return result

    def modular_complexity(self, args) -> dict:
        s = SpecialSubvarietyModular.from_dict(read_json_argument(args.spec))
        return {
            "special": s.to_dict(),
            "complexity": complexity(s),
            "parameter_height": special_point_parameter_height(s),
        }

    def modular_relate(self, args) -> dict:
        z1, z2 = self._point(args.z1), self._point(args.z2)
        found = detect_modular_relation(
            z1,
            z2,
            args.nmax,
            self.config.tolerances.relation,
            self.bits,
            self.config.bounds.modular_level,
            self._cache_dir(),
            self.config.precision.guard_bits,
            self.config.bounds.j_max_terms,
        )
        relation = None if found is None else {"level": found[0], "residual": _nstr(found[1], 10)}
        return {"z1": z1.to_list(self.digits), "z2": z2.to_list(self.digits), "n_max": args.nmax, "relation": relation}

    def modular_fiber(self, args) -> dict:
        s = SpecialSubvarietyModular.from_dict(read_json_argument(args.spec))
        fiber = s.fiber(self.bits)
        result = {"special": s.to_dict(), "fiber": fiber.to_dict(self.digits)}
        if args.params:
            params = [self._point(p).value for p in read_json_argument(args.params)]
            result["point"] = [[_nstr(mpmath.re(z), self.digits), _nstr(mpmath.im(z), self.digits)]
                               for z in fiber.parametrize(params)]
        if args.member:
            z = [self._point(p).value for p in read_json_argument(args.member)]
            result["member"] = fiber.membership(z, self.config.tolerances.membership)
        return result

    # -- abelian ---------------------------------------------------------

    def abelian_degree(self, args) -> dict:
        t = self._subtorus(read_json_argument(args.torus), read_json_argument(args.subtorus))
        result = {"dim": t.dim, "degree": _nstr(degree(t), self.digits), "lattice": t.lattice.to_dict()}
        if args.compare:
            h2 = read_json_argument(args.compare)
            if isinstance(h2, (int, float, str)):
                h2 = [[parse_complex(h2) * t.parent.hermitian[i, j] for j in range(t.parent.g)]
                      for i in range(t.parent.g)]
            result["comparability"] = degree_comparability(t, h2).to_dict()
        return result

    def abelian_minima(self, args) -> dict:
        t = self._subtorus(read_json_argument(args.torus), read_json_argument(args.subtorus))
        report = small_period_basis(t, self.config.bounds.enumeration_rank, self.config.lll.delta)
        result = report.to_dict()
        result["minkowski_holds"] = report.minkowski_holds()
        return result

    def abelian_nearby(self, args) -> dict:
        t = self._subtorus(read_json_argument(args.torus), read_json_argument(args.subtorus))
        z = [parse_complex(c) for c in read_json_argument(args.z)]
        found = nearby_period(z, t, self.config.bounds.enumeration_rank, self.config.lll.delta)
        return found.to_dict(self.digits)

    def abelian_annihilate(self, args) -> dict:
        data = read_json_argument(args.problem)
        tol = self.config.tolerances.integrality
        source = PolarizedTorus.from_dict(data["source"], self.bits, tol)
        target = PolarizedTorus.from_dict(data["target"], self.bits, tol)
        result = small_annihilating_hom(
            data["generators"],
            data.get("p_log"),
            source,
            target,
            box=self.config.bounds.annihilator_box,
            delta=self.config.lll.delta,
            tolerance=tol,
            period_coords=data.get("period_coords"),
        )
        return result.to_dict()

    def abelian_height(self, args) -> dict:
        curve = EllipticCurveQ.from_dict(read_json_argument(args.curve))
        p = parse_point(read_json_argument(args.point))
        curve.check_point(p)
        limit = doubling_limit(curve, p, args.steps, self.config.tolerances.height_convergence)
        return {
            "curve": curve.to_dict(),
            "point": point_to_list(p),
            "torsion_order": curve.torsion_order(p),
            "naive_height": _nstr(naive_height(p), self.digits),
            "canonical_height": _nstr(canonical_height(curve, p, self.bits), self.digits),
            "doubling_limit": [_nstr(v, self.digits) for v in limit.values],
            "doubling_converged": limit.converged,
        }

    def abelian_complexity(self, args) -> dict:
        t = self._subtorus(read_json_argument(args.torus), read_json_argument(args.subtorus))
        if args.beta is not None:
            beta = [Fraction(str(b)) for b in read_json_argument(args.beta)]
            order = minimal_torsion_order(beta, t)
        elif args.order is not None:
            order = args.order
        else:
            raise ValueError("give the torsion order (--order) or exact period coordinates (--beta)")
        return torsion_coset_complexity(order, t, self.config.tolerances.integrality).to_dict()

    # -- counting --------------------------------------------------------

    def count_run(self, args):
        z = parse_sample(read_json_argument(args.set), self.config.tolerances.isolation_radius)
        ts = list(range(args.tmin, args.tmax + 1, args.step))
        if not ts:
            raise ValueError(f"empty T range {args.tmin}..{args.tmax} step {args.step}")
        results = count_series(
            z,
            args.k,
            ts,
            args.mode,
            self.config.tolerances.membership,
            self.config.bounds.enumeration_degree,
            self.config.bounds.enumeration_height,
        )
        rows = [dict(zip(CSV_HEADER, r.csv_row())) for r in results]
        if args.csv:
            with open(args.csv, "w", encoding="utf-8", newline="") as f:
                f.write(rows_to_csv(rows))
            logger.info(f"Wrote {len(rows)} rows to {args.csv}")
        return {"k": args.k, "mode": args.mode, "series": [r.to_dict() for r in results]}, rows

    def count_fit(self, args) -> dict:
        with open(args.csv, "r", encoding="utf-8") as f:
            pairs = [(int(row["T"]), int(row["count"])) for row in csv.DictReader(f)]
        return growth_fit(pairs).to_dict()

    # -- demos -----------------------------------------------------------

    def demo_manin_mumford(self) -> DemoReport:
        report = DemoReport("manin-mumford")
        found = torsion_points_on_curve(LaurentPolynomial.parse("x + y - 1"), 30)
        report.check("point count", len(found.points) == 2, len(found.points), 2)
        orders = sorted(p.order for p in found.points)
        report.check("orders", orders == [6, 6], orders, [6, 6])
        report.extra["points"] = [p.to_dict() for p in found.points]
        return report

    def demo_unlikely(self) -> DemoReport:
        report = DemoReport("unlikely")
        hits = unlikely_search(parse_curve(["t", "1 - t", "2"]), 5, 1, self.bits)
        report.check("all hits verified", all(h.verified for h in hits), len(hits), "every hit")
        sixth = [h for h in hits if tuple(h.parameter.minpoly) == (1, -1, 1)]
        report.check("primitive sixth root recovered", bool(sixth), len(sixth), ">= 1")
        report.extra["hits"] = [h.to_dict() for h in hits]
        return report

    def demo_counting_growth(self) -> DemoReport:
        report = DemoReport("counting-growth")
        x_to_x = parse_sample({"kind": "graph", "expr": {"op": "var"}, "domain": ["0", "1"]})
        ts = list(range(10, 61, 10))
        counts = [count_points(x_to_x, 1, t).count for t in ts]
        expected = [farey_count(t) for t in ts]
        report.check("graph of x counts Farey points", counts == expected, counts, expected)
        fit = growth_fit(list(zip(ts, counts)))
        report.check("Farey growth exponent", 1.8 <= fit.epsilon <= 2.2, round(fit.epsilon, 4), "[1.8, 2.2]")

        exp2 = parse_sample(
            {"kind": "graph", "expr": {"op": "pow", "args": [2, {"op": "var"}]}, "domain": ["1", "2"]}
        )
        ts2 = list(range(4, 41, 4))
        counts2 = [count_points(exp2, 1, t).count for t in ts2]
        report.check("graph of 2^x stays at 2", all(c == 2 for c in counts2), counts2, 2)
        report.extra["series"] = {
            "x": [{"T": t, "count": c} for t, c in zip(ts, counts)],
            "2^x": [{"T": t, "count": c} for t, c in zip(ts2, counts2)],
        }
        report.extra["epsilon_hat"] = {"x": fit.epsilon, "2^x": growth_fit(list(zip(ts2, counts2))).epsilon}
        return report

    def demo_minkowski_sweep(self, count: int = 1000) -> DemoReport:
        report = DemoReport("minkowski-sweep")
        rng = random.Random(self.config.run.seed)
        holds = 0
        worst = mpmath.mpf(0)
        for _ in range(count):
            lat, form = random_lattice(rng, self.bits)
            minima = successive_minima(lat, form, self.config.bounds.enumeration_rank, self.config.lll.delta)
            holds += minima.minkowski_holds()
            worst = max(worst, minima.product() / minima.minkowski_bound())
        report.check("Minkowski bound", holds == count, f"{holds}/{count}", f"{count}/{count}")
        report.extra["worst_ratio"] = _nstr(worst, 10)
        return report

    def demo_defect_sweep(self, count: int = 200) -> DemoReport:
        report = DemoReport("defect-sweep")
        rng = random.Random(self.config.run.seed)
        condition = identity = 0
        for _ in range(count):
            a, b = random_nested_pair(rng)
            condition += defect_condition_check(a, b)
            identity += all(defect_report(v).invariants_hold() for v in (a, b))
        report.check("defect condition", condition == count, f"{condition}/{count}", f"{count}/{count}")
        report.check("rank identity", identity == count, f"{identity}/{count}", f"{count}/{count}")
        return report

    def demo_modular_sweep(self, per_level: int = 20, invariance: int = 50) -> DemoReport:
        report = DemoReport("modular-sweep")
        rng = random.Random(self.config.run.seed)
        guard, terms = self.config.precision.guard_bits, self.config.bounds.j_max_terms
        phi1 = modular_polynomial(1, self.config.bounds.modular_level, self._cache_dir())
        report.check("Phi_1 = X - Y", phi1.terms == {(1, 0): 1, (0, 1): -1}, phi1.to_dict()["terms"], [[0, 1, "-1"], [1, 0, "1"]])
        worst = mpmath.mpf(0)
        for level in range(1, 6):
            phi = modular_polynomial(level, self.config.bounds.modular_level, self._cache_dir())
            report.check(
                f"Phi_{level} symmetric of degree psi",
                phi.is_symmetric() and phi.degree_x == psi(level),
                phi.degree_x,
                psi(level),
            )
            for _ in range(per_level):
                tau = random_tau(rng, self.bits)
                res = graph_residual(phi, tau, ((level, 0), (0, 1)), self.bits, guard, terms)
                worst = max(worst, res.residual)
        report.check("graph residual", worst < 1e-6, _nstr(worst, 5), "< 1e-6")

        j_i = j_eval(UpperHalfPoint.from_parts(0, 1, self.bits), self.bits, terms, guard).value
        with mp.workprec(self.bits):
            rho = UpperHalfPoint(mpmath.mpc(mpmath.mpf(1) / 2, mpmath.sqrt(3) / 2))
        j_rho = j_eval(rho, self.bits, terms, guard).value
        report.check("j(i) = 1728", abs(j_i - 1728) < 1e-9, _nstr(j_i, 20), 1728)
        report.check("j(rho) = 0", abs(j_rho) < 1e-9, _nstr(abs(j_rho), 5), 0)

        drift = mpmath.mpf(0)
        for _ in range(invariance):
            tau = random_tau(rng, self.bits)
            gamma = random_sl2z(rng)
            with mp.workprec(self.bits + guard):
                moved = UpperHalfPoint(apply_matrix(gamma, tau.value))
            a = j_eval(tau, self.bits, terms, guard).value
            b = j_eval(moved, self.bits, terms, guard).value
            drift = max(drift, abs(a - b))
        report.check("j(g tau) = j(tau)", drift < 1e-8, _nstr(drift, 5), "< 1e-8")
        return report

    def demo_height_check(self) -> DemoReport:
        report = DemoReport("height-check")
        curve = EllipticCurveQ(Fraction(0), Fraction(-2))
        base = curve.point(3, 5)
        samples = [curve.multiply(base, k) for k in (1, 2, 3)]
        samples += [curve.negate(p) for p in samples]
        bits = self.bits
        doubling = mpmath.mpf(0)
        with mp.workprec(bits):
            for p in samples:
                h1 = canonical_height(curve, p, bits)
                h2 = canonical_height(curve, curve.double(p), bits)
                doubling = max(doubling, abs(h2 - 4 * h1))
        report.check("h(2P) = 4 h(P)", doubling < 1e-6, _nstr(doubling, 5), "< 1e-6")

        parallelogram = mpmath.mpf(0)
        other = EllipticCurveQ(Fraction(0), Fraction(17))
        pairs = [(curve, samples[0], samples[1]), (curve, samples[1], samples[2]),
                 (other, other.point(-1, 4), other.point(2, 5))]
        with mp.workprec(bits):
            for c, p, q in pairs:
                lhs = canonical_height(c, c.add(p, q), bits) + canonical_height(c, c.add(p, c.negate(q)), bits)
                rhs = 2 * canonical_height(c, p, bits) + 2 * canonical_height(c, q, bits)
                parallelogram = max(parallelogram, abs(lhs - rhs))
        report.check("parallelogram law", parallelogram < 1e-5, _nstr(parallelogram, 5), "< 1e-5")

        torsion = [
            (EllipticCurveQ(Fraction(0), Fraction(1)), (-1, 0)),
            (EllipticCurveQ(Fraction(0), Fraction(1)), (0, 1)),
            (EllipticCurveQ(Fraction(0), Fraction(1)), (2, 3)),
            (EllipticCurveQ(Fraction(-1), Fraction(0)), (0, 0)),
        ]
        worst = max(canonical_height(c, c.point(*xy), bits) for c, xy in torsion)
        report.check("torsion height", worst < 1e-8, _nstr(worst, 5), "< 1e-8")
        return report

    def demo_annihilator(self, count: int = 100) -> DemoReport:
        """Difference map on E x E, then random torsion points with exact residuals."""
        report = DemoReport("annihilator")
        e = elliptic_torus("0.3+1.1i", self.bits)
        ee = product_torus(e, e)
        gens = projection_generators()
        with mp.workprec(self.bits):
            z = mpmath.mpc("0.1234567", "0.4567891")
        found = small_annihilating_hom(gens, [z, z], ee, e, box=self.config.bounds.annihilator_box)
        report.check("difference map", found.coefficients == [1, -1] and found.residual == 0,
                     found.coefficients, [1, -1])
        rng = random.Random(self.config.run.seed)
        exact = 0
        for _ in range(count):
            m = rng.randint(2, 12)
            beta = [Fraction(rng.randrange(m), m) for _ in range(4)]
            hom = small_annihilating_hom(gens, None, ee, e, box=self.config.bounds.annihilator_box,
                                         period_coords=beta)
            exact += hom.residual == 0
        report.check("exact torsion residuals", exact == count, f"{exact}/{count}", f"{count}/{count}")
        return report


def projection_generators() -> List[List[List[int]]]:
    """Rational representations of the two projections E x E -> E."""
    return [
        [[1, 0, 0, 0], [0, 1, 0, 0]],
        [[0, 0, 1, 0], [0, 0, 0, 1]],
    ]


def random_lattice(rng: random.Random, precision_bits: int = 128) -> Tuple[IntegerLattice, GramForm]:
    """Full-rank lattice in Z^d, 2 <= d <= 8, with the standard inner product."""
    d = rng.randint(2, 8)
    while True:
        rows = [[rng.randint(-4, 4) for _ in range(d)] for _ in range(d)]
        if determinant(rows) != 0:
            break
    return IntegerLattice.from_rows(rows, d), GramForm.identity(d, precision_bits)


def random_tau(rng: random.Random, precision_bits: int = 128) -> UpperHalfPoint:
    re_part = f"{rng.randint(-500, 500) / 1000:.3f}"
    im_part = f"{rng.randint(866, 1600) / 1000:.3f}"
    return UpperHalfPoint.from_parts(re_part, im_part, precision_bits)


def random_sl2z(rng: random.Random, steps: int = 6):
    gamma = ((1, 0), (0, 1))
    for _ in range(steps):
        k = rng.randint(-3, 3)
        gamma = mat_mul2(gamma, ((1, k), (0, 1)))
        gamma = mat_mul2(gamma, ((0, -1), (1, 0)))
    return gamma


def rows_to_csv(rows: List[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_HEADER, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()
