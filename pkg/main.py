"""
zpkit - unlikely-intersections toolkit.

Usage:
    python main.py torus torsion --curve "x + y - 1" --max-order 30
    python main.py modular phi --level 2
    python main.py count run --set graph.json --k 1 --tmin 10 --tmax 60 --step 10
    python main.py demo manin-mumford
    python main.py --config X ...   # use a custom config file
"""

import argparse
import logging
import os
import sys
from typing import List, Optional

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from src.app import DEMOS  # noqa: E402

logger = logging.getLogger("zpkit")


def setup_logging(verbose: bool = False, log_file: Optional[str] = "zpkit.log"):
    """Configure logging. stdout carries the JSON artifacts, so logs go to stderr."""
    level = logging.DEBUG if verbose else logging.INFO

    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file, encoding="utf-8"))
    logging.basicConfig(
        level=level,
        format="%(asctime)s [%(levelname)-7s] %(name)-20s: %(message)s",
        datefmt="%H:%M:%S",
        handlers=handlers,
        force=True,
    )

    # Reduce noise from libraries
    logging.getLogger("sympy").setLevel(logging.WARNING)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zpkit",
        description="zpkit - defects, torsion, modular relations, heights and bounded-height counting",
    )
    parser.add_argument("--config", "-c", type=str, default=None, help="Path to config.yaml file")
    parser.add_argument("--verbose", "-v", action="store_true", help="Enable verbose logging")
    parser.add_argument("--precision-bits", type=int, default=None, help="Working precision in bits")
    parser.add_argument("--seed", type=int, default=None, help="Seed for randomised sweeps")
    parser.add_argument("--out", type=str, default=None, help="Write the result here instead of stdout")
    parser.add_argument("--format", choices=("json", "csv"), default=None, help="Output format")
    modules = parser.add_subparsers(dest="module", required=True)

    torus = modules.add_parser("torus", help="Algebraic tori: defects, torsion, unlikely intersections")
    actions = torus.add_subparsers(dest="action", required=True)
    p = actions.add_parser("defect", help="Defect, geodesic defect and the lattices L, M of a coset")
    p.add_argument("--variety", required=True, help="JSON {constants, directions} (file or inline)")
    p.add_argument("--inside", default=None, help="Containing coset B; also checks the defect condition")
    p = actions.add_parser("torsion", help="Torsion points on a curve f(x, y) = 0")
    p.add_argument("--curve", required=True, help='Laurent polynomial, e.g. "x + y - 1", or JSON')
    p.add_argument("--max-order", type=int, default=None)
    p = actions.add_parser("unlikely", help="Points of a curve on codimension-2 subgroups")
    p.add_argument("--curve", required=True, help='JSON list of coordinates in t, e.g. ["t", "1 - t", "2"]')
    p.add_argument("--exp-bound", type=int, required=True)
    p.add_argument("--t-height", type=int, required=True)
    p = actions.add_parser("special", help="Smallest torsion coset through a point")
    p.add_argument("--point", required=True, help="JSON list of coordinates")

    modular = modules.add_parser("modular", help="j-function, modular polynomials, special subvarieties")
    actions = modular.add_subparsers(dest="action", required=True)
    p = actions.add_parser("j", help="Evaluate j(z)")
    p.add_argument("--z", required=True, help='"a+bi" or "re,im"')
    p = actions.add_parser("reduce", help="Reduce z to the fundamental domain")
    p.add_argument("--z", required=True)
    p = actions.add_parser("phi", help="Classical modular polynomial Phi_N")
    p.add_argument("--level", type=int, required=True)
    p = actions.add_parser("complexity", help="Complexity of a special subvariety of Y(1)^n")
    p.add_argument("spec", help="JSON {n, partition, fixed_points, matrices}")
    p = actions.add_parser("relate", help="Detect a modular relation Phi_N(j(z1), j(z2)) = 0")
    p.add_argument("--z1", required=True)
    p.add_argument("--z2", required=True)
    p.add_argument("--nmax", type=int, required=True)
    p = actions.add_parser("fiber", help="Mobius fiber of a special subvariety")
    p.add_argument("spec", help="JSON {n, partition, fixed_points, matrices}")
    p.add_argument("--params", default=None, help="JSON list of parameters to parametrize")
    p.add_argument("--member", default=None, help="JSON list of points z_1..z_n to test")

    abelian = modules.add_parser("abelian", help="Polarized complex tori and elliptic curves")
    actions = abelian.add_subparsers(dest="action", required=True)
    for name, text in (
        ("degree", "Degree of a subtorus"),
        ("minima", "Successive-minima period basis of a subtorus"),
        ("nearby", "Period close to a tangent vector"),
        ("complexity", "Torsion-coset complexity"),
    ):
        p = actions.add_parser(name, help=text)
        p.add_argument("--torus", required=True, help="JSON {g, periods, hermitian}")
        p.add_argument("--subtorus", default=None, help="JSON list of period-lattice rows (default: all)")
        if name == "degree":
            p.add_argument("--compare", default=None, help="Second hermitian form, or a scalar multiple of H")
        if name == "nearby":
            p.add_argument("--z", required=True, help="JSON list of complex coordinates")
        if name == "complexity":
            p.add_argument("--order", type=int, default=None, help="Minimal torsion order of the coset")
            p.add_argument("--beta", default=None, help="Exact rational period coordinates of the translate")
    p = actions.add_parser("annihilate", help="Small homomorphism killing a point")
    p.add_argument("problem", help="JSON {source, target, generators, p_log | period_coords}")
    p = actions.add_parser("height", help="Canonical height on an elliptic curve over Q")
    p.add_argument("--curve", required=True, help='JSON {"a": "p/q", "b": "p/q"}')
    p.add_argument("--point", required=True, help='JSON ["x", "y"]')
    p.add_argument("--steps", type=int, default=6, help="Doubling steps for the limit sequence")

    count = modules.add_parser("count", help="Bounded-height point counting")
    actions = count.add_subparsers(dest="action", required=True)
    p = actions.add_parser("run", help="Count over a range of height bounds")
    p.add_argument("--set", required=True, help="JSON set specification")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--tmin", type=int, required=True)
    p.add_argument("--tmax", type=int, required=True)
    p.add_argument("--step", type=int, default=1)
    p.add_argument("--mode", choices=("full", "pi2-image"), default="full")
    p.add_argument("--csv", default=None, help="Also write the series as CSV")
    p = actions.add_parser("fit", help="Fit log count against log T")
    p.add_argument("csv", help="CSV written by count run")

    demo = modules.add_parser("demo", help="Bundled end-to-end scenarios")
    demo.add_argument("name", choices=DEMOS)
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    """Parse argv, run the command and write the result. Returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    setup_logging(verbose=args.verbose)

    from src.app import ZpkitApp
    from src.config_loader import load_config

    try:
        config = load_config(args.config)
        if args.precision_bits is not None:
            config.precision.bits = args.precision_bits
        if args.seed is not None:
            config.run.seed = args.seed
        if args.out is not None:
            config.run.output = args.out
        if args.format is not None:
            config.run.format = args.format
        config.validate()

        app = ZpkitApp(config)
        command, result, rows = app.execute(args)
        app.write_output(app.render(command, result, rows))
    except ValueError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return 1
    except Exception as e:
        logger.error(f"Fatal error: {e}", exc_info=True)
        return 1

    if args.module == "demo" and not result.get("passed", False):
        logger.warning(f"Demo {args.name} failed")
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
