"""
First-time setup script for zpkit.
Checks the Python version and dependencies, then precomputes the
modular-polynomial cache so later runs start instantly.

Usage:
    python setup.py             # cache Phi_N up to bounds.modular_level
    python setup.py --level 6   # cache Phi_1..Phi_6 only
"""

import argparse
import os
import sys
import time


def check_python():
    """Check Python version."""
    ver = sys.version_info
    print(f"  Python: {ver.major}.{ver.minor}.{ver.micro}", end="")
    if ver >= (3, 9):
        print(" [OK]")
        return True
    else:
        print(" [FAIL] Python 3.9+ required")
        return False


def check_dependencies():
    """Import every runtime dependency and report versions."""
    try:
        import mpmath
        import numpy
        import sympy
        import yaml

        print(f"  numpy {numpy.__version__}, mpmath {mpmath.__version__}, "
              f"sympy {sympy.__version__}, pyyaml {yaml.__version__} [OK]")
        return True
    except ImportError as e:
        print(f"  Missing: {e}")
        print("  Run: pip install -r requirements.txt")
        return False


def precompute_modular_polynomials(max_level, cache_dir):
    """Fill cache_dir with phi_<N>.json for N = 1..max_level."""
    sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
    from src.modular.polynomials import modular_polynomial, psi

    os.makedirs(cache_dir, exist_ok=True)
    for level in range(1, max_level + 1):
        start = time.time()
        phi = modular_polynomial(level, max_level, cache_dir)
        print(
            f"    Phi_{level}: degree {phi.degree_x} (psi = {psi(level)}), "
            f"{len(phi.terms)} terms, {time.time() - start:.1f}s"
        )


def main():
    parser = argparse.ArgumentParser(description="zpkit first-time setup")
    parser.add_argument("--config", "-c", default=None, help="Path to config.yaml file")
    parser.add_argument("--level", type=int, default=None, help="Highest level N to cache")
    args = parser.parse_args()

    print("=" * 55)
    print("  zpkit - First Time Setup")
    print("=" * 55)
    print()

    # Step 1: Check Python
    print("[1/3] Checking Python...")
    if not check_python():
        sys.exit(1)

    # Step 2: Check dependencies
    print("\n[2/3] Checking dependencies...")
    if not check_dependencies():
        sys.exit(1)

    # Step 3: Modular polynomial cache
    sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
    from src.config_loader import load_config

    config = load_config(args.config)
    level = args.level or config.bounds.modular_level
    cache_dir = config.run.cache_dir or "cache"
    print(f"\n[3/3] Caching modular polynomials up to N = {level} in '{cache_dir}'...")
    precompute_modular_polynomials(level, cache_dir)

    print("\n" + "=" * 55)
    print("  Setup complete! Run: python main.py demo manin-mumford")
    print("=" * 55)


if __name__ == "__main__":
    main()
