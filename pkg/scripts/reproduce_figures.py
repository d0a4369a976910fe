#!/usr/bin/env python3
"""Rebuild every figure-level dataset into a target directory.

Usage:
    python scripts/reproduce_figures.py --out figures_out [--profile fast|full]

Equivalent to `levqsim figures`, kept as a script entry for convenience.
"""

import argparse
import json

from levqsim.figures import PROFILES, reproduce_figures


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="figures_out")
    ap.add_argument("--profile", default="fast", choices=sorted(PROFILES))
    ap.add_argument("--only", nargs="*", default=None, help="subset of figure names")
    args = ap.parse_args()
    manifest = reproduce_figures(args.out, profile=args.profile, only=args.only)
    print(json.dumps(manifest, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
