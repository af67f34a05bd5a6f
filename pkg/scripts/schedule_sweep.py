#!/usr/bin/env python3
"""Sweep step-size exponents on the min-norm benchmark and print the grid.

Each admissible (p, q) pair solves the problem once; inadmissible pairs are
reported with the condition they violate.
"""
import argparse
import sys
from pathlib import Path

from hfp import cli

REPO = Path(__file__).resolve().parent.parent


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--problem", default=str(REPO / "problems" / "minnorm.cfg")
    )
    parser.add_argument(
        "--p-values",
        type=float,
        nargs="+",
        default=[0.3, 0.5, 0.7, 0.9, 1.1, 1.5],
    )
    parser.add_argument("--q-offset", type=float, default=0.4)
    parser.add_argument("--max-iters", type=int, default=20000)
    parser.add_argument("--out", default=str(REPO / "scripts" / "sweep.csv"))
    args = parser.parse_args()

    code = cli.main(
        [
            "sweep",
            args.problem,
            "--p-values",
            *[str(p) for p in args.p_values],
            "--q-offset",
            str(args.q_offset),
            "--max-iters",
            str(args.max_iters),
            "--out",
            args.out,
        ]
    )
    if code == 0:
        print(Path(args.out).read_text(), end="")
    return code


if __name__ == "__main__":
    sys.exit(main())
