#!/usr/bin/env python3
"""Compare the main scheme against its classical special cases on one problem.

On the shipped min-norm problem the driver S is the identity and T is
idempotent, so full_power, wang_xu and ceng produce bit-identical traces;
the printed table makes that visible.
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
        "--variants", nargs="+", default=["full_power", "wang_xu", "ceng", "sahu"]
    )
    parser.add_argument("--max-iters", type=int, default=5000)
    parser.add_argument(
        "--out-dir", default=str(REPO / "scripts" / "traces"), help="trace directory"
    )
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return cli.main(
        [
            "compare",
            args.problem,
            *args.variants,
            "--max-iters",
            str(args.max_iters),
            "--trace-out",
            str(out_dir / "comparison.csv"),
        ]
    )


if __name__ == "__main__":
    sys.exit(main())
