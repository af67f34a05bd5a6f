#!/usr/bin/env python3
"""Run every shipped benchmark problem and print its solve summary.

Traces land next to this script in ``traces/`` by default.
"""
import argparse
import sys
from pathlib import Path

from hfp import cli

REPO = Path(__file__).resolve().parent.parent
PROBLEMS = sorted((REPO / "problems").glob("*.cfg"))


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out-dir", default=str(REPO / "scripts" / "traces"), help="trace directory"
    )
    parser.add_argument("--max-iters", type=int, default=None)
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    worst = 0
    for problem in PROBLEMS:
        print(f"== {problem.name} ==")
        argv = [
            "run",
            str(problem),
            "--trace-out",
            str(out_dir / f"{problem.stem}.trace.csv"),
        ]
        if args.max_iters is not None:
            argv += ["--max-iters", str(args.max_iters)]
        code = cli.main(argv)
        print(f"exit code      : {code}")
        print()
        # budget exhaustion (3) is an expected outcome for some problems
        if code not in (0, 3):
            worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
