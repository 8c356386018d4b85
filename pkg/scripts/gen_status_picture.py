#!/usr/bin/env python3
"""Regenerate the existence picture for small-divisor point sets.

For each requested (q, r) pair, prints one status row per cardinality n:
whether an n-point q^r-divisible point set exists, is excluded, or is
undecided, together with the pipeline stage that settled it.

    python3 scripts/gen_status_picture.py --pairs 2,1 2,2 2,3 --max-n 80
"""

import argparse
import sys

from qspread.cli import emit_table
from qspread.macwilliams import status_range

DEFAULT_PAIRS = ("2,1", "2,2", "2,3", "3,1", "3,2", "5,1")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--pairs", nargs="+", default=list(DEFAULT_PAIRS),
                        metavar="Q,R")
    parser.add_argument("--max-n", type=int, default=100)
    parser.add_argument("--format", choices=("text", "csv", "json", "md"),
                        default="text")
    args = parser.parse_args()

    for pair in args.pairs:
        q, r = (int(part) for part in pair.split(","))
        verdicts = status_range(q, r, 1, args.max_n)
        rows = [
            {"q": q, "r": r, "n": n,
             "status": verdicts[n].status, "stage": verdicts[n].stage}
            for n in range(1, args.max_n + 1)
        ]
        sys.stdout.write(emit_table(rows, ["q", "r", "n", "status", "stage"],
                                    args.format))
        if args.format == "text":
            sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
