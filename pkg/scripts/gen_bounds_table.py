#!/usr/bin/env python3
"""Regenerate the partial-spread bounds grid.

Writes the best-known lower/upper bounds (with provenance columns) for a
rectangle of parameters to stdout, in any of the four table formats the
package supports.  The defaults reproduce the binary grid used in the
acceptance suite.

    python3 scripts/gen_bounds_table.py --q 2 --v-range 6..17 --k-range 2..7
"""

import argparse
import sys

from qspread.cli import _BOUND_COLUMNS, _report_row, emit_table, parse_range
from qspread.bounds import best_bounds


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--q", type=int, default=2)
    parser.add_argument("--v-range", default="6..17", metavar="A..B")
    parser.add_argument("--k-range", default="2..7", metavar="A..B")
    parser.add_argument("--format", choices=("text", "csv", "json", "md"),
                        default="md")
    args = parser.parse_args()

    v_lo, v_hi = parse_range(args.v_range)
    k_lo, k_hi = parse_range(args.k_range)
    rows = []
    for k in range(k_lo, k_hi + 1):
        for v in range(v_lo, v_hi + 1):
            if v < k:
                continue
            rows.append(_report_row(best_bounds(args.q, v, k)))
    sys.stdout.write(emit_table(rows, _BOUND_COLUMNS, args.format))
    return 0


if __name__ == "__main__":
    sys.exit(main())
