#!/usr/bin/env python3
"""Print a resolution-convergence table for the truncation cross form.

For each order s the spectral and kernel route values are listed per
grid size together with their mutual discrepancy, then the observed
orders and the Richardson limit. With --no-extrapolate the table shows
the raw partial-sum saturation instead (the slow 3-2s tail law).

Usage: python scripts/convergence_table.py [--s 1.25 ...] [--no-extrapolate]
"""

import argparse
import sys

from fraclab.experiments import convergence_study

DEFAULT_N = [2048, 4096, 8192, 16384]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--func", default="x*exp(-x^2)")
    ap.add_argument("--s", type=float, nargs="*", default=[1.1, 1.25, 1.4])
    ap.add_argument("--N", type=int, nargs="*", default=DEFAULT_N)
    ap.add_argument("--no-extrapolate", action="store_true")
    args = ap.parse_args(argv)

    bad = 0
    for s in args.s:
        rep = convergence_study(
            args.func, s, args.N, extrapolate=not args.no_extrapolate
        )
        print(f"== s = {s} ({args.func}) ==")
        width = max(len(r.quantity) for r in rep.results)
        for r in rep.results:
            line = f"  {r.quantity:<{width}s}  spectral {r.spectral_value: .12e}"
            if r.kernel_value is not None:
                line += f"  kernel {r.kernel_value: .12e}"
                line += f"  disc {r.discrepancy:.3e}"
            print(line)
        for v in rep.verdicts:
            print(f"  [{v.status}] {v.claim}: {v.detail}")
        bad += 0 if rep.all_pass else 1
        print()
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
