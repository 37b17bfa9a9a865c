"""Run the outer-separated surjectivity scan over a grid of parameters
and print one summary line per cell.

Any sufficiency violation on a prime modulus makes the script exit with
status 4, mirroring the `ca-verify conjecture` contract; a nonzero
necessity count is interesting, not fatal, and is only reported.

Example:
    python3 scripts/scan_conjecture_grid.py --primes 3 5 --d 1 2 --q-max 4
"""

import argparse
import sys
import time

from ca_verify.criteria import conjecture_scan


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--primes", type=int, nargs="+", default=[3],
        help="odd prime moduli to scan (default: 3)",
    )
    parser.add_argument(
        "--d", type=int, nargs="+", default=[1, 2],
        help="diameters to scan (default: 1 2)",
    )
    parser.add_argument("--q-min", type=int, default=1)
    parser.add_argument("--q-max", type=int, default=4)
    parser.add_argument(
        "--pi", default="all",
        help="'all' or 'sample:N' interior tables per cell (default: all)",
    )
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args(argv)

    worst = 0
    for p in args.primes:
        for d in args.d:
            started = time.monotonic()
            report = conjecture_scan(
                p, d,
                q_min=args.q_min, q_max=args.q_max,
                pi=args.pi, seed=args.seed, jobs=args.jobs,
            )
            elapsed = time.monotonic() - started
            sufficiency = report["sufficiency_violations"]
            necessity = report["necessity_counterexamples"]
            print(
                f"p={p} d={d} q=[{args.q_min},{args.q_max}] pi={args.pi}: "
                f"{report['total_rules']} rules, "
                f"{report['surjective_rules']} surjective, "
                f"{sufficiency['count']} sufficiency violations, "
                f"{necessity['count']} necessity counterexamples "
                f"({elapsed:.1f} s)"
            )
            if sufficiency["count"]:
                print(f"  VIOLATIONS: {', '.join(sufficiency['ids'])}")
                worst = 4
            if necessity["count"]:
                print(f"  necessity ids: {', '.join(necessity['ids'][:20])}")
    return worst


if __name__ == "__main__":
    sys.exit(main())
