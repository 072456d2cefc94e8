#!/usr/bin/env python3
"""Sweep empirical failure rates against the analytic failure bound.

For each Werner weight in the sweep the sample count is sized by
min_samples at the requested (eps_w, delta), many independent runs are
executed, and the observed miss rate |w_hat - w| >= eps_w is compared
with delta.  Output is one CSV row per weight.
"""

import argparse
import math
import sys
from pathlib import Path

from wernerdistill import bounds, experiment

CSV_HEADER = "w,eps_w,delta,N,reps,failures,failure_rate,bound_at_N,within_three_sigma"


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--eps-w", type=float, default=0.05,
                        help="estimate accuracy target (default %(default)s)")
    parser.add_argument("--delta", type=float, default=0.1,
                        help="failure budget used to size N (default %(default)s)")
    parser.add_argument("--w-grid", type=float, nargs=3, default=(0.0, 0.6, 0.1),
                        metavar=("START", "STOP", "STEP"))
    parser.add_argument("--reps", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=4)
    parser.add_argument("--out", type=Path, default=Path("bound_validation.csv"))
    return parser.parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    args = parse_args(argv)
    three_sigma = 3.0 * math.sqrt(args.delta * (1.0 - args.delta) / args.reps)
    rows = [CSV_HEADER]
    worst_margin = -math.inf
    for i, w in enumerate(bounds.make_w_grid(*args.w_grid)):
        n = bounds.min_samples(bounds.METHOD_DISTILL, args.eps_w, args.delta, w=w)
        if n is None:
            print(f"w={w:.4g}: bound vacuous at eps_w={args.eps_w}, skipped")
            continue
        summary = experiment.run_repetitions(
            w, n, args.eps_w, reps=args.reps,
            master_seed=args.seed + i, workers=args.workers,
        )
        bound_at_n = bounds.failure_bound(bounds.METHOD_DISTILL, n, args.eps_w, w=w).value
        rate = summary.failure_rate
        ok = rate <= args.delta + three_sigma
        worst_margin = max(worst_margin, rate - args.delta)
        rows.append(f"{w!r},{args.eps_w!r},{args.delta!r},{n},{args.reps},"
                    f"{summary.failure_count},{rate!r},{bound_at_n!r},{int(ok)}")
        print(f"w={w:.4g}: N={n}, failures={summary.failure_count}/{args.reps} "
              f"(rate {rate:.4f} vs budget {args.delta})")
    args.out.write_text("\n".join(rows) + "\n")
    print(f"wrote {args.out}")
    print(f"worst rate-budget margin: {worst_margin:+.4f} "
          f"(three-sigma allowance {three_sigma:.4f})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
