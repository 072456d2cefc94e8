#!/usr/bin/env python3
"""Generate the sample-complexity curve family and optionally plot it.

Writes the three curves (distillation, tomography baseline, noisy
distillation) on a shared Werner-weight grid as CSV.  With --plot a PNG
is rendered next to the CSV; matplotlib is imported only in that case.
"""

import argparse
import math
import sys
from pathlib import Path

from wernerdistill import bounds


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--eps", type=float, default=bounds.DEFAULT_EPS_PRIME,
                        help="estimation precision target (default %(default)s)")
    parser.add_argument("--delta", type=float, default=bounds.DEFAULT_DELTA,
                        help="failure probability budget (default %(default)s)")
    parser.add_argument("--S", type=float, default=bounds.DEFAULT_NOISY_S,
                        help="sensitivity attenuation for the noisy curve "
                             "(default e^-0.2 = %(default).6g)")
    parser.add_argument("--w-grid", type=float, nargs=3, default=(0.0, 0.95, 0.01),
                        metavar=("START", "STOP", "STEP"))
    parser.add_argument("--out", type=Path, default=Path("figure1.csv"))
    parser.add_argument("--plot", action="store_true",
                        help="also render the curves as a PNG next to the CSV")
    return parser.parse_args(argv)


def render_plot(curves: bounds.Figure1Curves, png_path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    styles = (
        (curves.distillation, "distillation", "tab:blue", "-"),
        (curves.tomography, "tomography", "tab:orange", "--"),
        (curves.noisy, f"noisy distillation (S={curves.noisy.S:.3g})", "tab:green", "-."),
    )
    for curve, label, color, linestyle in styles:
        xs = [w for w, n in zip(curve.w_grid, curve.n_min) if n is not None]
        ys = [n for n in curve.n_min if n is not None]
        ax.plot(xs, ys, label=label, color=color, linestyle=linestyle)
    ax.set_yscale("log")
    ax.set_xlabel("Werner weight w")
    ax.set_ylabel("minimum sample count")
    ax.set_title(f"eps'={curves.distillation.eps_prime}, delta={curves.distillation.delta}")
    ax.axvline(bounds.crossover_w(curves.distillation.eps_prime), color="gray",
               linewidth=0.8, label="crossover (1-eps')/2")
    ax.legend()
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)


def main(argv: list[str] | None = None) -> int:
    args = parse_args(argv)
    grid = bounds.make_w_grid(*args.w_grid)
    curves = bounds.figure1_curves(eps_prime=args.eps, delta=args.delta, S=args.S,
                                   w_grid=grid)
    args.out.write_text(bounds.figure1_to_csv(curves))
    print(f"wrote {args.out} ({len(grid)} grid points)")

    crossover = bounds.crossover_w(args.eps)
    inflation = 1.0 / (args.S * args.S)
    print(f"tomography baseline: {curves.tomography.n_min[0]} samples at any w")
    print(f"distillation beats tomography for w < {crossover:.6g}")
    print(f"noise inflates the distillation count by about {inflation:.6g} "
          f"(exp(-2 ln S) = {math.exp(-2.0 * math.log(args.S)):.6g})")

    if args.plot:
        png = args.out.with_suffix(".png")
        render_plot(curves, png)
        print(f"wrote {png}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
