"""Command-line front end.

Subcommands: exact (closed-form statistics of one round), bounds
(minimum sample counts), figure1 (sample-complexity curves over a weight
grid), run (seeded Monte Carlo), validate (cross-module consistency
suite).  Machine formats are csv and json; the default is a small
human-readable table with 6 significant digits, while csv/json carry
full precision.  Outputs are byte-identical across reruns with the same
flags and seed.

Exit codes: 0 success, 2 usage (argparse), 3 domain error in a flag
value, 4 I/O error, 5 validation failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import bounds, experiment, protocol, qcore, validate

EXIT_OK = 0
EXIT_DOMAIN = 3
EXIT_IO = 4
EXIT_VALIDATION = 5


class DomainError(ValueError):
    """A flag value outside its documented domain."""


def _check(condition: bool, flag: str, message: str) -> None:
    if not condition:
        raise DomainError(f"{flag}: {message}")


def _fmt6(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _table(rows: list[tuple[str, object]]) -> str:
    width = max(len(name) for name, _ in rows)
    return "\n".join(f"{name:<{width}}  {_fmt6(value)}" for name, value in rows) + "\n"


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _schedule_from_args(args: argparse.Namespace) -> experiment.NoiseSchedule:
    if args.t is not None or args.T is not None:
        _check(args.x is None, "--x", "give either --x or --t/--T, not both")
        _check(args.t is not None and args.T is not None, "--t", "--t and --T must be given together")
        _check(args.t >= 0.0, "--t", f"idle time must be nonnegative, got {args.t}")
        _check(args.T > 0.0, "--T", f"memory time constant must be positive, got {args.T}")
        return experiment.NoiseSchedule.exponential_idle(args.t, args.T)
    if args.x is not None:
        _check(0.0 <= args.x <= 1.0, "--x", f"must be in [0, 1], got {args.x}")
        return experiment.NoiseSchedule.fixed(args.x)
    return experiment.NoiseSchedule.noiseless()


def cmd_exact(args: argparse.Namespace) -> int:
    _check(0.0 <= args.w <= 1.0, "--w", f"must be in [0, 1], got {args.w}")
    _check(0.0 <= args.x <= 1.0, "--x", f"must be in [0, 1], got {args.x}")
    cfg = protocol.NoisePairConfig(args.w, args.x)
    dist = protocol.outcome_distribution(cfg)
    fidelity = protocol.fidelity_from_w(args.w)
    kept = qcore.depolarize(qcore.werner_state(args.w), args.x)
    meas = qcore.distillation_round_dense(kept, qcore.werner_state(args.w))
    post_fidelity = qcore.phi_plus_fidelity(qcore.post_selected_success_state(meas))
    rows: list[tuple[str, object]] = [
        ("w", args.w),
        ("x", args.x),
        ("p00", dist.p00),
        ("p01", dist.p01),
        ("p10", dist.p10),
        ("p11", dist.p11),
        ("success_probability", protocol.success_probability(cfg)),
        ("fidelity", fidelity),
        ("fidelity_after", protocol.fidelity_after_distillation(fidelity)),
        ("post_selection_fidelity", post_fidelity),
    ]
    if args.format == "json":
        text = json.dumps(dict(rows), indent=2) + "\n"
    elif args.format == "csv":
        text = (",".join(name for name, _ in rows) + "\n"
                + ",".join(repr(v) if isinstance(v, float) else str(v) for _, v in rows) + "\n")
    else:
        text = _table(rows)
    _write(text, args.out)
    return EXIT_OK


def _bounds_rows(w_grid, eps_prime, delta, S):
    rows = []
    for w in w_grid:
        nd = bounds.min_samples(bounds.METHOD_DISTILL, eps_prime, delta, w)
        nt = bounds.min_samples(bounds.METHOD_TOMO, eps_prime, delta)
        nn = bounds.min_samples(bounds.METHOD_NOISY, eps_prime, delta, w, S)
        rows.append((w, nd, nt, nn))
    return rows


def cmd_bounds(args: argparse.Namespace) -> int:
    _check(args.eps > 0.0, "--eps", f"must be positive, got {args.eps}")
    _check(0.0 < args.delta < 1.0, "--delta", f"must be in (0, 1), got {args.delta}")
    if args.t is not None or args.T is not None:
        _check(args.S is None, "--S", "give either --S or --t/--T, not both")
        _check(args.t is not None and args.T is not None, "--t", "--t and --T must be given together")
        _check(args.t >= 0.0, "--t", f"idle time must be nonnegative, got {args.t}")
        _check(args.T > 0.0, "--T", f"memory time constant must be positive, got {args.T}")
        S = math.exp(-args.t / args.T)
    else:
        S = args.S if args.S is not None else 1.0
    _check(0.0 < S <= 1.0, "--S", f"must be in (0, 1], got {S}")
    if args.w_grid is not None:
        start, stop, step = args.w_grid
        _check(step > 0.0, "--w-grid", f"step must be positive, got {step}")
        _check(0.0 <= start <= stop <= 1.0, "--w-grid", "grid must lie inside [0, 1]")
        grid = bounds.make_w_grid(start, stop, step)
    else:
        w = args.w if args.w is not None else 0.0
        _check(0.0 <= w <= 1.0, "--w", f"must be in [0, 1], got {w}")
        grid = (w,)
    rows = _bounds_rows(grid, args.eps, args.delta, S)
    if args.format == "json":
        payload = {
            "eps_prime": args.eps, "delta": args.delta, "S": S,
            "rows": [{"w": w, "n_distill": nd, "n_tomo": nt, "n_noisy": nn}
                     for w, nd, nt, nn in rows],
        }
        text = json.dumps(payload, indent=2) + "\n"
    elif args.format == "csv":
        lines = [bounds.FIGURE1_CSV_HEADER]
        for w, nd, nt, nn in rows:
            flags = ";".join(f for f, n in (("distill-unreachable", nd), ("noisy-unreachable", nn))
                             if n is None)
            lines.append(f"{w!r},{'' if nd is None else nd},{nt},{'' if nn is None else nn},{flags}")
        text = "\n".join(lines) + "\n"
    else:
        header = f"{'w':<10}{'n_distill':>14}{'n_tomo':>10}{'n_noisy':>14}  flags"
        lines = [header]
        for w, nd, nt, nn in rows:
            flags = ";".join(f for f, n in (("distill-unreachable", nd), ("noisy-unreachable", nn))
                             if n is None)
            nd_s = "unreachable" if nd is None else str(nd)
            nn_s = "unreachable" if nn is None else str(nn)
            lines.append(f"{_fmt6(w):<10}{nd_s:>14}{nt:>10}{nn_s:>14}  {flags}")
        text = "\n".join(lines) + "\n"
    _write(text, args.out)
    return EXIT_OK


def cmd_figure1(args: argparse.Namespace) -> int:
    _check(args.eps > 0.0, "--eps", f"must be positive, got {args.eps}")
    _check(0.0 < args.delta < 1.0, "--delta", f"must be in (0, 1), got {args.delta}")
    _check(0.0 < args.S <= 1.0, "--S", f"must be in (0, 1], got {args.S}")
    start, stop, step = args.w_grid
    _check(step > 0.0, "--w-grid", f"step must be positive, got {step}")
    _check(0.0 <= start <= stop < 1.0, "--w-grid", "grid must lie inside [0, 1)")
    grid = bounds.make_w_grid(start, stop, step)
    curves = bounds.figure1_curves(args.eps, args.delta, args.S, grid)
    text = bounds.figure1_to_json(curves) if args.format == "json" else bounds.figure1_to_csv(curves)
    _write(text, args.out)
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    _check(0.0 <= args.w <= 1.0, "--w", f"must be in [0, 1], got {args.w}")
    _check(args.N >= 1, "--N", f"must be at least 1, got {args.N}")
    _check(args.eps_w > 0.0, "--eps-w", f"must be positive, got {args.eps_w}")
    _check(0 <= args.seed < 2 ** 64, "--seed", "must fit in an unsigned 64-bit integer")
    _check(args.workers >= 1, "--workers", f"must be at least 1, got {args.workers}")
    schedule = _schedule_from_args(args)
    if args.reps is None:
        result = experiment.run_algorithm1(args.N, args.eps_w, args.w, schedule,
                                           args.seed, args.dense)
        if args.format == "csv":
            text = result.to_csv()
        elif args.format == "table":
            rows = [("N", result.N), ("n_count", result.n_count),
                    ("n00", result.counts[0]), ("n01", result.counts[1]),
                    ("n10", result.counts[2]), ("n11", result.counts[3]),
                    ("p00_hat", result.p00_hat), ("w_hat", result.w_hat),
                    ("eps", result.eps), ("delta", result.delta),
                    ("realized_S", result.realized_S), ("seed", result.seed),
                    ("clamped", result.clamped)]
            text = _table(rows)
        else:
            text = result.to_json()
        _write(text, args.out)
        return EXIT_OK
    _check(args.reps >= 1, "--reps", f"must be at least 1, got {args.reps}")
    summary = experiment.run_repetitions(args.w, args.N, args.eps_w, schedule,
                                         args.reps, args.seed, args.workers, args.dense)
    bound = bounds.noisy_distill_failure_bound(
        bounds.BoundSpec(args.N, args.eps_w, args.w, summary.realized_S))
    sigma3 = 3.0 * math.sqrt(bound.value * (1.0 - bound.value) / args.reps)
    rows = [
        ("reps", summary.reps), ("failures", summary.failure_count),
        ("failure_rate", summary.failure_rate),
        ("analytic_bound", bound.value), ("bound_vacuous", bound.vacuous),
        ("three_sigma", sigma3),
        ("within_bound", summary.failure_rate <= bound.value + sigma3),
        ("realized_S", summary.realized_S), ("N", summary.N),
        ("eps_w", summary.eps_w), ("w", summary.true_w),
        ("master_seed", summary.master_seed),
    ]
    csv_text = experiment.repetitions_to_csv(summary)
    if args.out is None:
        sys.stdout.write(csv_text)
        summary_text = (json.dumps(dict(rows), indent=2) + "\n"
                        if args.format == "json" else _table(rows))
        sys.stderr.write(summary_text)
    else:
        _write(csv_text, args.out)
        summary_text = (json.dumps(dict(rows), indent=2) + "\n"
                        if args.format == "json" else _table(rows))
        sys.stdout.write(summary_text)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    _check(0.0 < args.grid_step <= 0.5, "--grid-step", f"must be in (0, 0.5], got {args.grid_step}")
    if args.perturb is not None:
        _check(args.perturb in validate.CHECK_NAMES, "--perturb",
               f"unknown check; expected one of {', '.join(validate.CHECK_NAMES)}")
    results = validate.run_all_checks(args.grid_step, args.perturb)
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        sys.stdout.write(f"[{status}] {r.name:<{width}}  {r.detail}\n")
    failed = sum(1 for r in results if not r.passed)
    sys.stdout.write(f"{len(results)} checks: {len(results) - failed} passed, {failed} failed\n")
    return EXIT_OK if failed == 0 else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wernerdistill",
        description="Werner-weight estimation from one distillation round: "
                    "exact statistics, sample-complexity bounds, Monte Carlo runs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="closed-form statistics of one round at (w, x)")
    p.add_argument("--w", type=float, required=True, help="Werner weight in [0, 1]")
    p.add_argument("--x", type=float, default=0.0, help="depolarizing weight on the kept copy")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.add_argument("--out", default=None, help="write output to this path instead of stdout")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("bounds", help="minimum sample counts for a target precision")
    p.add_argument("--eps", type=float, required=True, help="target precision on w")
    p.add_argument("--delta", type=float, default=bounds.DEFAULT_DELTA, help="failure budget")
    p.add_argument("--w", type=float, default=None, help="Werner weight (default 0)")
    p.add_argument("--w-grid", type=float, nargs=3, metavar=("START", "STOP", "STEP"),
                   default=None, help="weight grid instead of a single --w")
    p.add_argument("--S", type=float, default=None, help="attenuation factor in (0, 1]")
    p.add_argument("--t", type=float, default=None, help="idle time (with --T, sets S = exp(-t/T))")
    p.add_argument("--T", type=float, default=None, help="memory time constant")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("figure1", help="sample-complexity curves over a weight grid")
    p.add_argument("--eps", type=float, default=bounds.DEFAULT_EPS_PRIME)
    p.add_argument("--delta", type=float, default=bounds.DEFAULT_DELTA)
    p.add_argument("--S", type=float, default=bounds.DEFAULT_NOISY_S,
                   help="attenuation of the noisy curve (default exp(-1/5))")
    p.add_argument("--w-grid", type=float, nargs=3, metavar=("START", "STOP", "STEP"),
                   default=(0.0, 0.95, 0.01))
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_figure1)

    p = sub.add_parser("run", help="seeded Monte Carlo estimation runs")
    p.add_argument("--w", type=float, required=True, help="true Werner weight")
    p.add_argument("--N", type=int, required=True, help="rounds per run")
    p.add_argument("--eps-w", type=float, required=True, help="precision target on w")
    p.add_argument("--x", type=float, default=None, help="fixed depolarizing weight per round")
    p.add_argument("--t", type=float, default=None, help="idle time (with --T)")
    p.add_argument("--T", type=float, default=None, help="memory time constant")
    p.add_argument("--seed", type=int, default=0, help="master seed (unsigned 64-bit)")
    p.add_argument("--reps", type=int, default=None,
                   help="repeat the run this many times and report the failure rate")
    p.add_argument("--workers", type=int, default=1,
                   help="worker threads for --reps; does not change results")
    p.add_argument("--dense", action="store_true",
                   help="sample from the dense engine instead of the closed form (slow)")
    p.add_argument("--format", choices=("table", "csv", "json"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("validate", help="run the cross-module consistency checks")
    p.add_argument("--grid-step", type=float, default=0.05,
                   help="grid density; affects runtime, not verdicts")
    p.add_argument("--perturb", default=None, metavar="CHECK",
                   help="inject a perturbation into the named check (harness self-test)")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
