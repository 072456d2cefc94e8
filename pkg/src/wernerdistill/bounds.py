"""Hoeffding failure bounds and sample-complexity curves for both estimators.

Every bound in this module is the two-sided Hoeffding tail
2 exp(-2 n t^2 / (b - a)^2) routed through the single kernel
``hoeffding_tail``, so the three published forms stay consistent by
construction:

* distillation route: t = (2 eps'(1 - w) - eps'^2) / 4 on [0, 1], giving
  2 exp(-(n/8) (2 eps'(1 - w) - eps'^2)^2);
* tomography route:  t = eps'/4, giving 2 exp(-(n/8) eps'^2);
* distillation with idled copies attenuated by a factor S:
  t = S (2 eps'(1 - w) - eps'^2) / 4, giving
  2 exp(-(n/8) S^2 (2 eps'(1 - w) - eps'^2)^2).

Here eps' is the target precision on w.  The distillation margin
2 eps'(1 - w) - eps'^2 can be nonpositive (w too close to 1), in which
case the bound is vacuous and the sample count unreachable; both are
reported as flags, never exceptions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .protocol import _check_unit_interval

METHOD_DISTILL = "distillation"
METHOD_TOMO = "tomography"
METHOD_NOISY = "noisy-distillation"
METHODS = (METHOD_DISTILL, METHOD_TOMO, METHOD_NOISY)

#: Default attenuation factor for the noisy curves: idled copies keep
#: coherent weight exp(-1/5) on average.
DEFAULT_NOISY_S = math.exp(-1.0 / 5.0)
DEFAULT_DELTA = 0.01
DEFAULT_EPS_PRIME = 0.1

FIGURE1_CSV_HEADER = "w,n_distill,n_tomo,n_noisy,flags"

# Cap on the threshold-settling loops in min_samples.  In sane regimes one
# step suffices; near-vacuous margins make the bound numerically flat in n,
# where uncapped loops would not terminate.
_SETTLE_STEPS = 8


def hoeffding_tail(n: int, t: float, a: float, b: float) -> float:
    """Two-sided Hoeffding tail min(1, 2 exp(-2 n t^2 / (b - a)^2)).

    Bounds the probability that the mean of n independent samples from
    [a, b] deviates from its expectation by at least t > 0.
    """
    if n < 1:
        raise ValueError(f"sample count must be at least 1, got {n}")
    t = float(t)
    if t <= 0.0:
        raise ValueError(f"deviation must be positive, got {t}")
    a = float(a)
    b = float(b)
    if b <= a:
        raise ValueError(f"support must satisfy a < b, got [{a}, {b}]")
    return min(1.0, 2.0 * math.exp(-2.0 * n * t * t / (b - a) ** 2))


def sensitivity_margin(eps_prime: float, w: float) -> float:
    """Worst-case shift 2 eps'(1 - w) - eps'^2 of p00 when w moves by eps'.

    Positive exactly when the distillation estimator can resolve w to
    precision eps'; nonpositive means the route is vacuous there.
    """
    eps_prime = float(eps_prime)
    if eps_prime <= 0.0:
        raise ValueError(f"target precision must be positive, got {eps_prime}")
    w = _check_unit_interval("w", w)
    return 2.0 * eps_prime * (1.0 - w) - eps_prime * eps_prime


@dataclass(frozen=True)
class BoundSpec:
    """Inputs to a failure bound: sample count, precision, weight, attenuation."""

    n: int
    eps_prime: float
    w: float = 0.0
    S: float = 1.0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"sample count must be at least 1, got {self.n}")
        if self.eps_prime <= 0.0:
            raise ValueError(f"target precision must be positive, got {self.eps_prime}")
        _check_unit_interval("w", self.w)
        if not 0.0 < self.S <= 1.0:
            raise ValueError(f"attenuation factor must be in (0, 1], got {self.S}")


class BoundValue(NamedTuple):
    """A failure-probability bound; vacuous marks the value-1 degenerate case."""

    value: float
    vacuous: bool


def noisy_distill_failure_bound(spec: BoundSpec) -> BoundValue:
    """Failure bound for the distillation estimator with attenuation S."""
    margin = sensitivity_margin(spec.eps_prime, spec.w)
    if margin <= 0.0:
        return BoundValue(1.0, True)
    return BoundValue(hoeffding_tail(spec.n, spec.S * margin / 4.0, 0.0, 1.0), False)


def distill_failure_bound(spec: BoundSpec) -> BoundValue:
    """Failure bound for the noise-free distillation estimator (S must be 1)."""
    if spec.S != 1.0:
        raise ValueError(f"noise-free bound requires S = 1, got {spec.S}")
    return noisy_distill_failure_bound(spec)


def tomo_failure_bound(n: int, eps_prime: float) -> float:
    """Failure bound 2 exp(-(n/8) eps'^2) for the tomography estimator; w-free."""
    eps_prime = float(eps_prime)
    if eps_prime <= 0.0:
        raise ValueError(f"target precision must be positive, got {eps_prime}")
    return hoeffding_tail(n, eps_prime / 4.0, 0.0, 1.0)


def failure_bound(method: str, n: int, eps_prime: float, w: float = 0.0, S: float = 1.0) -> BoundValue:
    """Dispatch to the named method's failure bound."""
    if method == METHOD_TOMO:
        return BoundValue(tomo_failure_bound(n, eps_prime), False)
    if method == METHOD_DISTILL:
        return distill_failure_bound(BoundSpec(n, eps_prime, w, 1.0))
    if method == METHOD_NOISY:
        return noisy_distill_failure_bound(BoundSpec(n, eps_prime, w, S))
    raise ValueError(f"unknown method {method!r}, expected one of {METHODS}")


def _deviation_scale(method: str, eps_prime: float, w: float, S: float) -> float | None:
    """The t fed to the Hoeffding kernel, or None where the method is vacuous."""
    if method == METHOD_TOMO:
        return eps_prime / 4.0
    margin = sensitivity_margin(eps_prime, w)
    if margin <= 0.0:
        return None
    if method == METHOD_DISTILL:
        return margin / 4.0
    if method == METHOD_NOISY:
        return S * margin / 4.0
    raise ValueError(f"unknown method {method!r}, expected one of {METHODS}")


def min_samples(method: str, eps_prime: float, delta: float, w: float = 0.0, S: float = 1.0) -> int | None:
    """Smallest n whose failure bound is at most delta, or None if unreachable.

    Inverts the bound in closed form, n = ln(2/delta) / (2 t^2), then
    settles the integer threshold so that bound(n) <= delta < bound(n - 1)
    whenever the exponent is numerically resolvable.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"failure budget must be in (0, 1), got {delta}")
    eps_prime = float(eps_prime)
    if eps_prime <= 0.0:
        raise ValueError(f"target precision must be positive, got {eps_prime}")
    _check_unit_interval("w", w)
    if not 0.0 < S <= 1.0:
        raise ValueError(f"attenuation factor must be in (0, 1], got {S}")
    t = _deviation_scale(method, eps_prime, w, S)
    if t is None:
        return None
    n = max(1, math.ceil(math.log(2.0 / delta) / (2.0 * t * t)))
    for _ in range(_SETTLE_STEPS):
        if n > 1 and hoeffding_tail(n - 1, t, 0.0, 1.0) <= delta:
            n -= 1
        else:
            break
    for _ in range(_SETTLE_STEPS):
        if hoeffding_tail(n, t, 0.0, 1.0) > delta:
            n += 1
        else:
            break
    return n


def crossover_w(eps_prime: float) -> float:
    """Weight (1 - eps')/2 where the distillation and tomography bounds meet.

    Below it the distillation route needs strictly fewer samples; above
    it, strictly more.
    """
    eps_prime = float(eps_prime)
    if not 0.0 < eps_prime < 1.0:
        raise ValueError(f"target precision must be in (0, 1), got {eps_prime}")
    return (1.0 - eps_prime) / 2.0


def make_w_grid(start: float, stop: float, step: float) -> tuple[float, ...]:
    """Inclusive arithmetic grid with values rounded to 12 decimals.

    Rounding keeps grid points like 0.27 exact instead of accumulating
    binary step noise, which in turn keeps serialized output tidy.
    """
    if step <= 0.0:
        raise ValueError(f"grid step must be positive, got {step}")
    if stop < start:
        raise ValueError(f"grid stop {stop} is below start {start}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + i * step, 12) for i in range(count))


@dataclass(frozen=True)
class SampleComplexityCurve:
    """Minimum sample counts over a grid of Werner weights for one method."""

    method: str
    eps_prime: float
    delta: float
    S: float
    w_grid: tuple[float, ...]
    n_min: tuple[int | None, ...]

    def __post_init__(self) -> None:
        if len(self.w_grid) != len(self.n_min):
            raise ValueError("w_grid and n_min must have equal length")


class Figure1Curves(NamedTuple):
    """The three curves of the sample-complexity comparison figure."""

    distillation: SampleComplexityCurve
    tomography: SampleComplexityCurve
    noisy: SampleComplexityCurve


def figure1_curves(
    eps_prime: float = DEFAULT_EPS_PRIME,
    delta: float = DEFAULT_DELTA,
    S: float = DEFAULT_NOISY_S,
    w_grid: Sequence[float] | None = None,
) -> Figure1Curves:
    """Sample-complexity curves of both estimators, plus the attenuated route.

    The default grid spans w = 0 to 0.95 in steps of 0.01.  Grid points
    must lie in [0, 1); the tomography curve is constant over w.
    """
    grid = tuple(float(w) for w in w_grid) if w_grid is not None else make_w_grid(0.0, 0.95, 0.01)
    for w in grid:
        if not 0.0 <= w < 1.0:
            raise ValueError(f"grid weights must lie in [0, 1), got {w}")
    n_tomo = min_samples(METHOD_TOMO, eps_prime, delta)
    return Figure1Curves(
        SampleComplexityCurve(
            METHOD_DISTILL, eps_prime, delta, 1.0, grid,
            tuple(min_samples(METHOD_DISTILL, eps_prime, delta, w) for w in grid),
        ),
        SampleComplexityCurve(METHOD_TOMO, eps_prime, delta, 1.0, grid, (n_tomo,) * len(grid)),
        SampleComplexityCurve(
            METHOD_NOISY, eps_prime, delta, S, grid,
            tuple(min_samples(METHOD_NOISY, eps_prime, delta, w, S) for w in grid),
        ),
    )


def _row_flags(n_distill: int | None, n_noisy: int | None) -> str:
    flags = []
    if n_distill is None:
        flags.append("distill-unreachable")
    if n_noisy is None:
        flags.append("noisy-unreachable")
    return ";".join(flags)


def figure1_to_csv(curves: Figure1Curves) -> str:
    """Render the three curves as one CSV table, empty cells for unreachable."""
    lines = [FIGURE1_CSV_HEADER]
    rows = zip(curves.distillation.w_grid, curves.distillation.n_min,
               curves.tomography.n_min, curves.noisy.n_min)
    for w, nd, nt, nn in rows:
        cells = (repr(w), _int_cell(nd), _int_cell(nt), _int_cell(nn), _row_flags(nd, nn))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _int_cell(n: int | None) -> str:
    return "" if n is None else str(n)


def _parse_int_cell(cell: str) -> int | None:
    return None if cell == "" else int(cell)


def figure1_from_csv(text: str, eps_prime: float = DEFAULT_EPS_PRIME,
                     delta: float = DEFAULT_DELTA, S: float = DEFAULT_NOISY_S) -> Figure1Curves:
    """Parse a figure1_to_csv table back into curves.

    The CSV stores only the grid and sample counts; bound parameters are
    supplied by the caller (defaults match the default figure).
    """
    lines = text.strip("\n").split("\n")
    if not lines or lines[0] != FIGURE1_CSV_HEADER:
        raise ValueError(f"expected header {FIGURE1_CSV_HEADER!r}")
    grid: list[float] = []
    columns: tuple[list[int | None], ...] = ([], [], [])
    for line in lines[1:]:
        cells = line.split(",")
        if len(cells) != 5:
            raise ValueError(f"expected 5 cells per row, got {len(cells)}: {line!r}")
        grid.append(float(cells[0]))
        for column, cell in zip(columns, cells[1:4]):
            column.append(_parse_int_cell(cell))
    w_grid = tuple(grid)
    return Figure1Curves(
        SampleComplexityCurve(METHOD_DISTILL, eps_prime, delta, 1.0, w_grid, tuple(columns[0])),
        SampleComplexityCurve(METHOD_TOMO, eps_prime, delta, 1.0, w_grid, tuple(columns[1])),
        SampleComplexityCurve(METHOD_NOISY, eps_prime, delta, S, w_grid, tuple(columns[2])),
    )


def _curve_to_dict(curve: SampleComplexityCurve) -> dict:
    return {
        "method": curve.method,
        "eps_prime": curve.eps_prime,
        "delta": curve.delta,
        "S": curve.S,
        "w_grid": list(curve.w_grid),
        "n_min": list(curve.n_min),
    }


def figure1_to_json(curves: Figure1Curves) -> str:
    """Render the three curves as JSON; unreachable entries become null."""
    return json.dumps({"curves": [_curve_to_dict(c) for c in curves]}, indent=2) + "\n"


def figure1_from_json(text: str) -> Figure1Curves:
    """Inverse of figure1_to_json; round trips are byte-identical."""
    payload = json.loads(text)
    curves = []
    for entry in payload["curves"]:
        curves.append(SampleComplexityCurve(
            entry["method"], entry["eps_prime"], entry["delta"], entry["S"],
            tuple(entry["w_grid"]), tuple(entry["n_min"]),
        ))
    return Figure1Curves(*curves)
