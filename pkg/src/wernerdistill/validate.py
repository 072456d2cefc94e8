"""Cross-module consistency checks behind the `validate` CLI command.

Each check compares two independently computed quantities (closed form
vs dense engine, forward vs inverse map, bound vs its integer inversion)
over a grid and reports the worst deviation.  A perturbation can be
injected into any single named check to prove the harness actually
detects disagreement; the grid step changes runtime, not verdicts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import bounds, protocol, qcore, tomography

EQUIV_TOL = 1e-12


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _grid(step: float, lo: float = 0.0, hi: float = 1.0) -> list[float]:
    return [round(lo + i * step, 12) for i in range(int((hi - lo) / step + 1e-9) + 1)]


def _deviation_result(name: str, deviation: float, tol: float, where: str) -> CheckResult:
    detail = f"max deviation {deviation:.3e} (tol {tol:.0e}) {where}"
    return CheckResult(name, deviation <= tol, detail)


def check_dense_outcomes(step: float, bump: float) -> CheckResult:
    worst, where = 0.0, ""
    for w in _grid(step):
        for x in _grid(max(step, 0.25)):
            kept = qcore.depolarize(qcore.werner_state(w), x)
            dense = qcore.distillation_round_dense(kept, qcore.werner_state(w)).probabilities()
            closed = protocol.outcome_distribution(protocol.NoisePairConfig(w, x)).as_tuple()
            dev = max(abs(a - b + bump) for a, b in zip(closed, dense))
            if dev > worst:
                worst, where = dev, f"at (w={w}, x={x})"
    return _deviation_result("dense-oracle-outcomes", worst, EQUIV_TOL, where)


def check_depolarize_closure(step: float, bump: float) -> CheckResult:
    worst, where = 0.0, ""
    for w in _grid(step):
        for x in _grid(max(step, 0.25)):
            composed = 1.0 - (1.0 - x) * (1.0 - w)
            dev = float(np.max(np.abs(
                qcore.depolarize(qcore.werner_state(w), x) - qcore.werner_state(composed)
            ))) + bump
            if dev > worst:
                worst, where = dev, f"at (w={w}, x={x})"
    return _deviation_result("depolarize-werner-closure", worst, EQUIV_TOL, where)


def check_distill_roundtrip(step: float, bump: float) -> CheckResult:
    worst, where = 0.0, ""
    for w in _grid(step):
        dev = abs(protocol.w_from_p00(protocol.p00_from_w(w)).w - w + bump)
        if dev > worst:
            worst, where = dev, f"at w={w}"
    return _deviation_result("distill-roundtrip", worst, EQUIV_TOL, where)


def check_tomo_roundtrip(step: float, bump: float) -> CheckResult:
    worst, where = 0.0, ""
    for w in _grid(step):
        dev = abs(tomography.tomo_w_from_p00(tomography.tomo_p00_from_w(w)).w - w + bump)
        if dev > worst:
            worst, where = dev, f"at w={w}"
    return _deviation_result("tomo-roundtrip", worst, EQUIV_TOL, where)


def check_fidelity_roundtrip(step: float, bump: float) -> CheckResult:
    worst, where = 0.0, ""
    for w in _grid(step):
        dev = abs(protocol.w_from_fidelity(protocol.fidelity_from_w(w)) - w + bump)
        if dev > worst:
            worst, where = dev, f"at w={w}"
    return _deviation_result("fidelity-roundtrip", worst, EQUIV_TOL, where)


def check_p00_monotonicity(step: float, bump: float) -> CheckResult:
    fine = min(step, 1e-3)
    ws = _grid(fine)
    ps = [protocol.p00_from_w(w) + (bump if i % 2 else 0.0) for i, w in enumerate(ws)]
    worst_gap = max(ps[i + 1] - ps[i] for i in range(len(ps) - 1))
    detail = f"max forward difference {worst_gap:.3e} over {len(ws)} points (must be < 0)"
    return CheckResult("p00-strictly-decreasing", worst_gap < 0.0, detail)


def check_fidelity_recursion_dense(step: float, bump: float) -> CheckResult:
    worst, where = 0.0, ""
    for w in _grid(step):
        pair = qcore.werner_state(w)
        meas = qcore.distillation_round_dense(pair, pair)
        dense_f = qcore.phi_plus_fidelity(qcore.post_selected_success_state(meas))
        formula_f = protocol.fidelity_after_distillation(protocol.fidelity_from_w(w))
        dev = abs(dense_f - formula_f + bump)
        if dev > worst:
            worst, where = dev, f"at w={w}"
    return _deviation_result("fidelity-recursion-dense", worst, EQUIV_TOL, where)


def check_fidelity_gain_regions(step: float, bump: float) -> CheckResult:
    margin = math.inf
    for f in np.arange(0.5 + step, 1.0, step):
        margin = min(margin, protocol.fidelity_after_distillation(float(f)) - float(f))
    for f in np.arange(0.25 + step, 0.5, step):
        margin = min(margin, float(f) - protocol.fidelity_after_distillation(float(f)))
    fixed_dev = max(abs(protocol.fidelity_after_distillation(0.5) - 0.5),
                    abs(protocol.fidelity_after_distillation(1.0) - 1.0)) + bump
    ok = margin > 0.0 and fixed_dev <= EQUIV_TOL
    detail = f"min gain/loss margin {margin:.3e}, fixed-point deviation {fixed_dev:.3e}"
    return CheckResult("fidelity-gain-regions", ok, detail)


def check_werner_symmetry(step: float, bump: float) -> CheckResult:
    worst, where = 0.0, ""
    for w in _grid(step):
        for x in _grid(max(step, 0.25)):
            kept = qcore.depolarize(qcore.werner_state(w), x)
            m = qcore.distillation_round_dense(kept, qcore.werner_state(w))
            d = protocol.outcome_distribution(protocol.NoisePairConfig(w, x))
            dev = max(abs(m.p00 - m.p11), abs(m.p01 - m.p10),
                      abs(d.p00 - d.p11), abs(d.p01 - d.p10)) + bump
            if dev > worst:
                worst, where = dev, f"at (w={w}, x={x})"
    return _deviation_result("werner-outcome-symmetry", worst, EQUIV_TOL, where)


def check_bound_thresholds(step: float, bump: float) -> CheckResult:
    violations = 0
    total = 0
    for method in bounds.METHODS:
        for eps in (0.05, 0.1, 0.2):
            for delta in (0.01, 0.05):
                for w in (0.0, 0.25, 0.45):
                    S = bounds.DEFAULT_NOISY_S if method == bounds.METHOD_NOISY else 1.0
                    n = bounds.min_samples(method, eps, delta, w, S)
                    total += 1
                    if n is None:
                        continue
                    at = bounds.failure_bound(method, n, eps, w, S).value + bump
                    below = (bounds.failure_bound(method, n - 1, eps, w, S).value
                             if n > 1 else math.inf)
                    if not (at <= delta < below):
                        violations += 1
    detail = f"{violations} threshold violations over {total} parameter combinations"
    return CheckResult("min-samples-threshold", violations == 0, detail)


def check_noisy_reduction(step: float, bump: float) -> CheckResult:
    worst, where = 0.0, ""
    for w in _grid(step, 0.0, 0.8):
        for n in (10, 1000, 100000):
            spec = bounds.BoundSpec(n, 0.1, w, 1.0)
            dev = abs(bounds.noisy_distill_failure_bound(spec).value
                      - bounds.distill_failure_bound(spec).value) + bump
            if dev > worst:
                worst, where = dev, f"at (w={w}, n={n})"
    detail = f"max |S=1 noisy - noise-free| = {worst:.3e} (must be exactly 0) {where}"
    return CheckResult("noisy-bound-reduction", worst == 0.0, detail)


def _bisect_crossover(eps: float) -> float:
    # root of sensitivity_margin(eps, w) = eps, the w where both exponents meet
    lo, hi = 0.0, 1.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if bounds.sensitivity_margin(eps, mid) - eps > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def check_crossover_ordering(step: float, bump: float) -> CheckResult:
    ok = True
    worst = 0.0
    notes = []
    for eps in (0.05, 0.1, 0.2):
        cross = bounds.crossover_w(eps) + bump
        worst = max(worst, abs(cross - _bisect_crossover(eps)))
        n_tomo = bounds.min_samples(bounds.METHOD_TOMO, eps, 0.01)
        below = bounds.min_samples(bounds.METHOD_DISTILL, eps, 0.01, w=cross - 0.05)
        above = bounds.min_samples(bounds.METHOD_DISTILL, eps, 0.01, w=cross + 0.05)
        at = bounds.min_samples(bounds.METHOD_DISTILL, eps, 0.01, w=cross)
        ok = ok and below < n_tomo < above and abs(at - n_tomo) <= 1
        notes.append(f"eps'={eps}: {below}<{n_tomo}<{above}, at crossover {at}")
    ok = ok and worst <= EQUIV_TOL
    notes.append(f"analytic vs bisected crossover deviation {worst:.3e}")
    return CheckResult("crossover-ordering", ok, "; ".join(notes))


CHECKS: tuple[tuple[str, Callable[[float, float], CheckResult]], ...] = (
    ("dense-oracle-outcomes", check_dense_outcomes),
    ("depolarize-werner-closure", check_depolarize_closure),
    ("distill-roundtrip", check_distill_roundtrip),
    ("tomo-roundtrip", check_tomo_roundtrip),
    ("fidelity-roundtrip", check_fidelity_roundtrip),
    ("p00-strictly-decreasing", check_p00_monotonicity),
    ("fidelity-recursion-dense", check_fidelity_recursion_dense),
    ("fidelity-gain-regions", check_fidelity_gain_regions),
    ("werner-outcome-symmetry", check_werner_symmetry),
    ("min-samples-threshold", check_bound_thresholds),
    ("noisy-bound-reduction", check_noisy_reduction),
    ("crossover-ordering", check_crossover_ordering),
)

CHECK_NAMES = tuple(name for name, _ in CHECKS)


def run_all_checks(grid_step: float = 0.05, perturb: str | None = None) -> list[CheckResult]:
    """Run every check; `perturb` injects 1e-6 into the named check's comparison."""
    if not 0.0 < grid_step <= 0.5:
        raise ValueError(f"grid step must be in (0, 0.5], got {grid_step}")
    if perturb is not None and perturb not in CHECK_NAMES:
        raise ValueError(f"unknown check {perturb!r}, expected one of {CHECK_NAMES}")
    results = []
    for name, fn in CHECKS:
        bump = 1e-6 if name == perturb else 0.0
        results.append(fn(grid_step, bump))
    return results
