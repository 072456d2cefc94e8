"""Direct-measurement baseline: estimate w from ZZ statistics of single pairs.

Measuring one isotropic pair in the Z basis gives p00 = p11 = (2 - w)/4
and p01 = p10 = w/4, so w = 2 - 4 p00.  The map is linear, which makes
the estimator's sensitivity |dw/dp00| = 4 independent of w; compare the
distillation route, whose sensitivity degrades as w grows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .protocol import OutcomeDistribution, WernerEstimate, _check_unit_interval

#: Physical window of the single-pair correlated probability.
TOMO_P00_MIN = 0.25
TOMO_P00_MAX = 0.5


def tomo_p00_from_w(w: float) -> float:
    """Single-pair probability of the "00" outcome, (2 - w)/4."""
    w = _check_unit_interval("w", w)
    return (2.0 - w) / 4.0


def tomo_w_from_p00(p00: float) -> WernerEstimate:
    """Invert p00 = (2 - w)/4 as w = 2 - 4 p00, clamping into [1/4, 1/2] first."""
    p00 = _check_unit_interval("p00", p00)
    clamped = min(max(p00, TOMO_P00_MIN), TOMO_P00_MAX)
    return WernerEstimate(2.0 - 4.0 * clamped, clamped != p00)


def tomo_outcome_distribution(w: float) -> OutcomeDistribution:
    """All four single-pair Z outcome probabilities at Werner weight w."""
    correlated = tomo_p00_from_w(w)
    anticorrelated = float(w) / 4.0
    return OutcomeDistribution(correlated, anticorrelated, anticorrelated, correlated)


@dataclass(frozen=True)
class TomoOutcomeCounts:
    """Observed outcome counts from n single-pair Z measurements."""

    n00: int
    n01: int
    n10: int
    n11: int

    @property
    def total(self) -> int:
        return self.n00 + self.n01 + self.n10 + self.n11

    @property
    def p00_hat(self) -> float:
        return self.n00 / self.total


def sample_tomo_outcomes(w: float, n: int, seed: int) -> TomoOutcomeCounts:
    """Draw n single-pair measurements at weight w; deterministic in seed."""
    if n < 1:
        raise ValueError(f"sample count must be at least 1, got {n}")
    dist = tomo_outcome_distribution(w)
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(n, dist.as_tuple())
    return TomoOutcomeCounts(*(int(c) for c in counts))
