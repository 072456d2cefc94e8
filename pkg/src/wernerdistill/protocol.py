"""Closed-form statistics of one distillation round on isotropic pairs.

The round takes two pairs with the same Werner weight w, optionally lets
the first (kept) pair depolarize by x while it waits, applies the
bilateral CNOT, and measures the second pair in the Z basis.  All
probabilities here are exact functions of (w, x); qcore reproduces them
from dense linear algebra.

Key facts used throughout:

* correlated-outcome probability p00 = (2 - 2w + w^2) / 4 when x = 0,
  and more generally p00 = (1 + (1 - x)(1 - w)^2) / 4;
* p00 decreases strictly in w, from 1/2 (perfect pairs) to 1/4 (fully
  mixed), so w = 1 - sqrt(4 p00 - 1) inverts it;
* pair fidelity F = 1 - 3w/4, and a successful round maps F to
  (F^2 + (1-F)^2/9) / (F^2 + 2F(1-F)/3 + 5(1-F)^2/9).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

#: Range of the correlated-outcome probability over physical w.
P00_MIN = 0.25
P00_MAX = 0.5

#: Range of the pair fidelity over physical w.
FIDELITY_MIN = 0.25
FIDELITY_MAX = 1.0


def _check_unit_interval(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {value}")
    return value


@dataclass(frozen=True)
class NoisePairConfig:
    """One round's input: Werner weight w, and depolarizing weight x on the kept pair."""

    w: float
    x: float = 0.0

    def __post_init__(self) -> None:
        _check_unit_interval("w", self.w)
        _check_unit_interval("x", self.x)


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probabilities of the four target-pair Z outcomes ("00", "01", "10", "11")."""

    p00: float
    p01: float
    p10: float
    p11: float

    def __post_init__(self) -> None:
        total = self.p00 + self.p01 + self.p10 + self.p11
        for name, p in self.items():
            if not -1e-12 <= p <= 1.0 + 1e-12:
                raise ValueError(f"{name} = {p} is not a probability")
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"outcome probabilities sum to {total}, not 1")

    def items(self) -> tuple[tuple[str, float], ...]:
        return (("p00", self.p00), ("p01", self.p01), ("p10", self.p10), ("p11", self.p11))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.p00, self.p01, self.p10, self.p11)


class WernerEstimate(NamedTuple):
    """Inverted Werner weight plus a flag marking that the input was clamped first."""

    w: float
    clamped: bool


def p00_from_w(w: float) -> float:
    """Correlated-outcome probability (2 - 2w + w^2) / 4 for noise-free copies."""
    w = _check_unit_interval("w", w)
    return (2.0 - 2.0 * w + w * w) / 4.0


def clamp_p00(p00: float) -> tuple[float, bool]:
    """Clamp an empirical p00 into the physical window [1/4, 1/2].

    Values outside [0, 1] are rejected as domain errors; values inside
    [0, 1] but outside the window (possible for finite samples) are moved
    to the nearest edge and flagged.
    """
    p00 = _check_unit_interval("p00", p00)
    clamped = min(max(p00, P00_MIN), P00_MAX)
    return clamped, clamped != p00


def w_from_p00(p00: float) -> WernerEstimate:
    """Invert p00 = (2 - 2w + w^2)/4 as w = 1 - sqrt(4 p00 - 1), clamping first."""
    p, clamped = clamp_p00(p00)
    return WernerEstimate(1.0 - math.sqrt(4.0 * p - 1.0), clamped)


def outcome_distribution(cfg: NoisePairConfig) -> OutcomeDistribution:
    """Exact outcome probabilities for one round at (w, x).

    The depolarized kept pair retains coherent weight (1 - x)(1 - w), the
    fresh pair (1 - w); correlated outcomes carry probability
    (1 + (1 - x)(1 - w)^2) / 4 each, anticorrelated the complement.
    """
    survival = (1.0 - cfg.x) * (1.0 - cfg.w) * (1.0 - cfg.w)
    correlated = (1.0 + survival) / 4.0
    anticorrelated = (1.0 - survival) / 4.0
    return OutcomeDistribution(correlated, anticorrelated, anticorrelated, correlated)


def success_probability(cfg: NoisePairConfig) -> float:
    """Probability of keeping the round: both parties see the same outcome."""
    dist = outcome_distribution(cfg)
    return dist.p00 + dist.p11


def fidelity_from_w(w: float) -> float:
    """Pair fidelity F = 1 - 3w/4 of an isotropic state."""
    w = _check_unit_interval("w", w)
    return 1.0 - 0.75 * w


def w_from_fidelity(fidelity: float) -> float:
    """Werner weight w = 4(1 - F)/3 of a pair with fidelity F in [1/4, 1]."""
    fidelity = float(fidelity)
    if not FIDELITY_MIN <= fidelity <= FIDELITY_MAX:
        raise ValueError(f"fidelity must be in [1/4, 1], got {fidelity}")
    return 4.0 * (1.0 - fidelity) / 3.0


def fidelity_after_distillation(fidelity: float) -> float:
    """Fidelity of the kept pair after a successful noise-free round.

    Fixed points sit at F = 1/2 and F = 1; the round improves fidelity
    exactly on (1/2, 1).
    """
    f = float(fidelity)
    if not FIDELITY_MIN <= f <= FIDELITY_MAX:
        raise ValueError(f"fidelity must be in [1/4, 1], got {f}")
    numerator = f * f + (1.0 - f) ** 2 / 9.0
    denominator = f * f + 2.0 * f * (1.0 - f) / 3.0 + 5.0 * (1.0 - f) ** 2 / 9.0
    return numerator / denominator
