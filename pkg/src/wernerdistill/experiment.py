"""Seeded Monte Carlo realization of the single-round estimation experiment.

One run draws N rounds at a true weight w (the kept copy of round i may
be depolarized by a schedule-supplied x_i), counts the rounds where both
parties report +1, and post-processes the count:

    p00_hat = n_count / N
    w_hat   = 1 - sqrt(4 p00_hat - 1)          (p00_hat clamped to [1/4, 1/2])
    w_p/w_m = w_hat +/- eps_w                  (clamped into [0, 1])
    eps     = max |p00_hat - p00(w_p/m)|       (worst-case p00 shift)
    delta   = min(1, 2 exp(-2 N eps^2))        (post-hoc Hoeffding certificate)

Note delta is computed from the realized eps, so it certifies the reported
interval only in the usual post-hoc sense; the a-priori guarantees live in
the bounds module.

Determinism contract: every run is a pure function of its inputs and
seed.  Repetition harnesses derive per-repetition seeds from the master
seed up front, so results are independent of worker count and execution
order, and byte-identical across reruns.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import qcore
from .protocol import NoisePairConfig, clamp_p00, outcome_distribution, p00_from_w

#: Z-eigenvalue pairs (A, B) for outcomes ("00", "01", "10", "11"); |0> is +1.
OUTCOME_SIGNS = ((1, 1), (1, -1), (-1, 1), (-1, -1))

RESULT_CSV_HEADER = "N,n_count,n00,n01,n10,n11,p00_hat,w_hat,eps,delta,realized_S,seed,clamped"
REPS_CSV_HEADER = "rep,seed,w_hat,fail"


class TrialOutcome(NamedTuple):
    """Z results of one round's target measurement, +1 or -1 per party."""

    za: int
    zb: int


@dataclass(frozen=True)
class NoiseSchedule:
    """Per-round depolarizing weight x_i applied to the kept copy.

    Two modes: "fixed-x" uses the same x every round; "exponential-idle"
    derives x_i = 1 - exp(-t_i / T) from idle times t_i (a scalar idle
    time is repeated every round, a sequence gives one time per round).
    """

    mode: str
    x: float = 0.0
    idle_time: float | tuple[float, ...] = 0.0
    memory_time: float = 1.0

    @classmethod
    def noiseless(cls) -> "NoiseSchedule":
        return cls.fixed(0.0)

    @classmethod
    def fixed(cls, x: float) -> "NoiseSchedule":
        if not 0.0 <= x <= 1.0:
            raise ValueError(f"x must be in [0, 1], got {x}")
        return cls(mode="fixed-x", x=float(x))

    @classmethod
    def exponential_idle(cls, idle_time: float | Sequence[float], memory_time: float) -> "NoiseSchedule":
        if memory_time <= 0.0:
            raise ValueError(f"memory time constant must be positive, got {memory_time}")
        if np.isscalar(idle_time):
            times: float | tuple[float, ...] = float(idle_time)
            if times < 0.0:
                raise ValueError(f"idle time must be nonnegative, got {times}")
        else:
            times = tuple(float(t) for t in idle_time)
            if any(t < 0.0 for t in times):
                raise ValueError("idle times must be nonnegative")
        return cls(mode="exponential-idle", idle_time=times, memory_time=float(memory_time))

    def x_values(self, n: int) -> np.ndarray:
        """Depolarizing weights for rounds 0..n-1."""
        if self.mode == "fixed-x":
            return np.full(n, self.x)
        if self.mode == "exponential-idle":
            if isinstance(self.idle_time, tuple):
                if len(self.idle_time) != n:
                    raise ValueError(
                        f"schedule supplies {len(self.idle_time)} idle times for {n} rounds"
                    )
                times = np.asarray(self.idle_time)
            else:
                times = np.full(n, self.idle_time)
            return 1.0 - np.exp(-times / self.memory_time)
        raise ValueError(f"unknown schedule mode {self.mode!r}")


@dataclass(frozen=True)
class Algorithm1Estimate:
    """Every intermediate of the post-processing chain, for transcript checks."""

    n_count: int
    N: int
    p00_hat: float
    w_hat: float
    w_p: float
    w_m: float
    p00_p: float
    p00_m: float
    eps: float
    delta: float
    clamped: bool


@dataclass(frozen=True)
class ExperimentResult:
    """Outputs of one full run; counts are (n00, n01, n10, n11)."""

    N: int
    n_count: int
    counts: tuple[int, int, int, int]
    p00_hat: float
    w_hat: float
    eps: float
    delta: float
    realized_S: float
    seed: int
    clamped: bool

    def to_json(self) -> str:
        import json

        payload = {
            "N": self.N,
            "n_count": self.n_count,
            "counts": dict(zip(("00", "01", "10", "11"), self.counts)),
            "p00_hat": self.p00_hat,
            "w_hat": self.w_hat,
            "eps": self.eps,
            "delta": self.delta,
            "realized_S": self.realized_S,
            "seed": self.seed,
            "clamped": self.clamped,
        }
        return json.dumps(payload, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ExperimentResult":
        import json

        payload = json.loads(text)
        counts = tuple(payload["counts"][k] for k in ("00", "01", "10", "11"))
        return cls(
            payload["N"], payload["n_count"], counts, payload["p00_hat"], payload["w_hat"],
            payload["eps"], payload["delta"], payload["realized_S"], payload["seed"],
            payload["clamped"],
        )

    def to_csv(self) -> str:
        cells = (
            str(self.N), str(self.n_count), *(str(c) for c in self.counts),
            repr(self.p00_hat), repr(self.w_hat), repr(self.eps), repr(self.delta),
            repr(self.realized_S), str(self.seed), "true" if self.clamped else "false",
        )
        return RESULT_CSV_HEADER + "\n" + ",".join(cells) + "\n"


def _index_from_uniform(u: float, probs: tuple[float, float, float, float]) -> int:
    edge = 0.0
    for k in range(3):
        edge += probs[k]
        if u < edge:
            return k
    return 3


def sample_trial(cfg: NoisePairConfig, rng: np.random.Generator) -> TrialOutcome:
    """Draw one round's target-measurement outcome from its exact distribution."""
    dist = outcome_distribution(cfg)
    idx = _index_from_uniform(rng.random(), dist.as_tuple())
    return TrialOutcome(*OUTCOME_SIGNS[idx])


def _dense_distribution(w: float, x: float) -> tuple[float, float, float, float]:
    kept = qcore.depolarize(qcore.werner_state(w), x)
    meas = qcore.distillation_round_dense(kept, qcore.werner_state(w))
    return meas.probabilities()


def _sample_counts(w: float, xs: np.ndarray, rng: np.random.Generator,
                   use_dense_oracle: bool) -> np.ndarray:
    """Outcome counts for len(xs) rounds; one uniform draw per round."""
    u = rng.random(len(xs))
    if use_dense_oracle:
        by_x = {float(x): _dense_distribution(w, float(x)) for x in np.unique(xs)}
        probs = np.array([by_x[float(x)] for x in xs])
    else:
        survival = (1.0 - xs) * (1.0 - w) * (1.0 - w)
        correlated = (1.0 + survival) / 4.0
        anticorrelated = (1.0 - survival) / 4.0
        probs = np.stack([correlated, anticorrelated, anticorrelated, correlated], axis=1)
    edges = np.cumsum(probs, axis=1)
    outcomes = np.minimum((u[:, None] >= edges).sum(axis=1), 3)
    return np.bincount(outcomes, minlength=4)


def estimate_from_counts(n_count: int, N: int, eps_w: float) -> Algorithm1Estimate:
    """Post-process a correlated-outcome count into (w_hat, eps, delta).

    Follows the chain documented in the module docstring; the raw
    p00_hat = n_count/N is reported unclamped, clamping feeds only the
    inversion and the shifted weights.
    """
    if N < 1:
        raise ValueError(f"round count must be at least 1, got {N}")
    if not 0 <= n_count <= N:
        raise ValueError(f"n_count must be in [0, {N}], got {n_count}")
    eps_w = float(eps_w)
    if eps_w <= 0.0:
        raise ValueError(f"precision target must be positive, got {eps_w}")
    p00_hat = n_count / N
    p_clamped, clamped_p = clamp_p00(p00_hat)
    w_hat = 1.0 - math.sqrt(4.0 * p_clamped - 1.0)
    w_p_raw = w_hat + eps_w
    w_m_raw = w_hat - eps_w
    w_p = min(1.0, w_p_raw)
    w_m = max(0.0, w_m_raw)
    clamped_w = w_p != w_p_raw or w_m != w_m_raw
    p00_p = p00_from_w(w_p)
    p00_m = p00_from_w(w_m)
    eps = max(abs(p00_hat - p00_p), abs(p00_hat - p00_m))
    delta = min(1.0, 2.0 * math.exp(-2.0 * N * eps * eps))
    return Algorithm1Estimate(n_count, N, p00_hat, w_hat, w_p, w_m, p00_p, p00_m,
                              eps, delta, clamped_p or clamped_w)


def replay_algorithm1(outcomes: Iterable[TrialOutcome], eps_w: float) -> Algorithm1Estimate:
    """Run the post-processing chain on a fixed outcome transcript."""
    outcomes = list(outcomes)
    n_count = sum(1 for o in outcomes if o.za == 1 and o.zb == 1)
    return estimate_from_counts(n_count, len(outcomes), eps_w)


def run_algorithm1(N: int, eps_w: float, w: float, schedule: NoiseSchedule | None = None,
                   seed: int = 0, use_dense_oracle: bool = False) -> ExperimentResult:
    """Sample N rounds at true weight w and post-process the count.

    The schedule defaults to noiseless.  With ``use_dense_oracle`` the
    per-round distributions come from the dense engine instead of the
    closed form (slow; for verification).
    """
    if N < 1:
        raise ValueError(f"round count must be at least 1, got {N}")
    if schedule is None:
        schedule = NoiseSchedule.noiseless()
    cfg = NoisePairConfig(w)  # validates w before any sampling
    xs = schedule.x_values(N)
    rng = np.random.default_rng(seed)
    counts = _sample_counts(cfg.w, xs, rng, use_dense_oracle)
    est = estimate_from_counts(int(counts[0]), N, eps_w)
    realized_S = float(np.mean(1.0 - xs))
    return ExperimentResult(
        N=N, n_count=est.n_count, counts=tuple(int(c) for c in counts),
        p00_hat=est.p00_hat, w_hat=est.w_hat, eps=est.eps, delta=est.delta,
        realized_S=realized_S, seed=int(seed), clamped=est.clamped,
    )


def derive_rep_seeds(master_seed: int, reps: int) -> np.ndarray:
    """Deterministic per-repetition seeds: 64-bit words expanded from the master seed."""
    if reps < 1:
        raise ValueError(f"repetition count must be at least 1, got {reps}")
    return np.random.SeedSequence(master_seed).generate_state(reps, dtype=np.uint64)


@dataclass(frozen=True)
class RepetitionRecord:
    """One repetition's identity and verdict; fail means |w_hat - w| >= eps_w."""

    rep: int
    seed: int
    w_hat: float
    fail: bool


@dataclass(frozen=True)
class RepetitionSummary:
    """All repetitions of one configuration, plus the shared parameters."""

    true_w: float
    eps_w: float
    N: int
    reps: int
    master_seed: int
    realized_S: float
    records: tuple[RepetitionRecord, ...]

    @property
    def failure_count(self) -> int:
        return sum(1 for r in self.records if r.fail)

    @property
    def failure_rate(self) -> float:
        return self.failure_count / self.reps


def run_repetitions(true_w: float, N: int, eps_w: float, schedule: NoiseSchedule | None = None,
                    reps: int = 1, master_seed: int = 0, workers: int = 1,
                    use_dense_oracle: bool = False) -> RepetitionSummary:
    """Repeat the experiment; deterministic in master_seed, worker count aside.

    Per-repetition seeds are derived up front and results are assembled
    in repetition order, so workers > 1 only changes wall time.
    """
    seeds = derive_rep_seeds(master_seed, reps)

    def one(rep: int) -> tuple[RepetitionRecord, float]:
        seed = int(seeds[rep])
        result = run_algorithm1(N, eps_w, true_w, schedule, seed, use_dense_oracle)
        fail = abs(result.w_hat - true_w) >= eps_w
        return RepetitionRecord(rep, seed, result.w_hat, fail), result.realized_S

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(one, range(reps)))
    else:
        outputs = [one(rep) for rep in range(reps)]
    records = tuple(record for record, _ in outputs)
    return RepetitionSummary(float(true_w), float(eps_w), N, reps, int(master_seed),
                             outputs[0][1], records)


def empirical_failure_rate(true_w: float, N: int, eps_w: float,
                           schedule: NoiseSchedule | None = None, reps: int = 1,
                           master_seed: int = 0, workers: int = 1) -> float:
    """Fraction of repetitions whose estimate missed by at least eps_w."""
    return run_repetitions(true_w, N, eps_w, schedule, reps, master_seed, workers).failure_rate


def repetitions_to_csv(summary: RepetitionSummary) -> str:
    """Per-repetition table: rep,seed,w_hat,fail (fail as 0/1)."""
    lines = [REPS_CSV_HEADER]
    for r in summary.records:
        lines.append(f"{r.rep},{r.seed},{r.w_hat!r},{int(r.fail)}")
    return "\n".join(lines) + "\n"
