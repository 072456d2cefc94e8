"""Werner-weight estimation from one round of entanglement distillation.

Layers, bottom up: ``qcore`` (dense density-matrix reference engine),
``protocol`` (closed-form round statistics), ``tomography``
(direct-measurement baseline), ``bounds`` (Hoeffding failure bounds and
sample complexities), ``experiment`` (seeded Monte Carlo harness),
``cli`` (command-line front end), ``validate`` (cross-layer checks).
"""

from .bounds import (
    BoundSpec,
    BoundValue,
    Figure1Curves,
    SampleComplexityCurve,
    crossover_w,
    distill_failure_bound,
    figure1_curves,
    hoeffding_tail,
    min_samples,
    noisy_distill_failure_bound,
    tomo_failure_bound,
)
from .experiment import (
    ExperimentResult,
    NoiseSchedule,
    TrialOutcome,
    empirical_failure_rate,
    run_algorithm1,
    run_repetitions,
    sample_trial,
)
from .protocol import (
    NoisePairConfig,
    OutcomeDistribution,
    WernerEstimate,
    fidelity_after_distillation,
    fidelity_from_w,
    outcome_distribution,
    p00_from_w,
    success_probability,
    w_from_fidelity,
    w_from_p00,
)
from .qcore import (
    bell_phi_plus,
    bilateral_cnot,
    depolarize,
    depolarizing_from_idle,
    measure_target_zz,
    phi_plus_fidelity,
    tensor,
    werner_state,
)
from .tomography import (
    TomoOutcomeCounts,
    sample_tomo_outcomes,
    tomo_p00_from_w,
    tomo_w_from_p00,
)

__version__ = "0.1.0"
