"""Dense density-matrix engine for one round of pair distillation.

Everything here is plain complex128 NumPy on 4x4 (one pair) and 16x16
(two pairs) matrices.  Clarity beats speed: this module is the slow,
trusted reference that the closed-form layers are checked against.

Conventions
-----------
* A pair state lives in the computational basis |q_A q_B> with Alice's
  qubit first; index = 2*q_A + q_B (big-endian, |00> is index 0).
* ``tensor(control_pair, target_pair)`` orders the four qubits
  (A-control, B-control, A-target, B-target); global index =
  8*q_Ac + 4*q_Bc + 2*q_At + q_Bt.  The control pair is the one kept
  after the round, the target pair is the one measured out.
* |0> carries Z eigenvalue +1, so outcome "00" means both parties saw +1.
* Validation tolerances: Hermiticity and trace within 1e-12, smallest
  eigenvalue no lower than -1e-10.  A measurement branch with probability
  below 1e-15 has no defined post-measurement state (stored as None).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

HERMITICITY_ATOL = 1e-12
TRACE_ATOL = 1e-12
PSD_EIGENVALUE_FLOOR = -1e-10
UNDEFINED_BRANCH_PROB = 1e-15

#: Target-pair measurement outcomes, in index order (A result, B result).
OUTCOME_LABELS = ("00", "01", "10", "11")


def _check_unit_interval(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {value}")
    return value


def bell_phi_plus() -> np.ndarray:
    """Projector onto the maximally entangled pair (|00> + |11>)/sqrt(2).

    Built from exact 1/2 entries rather than an outer product, so the
    reference matrix carries no rounding at all.
    """
    rho = np.zeros((4, 4), dtype=np.complex128)
    rho[np.ix_((0, 3), (0, 3))] = 0.5
    return rho


def werner_state(w: float) -> np.ndarray:
    """Isotropic mixture (1 - w) * phi_plus + w/4 * identity, w in [0, 1]."""
    w = _check_unit_interval("w", w)
    return (1.0 - w) * bell_phi_plus() + (w / 4.0) * np.eye(4, dtype=np.complex128)


def depolarize(rho: np.ndarray, x: float) -> np.ndarray:
    """Apply the depolarizing channel (1 - x) * rho + x/4 * identity to a pair."""
    rho = _as_square(rho, 4)
    x = _check_unit_interval("x", x)
    return (1.0 - x) * rho + (x / 4.0) * np.eye(4, dtype=np.complex128)


def depolarizing_from_idle(t: float, T: float) -> float:
    """Depolarizing weight x = 1 - exp(-t/T) accumulated while idling for time t."""
    t = float(t)
    T = float(T)
    if t < 0.0:
        raise ValueError(f"idle time must be nonnegative, got {t}")
    if T <= 0.0:
        raise ValueError(f"memory time constant must be positive, got {T}")
    return 1.0 - math.exp(-t / T)


def tensor(control_pair: np.ndarray, target_pair: np.ndarray) -> np.ndarray:
    """Join two pair states into one 16x16 state.

    The first argument is the pair kept after the round (CNOT controls),
    the second is the pair that will be measured (CNOT targets).  Qubit
    order of the result is (A-control, B-control, A-target, B-target).
    """
    a = _as_square(control_pair, 4)
    b = _as_square(target_pair, 4)
    return np.kron(a, b)


def _cnot_unitary(control: int, target: int) -> np.ndarray:
    # Permutation on 4-qubit basis indices; qubit k is bit (3 - k) of the index.
    u = np.zeros((16, 16), dtype=np.complex128)
    for z in range(16):
        if (z >> (3 - control)) & 1:
            u[z ^ (1 << (3 - target)), z] = 1.0
        else:
            u[z, z] = 1.0
    return u


# Alice: control qubit 0 -> target qubit 2.  Bob: control qubit 1 -> target qubit 3.
_BILATERAL_CNOT = _cnot_unitary(0, 2) @ _cnot_unitary(1, 3)


def bilateral_cnot(rho: np.ndarray) -> np.ndarray:
    """Both parties apply CNOT from their control-pair qubit onto their target-pair qubit."""
    rho = _as_square(rho, 16)
    return _BILATERAL_CNOT @ rho @ _BILATERAL_CNOT.conj().T


@dataclass(frozen=True)
class ZZMeasurement:
    """Z-basis measurement statistics of the target pair.

    Attributes
    ----------
    p00, p01, p10, p11:
        Outcome probabilities, labelled (A result, B result) with "0"
        meaning Z eigenvalue +1.
    post_states:
        Normalized 4x4 control-pair states conditioned on each outcome,
        in OUTCOME_LABELS order; None where the branch probability is
        below UNDEFINED_BRANCH_PROB.
    """

    p00: float
    p01: float
    p10: float
    p11: float
    post_states: tuple[np.ndarray | None, np.ndarray | None, np.ndarray | None, np.ndarray | None]

    def probabilities(self) -> tuple[float, float, float, float]:
        return (self.p00, self.p01, self.p10, self.p11)

    def post_state(self, outcome: str) -> np.ndarray | None:
        return self.post_states[OUTCOME_LABELS.index(outcome)]


def measure_target_zz(rho: np.ndarray) -> ZZMeasurement:
    """Measure both target qubits in the Z basis and trace them out.

    Returns the four outcome probabilities and, for every branch with
    probability at least UNDEFINED_BRANCH_PROB, the normalized
    post-measurement state of the control pair.
    """
    rho = _as_square(rho, 16)
    probs = []
    states: list[np.ndarray | None] = []
    for t in range(4):
        idx = 4 * np.arange(4) + t
        block = rho[np.ix_(idx, idx)]
        p = float(np.real(np.trace(block)))
        probs.append(p)
        states.append(block / p if p >= UNDEFINED_BRANCH_PROB else None)
    return ZZMeasurement(probs[0], probs[1], probs[2], probs[3], tuple(states))


def distillation_round_dense(control_pair: np.ndarray, target_pair: np.ndarray) -> ZZMeasurement:
    """Full dense round: join the pairs, apply the bilateral CNOT, measure the targets."""
    return measure_target_zz(bilateral_cnot(tensor(control_pair, target_pair)))


def post_selected_success_state(meas: ZZMeasurement) -> np.ndarray:
    """Control-pair state conditioned on a correlated outcome ("00" or "11")."""
    p_success = meas.p00 + meas.p11
    if p_success < UNDEFINED_BRANCH_PROB:
        raise ValueError("success probability too small to condition on")
    total = np.zeros((4, 4), dtype=np.complex128)
    for p, state in ((meas.p00, meas.post_states[0]), (meas.p11, meas.post_states[3])):
        if state is not None:
            total += p * state
    return total / p_success


def phi_plus_fidelity(rho: np.ndarray) -> float:
    """Overlap <phi_plus| rho |phi_plus> of a pair state with the perfect pair."""
    rho = _as_square(rho, 4)
    return float(np.real(rho[0, 0] + rho[0, 3] + rho[3, 0] + rho[3, 3]) / 2.0)


def validate_density_matrix(rho: np.ndarray, dim: int | None = None) -> None:
    """Raise ValueError unless rho is a Hermitian, unit-trace, PSD matrix.

    Hermiticity and trace are enforced to 1e-12; the smallest eigenvalue
    may dip to -1e-10 to absorb floating-point noise.
    """
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    if dim is not None and rho.shape[0] != dim:
        raise ValueError(f"expected a {dim}x{dim} matrix, got shape {rho.shape}")
    herm_defect = float(np.max(np.abs(rho - rho.conj().T)))
    if herm_defect > HERMITICITY_ATOL:
        raise ValueError(f"matrix is not Hermitian: max |rho - rho^dag| = {herm_defect:.3e}")
    trace_defect = abs(complex(np.trace(rho)) - 1.0)
    if trace_defect > TRACE_ATOL:
        raise ValueError(f"matrix does not have unit trace: |tr(rho) - 1| = {trace_defect:.3e}")
    min_eig = float(np.min(np.linalg.eigvalsh(rho)))
    if min_eig < PSD_EIGENVALUE_FLOOR:
        raise ValueError(f"matrix is not positive semidefinite: min eigenvalue = {min_eig:.3e}")


def _as_square(rho: np.ndarray, dim: int) -> np.ndarray:
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (dim, dim):
        raise ValueError(f"expected a {dim}x{dim} matrix, got shape {rho.shape}")
    return rho


def matrix_to_json(rho: np.ndarray) -> str:
    """Serialize a matrix as {"dim": n, "entries": row-major [re, im] pairs}."""
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    entries = [[[z.real, z.imag] for z in row] for row in rho.tolist()]
    return json.dumps({"dim": rho.shape[0], "entries": entries})


def matrix_from_json(text: str) -> np.ndarray:
    """Inverse of matrix_to_json; round trips are exact."""
    payload = json.loads(text)
    dim = payload["dim"]
    rho = np.empty((dim, dim), dtype=np.complex128)
    for i, row in enumerate(payload["entries"]):
        for j, (re, im) in enumerate(row):
            rho[i, j] = complex(re, im)
    return rho
