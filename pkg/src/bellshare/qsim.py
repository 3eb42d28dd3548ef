"""Dense statevector engine with Bell-basis projective measurement.

Conventions used throughout the package:

- Qubits carry 1-based labels. Label 1 maps to the *most significant bit*
  of the basis-state index, so a register reshaped to ``[2] * n`` has
  qubit ``q`` on axis ``q - 1``.
- States are immutable; every operation returns a fresh ``StateVector``.
- Randomness enters only through explicitly passed ``numpy.random.Generator``
  streams, never through module state.
- Measured qubits stay in the register: a Bell projection leaves the pair
  in the observed Bell state rather than removing it, so later
  measurements on other pairs reuse the same register.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

import numpy as np

MAX_QUBITS = 14

# Norm / Hermiticity checks tolerate rounding only; probabilities below
# ZERO_PROBABILITY are treated as exactly zero.
NORM_ATOL = 1e-10
UNITARY_ATOL = 1e-12
ZERO_PROBABILITY = 1e-12

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


class ZeroProbabilityOutcome(Exception):
    """Raised when projecting onto an outcome of (numerically) zero weight."""


class BellLabel(Enum):
    """The four Bell states; the protocol's measurement-outcome alphabet.

    ``alpha±`` are the parity-even states (|00> ± |11>)/sqrt(2) and
    ``beta±`` the parity-odd ones (|01> ± |10>)/sqrt(2).
    """

    ALPHA_PLUS = "alpha+"
    ALPHA_MINUS = "alpha-"
    BETA_PLUS = "beta+"
    BETA_MINUS = "beta-"

    def __str__(self) -> str:
        return self.value

    @property
    def vector(self) -> np.ndarray:
        """Amplitudes over |00>, |01>, |10>, |11> of the defining state."""
        return _BELL_VECTORS[self].copy()

    @property
    def tensor(self) -> np.ndarray:
        """Defining state reshaped to (2, 2), indexed [first bit, second bit]."""
        return _BELL_VECTORS[self].reshape(2, 2).copy()


_BELL_VECTORS = {
    BellLabel.ALPHA_PLUS: np.array([1, 0, 0, 1], dtype=complex) * _INV_SQRT2,
    BellLabel.ALPHA_MINUS: np.array([1, 0, 0, -1], dtype=complex) * _INV_SQRT2,
    BellLabel.BETA_PLUS: np.array([0, 1, 1, 0], dtype=complex) * _INV_SQRT2,
    BellLabel.BETA_MINUS: np.array([0, 1, -1, 0], dtype=complex) * _INV_SQRT2,
}

BELL_LABELS = tuple(BellLabel)


class GateKind(str, Enum):
    IDENTITY = "I"
    PAULI_X = "X"
    PAULI_IY = "iY"
    PAULI_Z = "Z"
    HADAMARD = "H"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Gate1Q:
    """A named single-qubit gate with its 2x2 unitary matrix."""

    kind: GateKind
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"gate matrix must be 2x2, got {m.shape}")
        if not np.allclose(m.conj().T @ m, np.eye(2), atol=UNITARY_ATOL):
            raise ValueError(f"gate matrix for {self.kind} is not unitary")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


# iY is real: i * [[0, -i], [i, 0]] = [[0, 1], [-1, 0]].
GATES: dict[GateKind, Gate1Q] = {
    GateKind.IDENTITY: Gate1Q(GateKind.IDENTITY, np.eye(2)),
    GateKind.PAULI_X: Gate1Q(GateKind.PAULI_X, np.array([[0, 1], [1, 0]])),
    GateKind.PAULI_IY: Gate1Q(GateKind.PAULI_IY, np.array([[0, 1], [-1, 0]])),
    GateKind.PAULI_Z: Gate1Q(GateKind.PAULI_Z, np.array([[1, 0], [0, -1]])),
    GateKind.HADAMARD: Gate1Q(GateKind.HADAMARD, np.array([[1, 1], [1, -1]]) * _INV_SQRT2),
}

PAULI_KINDS = (GateKind.IDENTITY, GateKind.PAULI_X, GateKind.PAULI_IY, GateKind.PAULI_Z)


@dataclass(frozen=True)
class StateVector:
    """Normalized complex amplitudes over ``2**num_qubits`` basis states."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise ValueError(f"num_qubits must be in 1..{MAX_QUBITS}, got {self.num_qubits}")
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2**self.num_qubits:
            raise ValueError(
                f"expected {2**self.num_qubits} amplitudes for {self.num_qubits} qubits, "
                f"got {amps.size}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(f"state norm {norm} deviates from 1 beyond {NORM_ATOL}")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def tensor_view(self) -> np.ndarray:
        """Read-only view shaped ``[2] * num_qubits`` (qubit q on axis q - 1)."""
        return self.amplitudes.reshape([2] * self.num_qubits)

    def _check_label(self, qubit: int) -> None:
        if not 1 <= qubit <= self.num_qubits:
            raise ValueError(f"qubit label {qubit} outside 1..{self.num_qubits}")


@dataclass(frozen=True)
class DensityMatrix:
    """A ``dim x dim`` density operator; see :func:`reduced_density`."""

    dim: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.entries, dtype=complex)
        if m.shape != (self.dim, self.dim):
            raise ValueError(f"entries must be {self.dim}x{self.dim}, got {m.shape}")
        if self.dim & (self.dim - 1):
            raise ValueError(f"dim must be a power of two, got {self.dim}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    def validate(self, atol: float = NORM_ATOL) -> None:
        """Check Hermiticity, unit trace, and positive semidefiniteness."""
        m = self.entries
        if not np.allclose(m, m.conj().T, atol=atol):
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > atol or abs(np.trace(m).imag) > atol:
            raise ValueError("density matrix trace deviates from 1")
        if np.linalg.eigvalsh(m).min() < -atol:
            raise ValueError("density matrix has a negative eigenvalue")


def zero_state(num_qubits: int) -> StateVector:
    """All qubits in |0>."""
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise ValueError(f"num_qubits must be in 1..{MAX_QUBITS}, got {num_qubits}")
    amps = np.zeros(2**num_qubits, dtype=complex)
    amps[0] = 1.0
    return StateVector(num_qubits, amps)


def apply_single(state: StateVector, gate: Gate1Q, qubit: int) -> StateVector:
    """Apply a single-qubit gate to the named qubit."""
    state._check_label(qubit)
    psi = state.tensor_view()
    axis = qubit - 1
    # Contract the gate with the qubit axis, then move the new axis back.
    out = np.tensordot(gate.matrix, psi, axes=([1], [axis]))
    out = np.moveaxis(out, 0, axis)
    return StateVector(state.num_qubits, out.reshape(-1))


def apply_cnot(state: StateVector, control: int, target: int) -> StateVector:
    """Flip ``target`` on basis states where ``control`` is 1."""
    state._check_label(control)
    state._check_label(target)
    if control == target:
        raise ValueError(f"control and target collide on qubit {control}")
    psi = state.tensor_view().copy()
    idx_c1 = [slice(None)] * state.num_qubits
    idx_c1[control - 1] = 1
    psi[tuple(idx_c1)] = np.flip(psi[tuple(idx_c1)], axis=_shifted_axis(control, target))
    return StateVector(state.num_qubits, psi.reshape(-1))


def _shifted_axis(control: int, target: int) -> int:
    # After fixing the control axis with an integer index, axes above it shift down.
    axis = target - 1
    return axis - 1 if target > control else axis


def _bell_rest(state: StateVector, a: int, b: int, outcome: BellLabel) -> np.ndarray:
    """Contract <outcome|_{a,b} with the state.

    Returns the unnormalized coefficient tensor over the remaining qubits,
    axes ordered by ascending label.
    """
    psi = state.tensor_view()
    return np.tensordot(outcome.tensor.conj(), psi, axes=([0, 1], [a - 1, b - 1]))


def _embed_pair(rest: np.ndarray, a: int, b: int, outcome: BellLabel, num_qubits: int) -> np.ndarray:
    """Inverse of :func:`_bell_rest`: tensor the Bell pair back onto axes a-1, b-1."""
    full = np.multiply.outer(outcome.tensor, rest)
    return np.moveaxis(full, [0, 1], [a - 1, b - 1])


def _check_pair(state: StateVector, a: int, b: int) -> None:
    state._check_label(a)
    state._check_label(b)
    if a == b:
        raise ValueError(f"measurement pair labels collide on qubit {a}")


def project_bell(
    state: StateVector, a: int, b: int, outcome: BellLabel
) -> tuple[float, StateVector]:
    """Project qubits (a, b) onto a Bell outcome.

    Returns the outcome probability and the renormalized post-measurement
    state. The measured pair remains in the register, collapsed to the
    observed Bell state. Raises :class:`ZeroProbabilityOutcome` rather than
    returning a NaN state when the outcome has no weight.
    """
    _check_pair(state, a, b)
    rest = _bell_rest(state, a, b, outcome)
    probability = float(np.sum(np.abs(rest) ** 2))
    if probability < ZERO_PROBABILITY:
        raise ZeroProbabilityOutcome(
            f"outcome {outcome} on qubits ({a}, {b}) has probability {probability:.3e}"
        )
    post = _embed_pair(rest / np.sqrt(probability), a, b, outcome, state.num_qubits)
    return probability, StateVector(state.num_qubits, post.reshape(-1))


def bell_probabilities(state: StateVector, a: int, b: int) -> dict[BellLabel, float]:
    """Probabilities of the four Bell outcomes on qubits (a, b)."""
    _check_pair(state, a, b)
    probs = {}
    for label in BELL_LABELS:
        rest = _bell_rest(state, a, b, label)
        probs[label] = float(np.sum(np.abs(rest) ** 2))
    return probs


def sample_bell(
    state: StateVector, a: int, b: int, rng: np.random.Generator
) -> tuple[BellLabel, StateVector]:
    """Draw a Bell outcome on (a, b) and collapse the state accordingly."""
    probs = bell_probabilities(state, a, b)
    weights = np.array([probs[label] for label in BELL_LABELS])
    weights = weights / weights.sum()
    outcome = BELL_LABELS[rng.choice(len(BELL_LABELS), p=weights)]
    _, post = project_bell(state, a, b, outcome)
    return outcome, post


def joint_probability(
    state: StateVector,
    pairs: list[tuple[int, int]] | tuple[tuple[int, int], ...],
    outcomes: list[BellLabel] | tuple[BellLabel, ...],
) -> float:
    """Probability of one joint outcome of sequential Bell measurements.

    Companion to :func:`joint_distribution` for callers that need a single
    branch; the pairs must be disjoint.
    """
    _check_disjoint_pairs(state, pairs)
    if len(outcomes) != len(pairs):
        raise ValueError("one outcome per measured pair required")
    rest = state.tensor_view()
    remaining = list(range(1, state.num_qubits + 1))
    for (a, b), outcome in zip(pairs, outcomes):
        ai, bi = remaining.index(a), remaining.index(b)
        rest = np.tensordot(outcome.tensor.conj(), rest, axes=([0, 1], [ai, bi]))
        remaining = [q for q in remaining if q not in (a, b)]
    return float(np.sum(np.abs(rest) ** 2))


def joint_distribution(
    state: StateVector,
    pairs: list[tuple[int, int]] | tuple[tuple[int, int], ...],
) -> dict[tuple[BellLabel, ...], float]:
    """Joint outcome distribution of sequential Bell measurements.

    The map covers all ``4**len(pairs)`` outcome tuples (zeros included)
    and sums to 1. Because projectors on disjoint pairs commute, the pair
    order cannot change the distribution.
    """
    _check_disjoint_pairs(state, pairs)
    dist = {}
    for combo in itertools.product(BELL_LABELS, repeat=len(pairs)):
        dist[combo] = joint_probability(state, pairs, combo)
    return dist


def _check_disjoint_pairs(state: StateVector, pairs) -> None:
    seen: set[int] = set()
    for a, b in pairs:
        _check_pair(state, a, b)
        if a in seen or b in seen:
            raise ValueError(f"measurement pairs overlap on qubit {a if a in seen else b}")
        seen.update((a, b))


def reduced_density(state: StateVector, keep: set[int] | frozenset[int]) -> DensityMatrix:
    """Partial trace onto ``keep``; rows/columns follow ascending kept labels."""
    if not keep:
        raise ValueError("keep set must not be empty")
    kept = sorted(keep)
    for q in kept:
        state._check_label(q)
    psi = state.tensor_view()
    kept_axes = [q - 1 for q in kept]
    moved = np.moveaxis(psi, kept_axes, range(len(kept)))
    mat = moved.reshape(2 ** len(kept), -1)
    return DensityMatrix(2 ** len(kept), mat @ mat.conj().T)


def purity(dm: DensityMatrix) -> float:
    """Trace of the squared density matrix; 1 for pure, 1/dim for maximally mixed."""
    value = np.trace(dm.entries @ dm.entries)
    return float(value.real)


def fidelity_up_to_phase(s1: StateVector, s2: StateVector) -> float:
    """|<s1|s2>|, which ignores global phase (Bell collapse signs included)."""
    if s1.num_qubits != s2.num_qubits:
        raise ValueError(f"dimension mismatch: {s1.num_qubits} vs {s2.num_qubits} qubits")
    return float(abs(np.vdot(s1.amplitudes, s2.amplitudes)))
