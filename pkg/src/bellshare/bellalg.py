"""Bell-pair states and the two-pair basis-change (entanglement swapping) algebra.

The central objects are :func:`rebase`, which re-expresses a product of two
Bell pairs over a different pairing of the same four qubits, and
:func:`collapse_table`, which tabulates how the dealer's Pauli choice and
the first measurement outcome determine the collapsed labels of the
remaining pairs. Both are computed numerically from the statevector engine
rather than transcribed by hand.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .qsim import (
    BELL_LABELS,
    GATES,
    PAULI_KINDS,
    BellLabel,
    GateKind,
    StateVector,
    apply_single,
)

SNAP_ATOL = 1e-10

# Normalized two-pair rebase coefficients always land on this grid: a single
# unit term when the pairing is unchanged, four half-weight terms otherwise.
_COEFF_GRID = (0.0, 0.5, -0.5, 1.0, -1.0)

Pair = tuple[int, int]

#: The protocol's fixed triple of dealer-prepared pairs.
TRIPLE_PAIRS: tuple[Pair, Pair, Pair] = ((1, 2), (3, 4), (5, 6))

ALL_ALPHA_PLUS: tuple[BellLabel, BellLabel, BellLabel] = (
    BellLabel.ALPHA_PLUS,
    BellLabel.ALPHA_PLUS,
    BellLabel.ALPHA_PLUS,
)


def bell_pair(label: BellLabel) -> StateVector:
    """The two-qubit Bell state named by ``label``."""
    return StateVector(2, label.vector)


def bell_product_state(pairs: tuple[Pair, ...], labels: tuple[BellLabel, ...]) -> StateVector:
    """Product of Bell pairs on disjoint ``pairs`` that partition labels 1..2k."""
    if len(pairs) != len(labels):
        raise ValueError("one label per pair required")
    qubits = [q for pair in pairs for q in pair]
    n = 2 * len(pairs)
    if sorted(qubits) != list(range(1, n + 1)):
        raise ValueError(f"pairs {pairs} must partition qubit labels 1..{n}")
    amps = np.array([1.0], dtype=complex)
    for label in labels:
        amps = np.kron(amps, label.vector)
    # kron produced axes in pair-listing order; permute to ascending labels.
    tensor = amps.reshape([2] * n)
    tensor = np.moveaxis(tensor, range(n), [q - 1 for q in qubits])
    return StateVector(n, tensor.reshape(-1))


def epr_triple(l12: BellLabel, l34: BellLabel, l56: BellLabel) -> StateVector:
    """The dealer's three-pair initial state on qubits (1,2), (3,4), (5,6)."""
    return bell_product_state(TRIPLE_PAIRS, (l12, l34, l56))


def operated_triple(
    op: GateKind,
    operated_qubit: int,
    initial: tuple[BellLabel, BellLabel, BellLabel] = ALL_ALPHA_PLUS,
) -> StateVector:
    """An EPR triple with one Pauli applied to qubit 1 or 4."""
    if op not in PAULI_KINDS:
        raise ValueError(f"operated gate must be a Pauli, got {op}")
    if operated_qubit not in (1, 4):
        raise ValueError(f"operated qubit must be 1 or 4, got {operated_qubit}")
    return apply_single(epr_triple(*initial), GATES[op], operated_qubit)


class RebaseTerm(NamedTuple):
    coefficient: float
    labels: tuple[BellLabel, BellLabel]


@dataclass(frozen=True)
class RebaseExpansion:
    """Exact expansion of a two-pair Bell product over a target pairing."""

    target_pairing: tuple[Pair, Pair]
    terms: tuple[RebaseTerm, ...]

    def __post_init__(self) -> None:
        if len(self.terms) > 16:
            raise ValueError("a two-pair expansion has at most 16 terms")
        seen = {term.labels for term in self.terms}
        if len(seen) != len(self.terms):
            raise ValueError("duplicate label tuple in expansion")
        total = sum(term.coefficient**2 for term in self.terms)
        if abs(total - 1.0) > SNAP_ATOL:
            raise ValueError(f"squared coefficients sum to {total}, not 1")

    def coefficient(self, first: BellLabel, second: BellLabel) -> float:
        for term in self.terms:
            if term.labels == (first, second):
                return term.coefficient
        return 0.0

    def matching_first(self, second: BellLabel) -> list[RebaseTerm]:
        """Terms whose second-pair label equals ``second``."""
        return [t for t in self.terms if t.labels[1] == second]

    def matching_second(self, first: BellLabel) -> list[RebaseTerm]:
        """Terms whose first-pair label equals ``first``."""
        return [t for t in self.terms if t.labels[0] == first]


def _snap(value: float) -> float:
    for grid in _COEFF_GRID:
        if abs(value - grid) <= SNAP_ATOL:
            return grid
    raise ValueError(f"rebase coefficient {value} off the expected half-integer grid")


@lru_cache(maxsize=None)
def rebase(
    first: BellLabel,
    pair_a: Pair,
    second: BellLabel,
    pair_b: Pair,
    target_pairing: tuple[Pair, Pair],
) -> RebaseExpansion:
    """Rewrite ``first`` on ``pair_a`` tensor ``second`` on ``pair_b`` over a new pairing.

    The target pairing must regroup exactly the same four qubits. Coefficients
    are computed by inner products against the target Bell products and
    snapped to the half-integer grid they provably live on.
    """
    qubits = sorted(set(pair_a) | set(pair_b))
    pair_c, pair_d = target_pairing
    if len(qubits) != 4 or len(set(pair_a) & set(pair_b)) != 0:
        raise ValueError(f"source pairs {pair_a}, {pair_b} must be disjoint")
    if sorted(set(pair_c) | set(pair_d)) != qubits or set(pair_c) & set(pair_d):
        raise ValueError(
            f"target pairing {target_pairing} must regroup qubits {tuple(qubits)}"
        )
    pos = {q: i for i, q in enumerate(qubits)}

    # Build the 4-qubit product state with axes in ascending label order.
    psi = np.multiply.outer(first.tensor, second.tensor)
    psi = np.moveaxis(
        psi, range(4), [pos[pair_a[0]], pos[pair_a[1]], pos[pair_b[0]], pos[pair_b[1]]]
    )

    terms = []
    for lc, ld in itertools.product(BELL_LABELS, BELL_LABELS):
        overlap = np.multiply.outer(lc.tensor, ld.tensor).conj()
        overlap = np.moveaxis(
            overlap, range(4), [pos[pair_c[0]], pos[pair_c[1]], pos[pair_d[0]], pos[pair_d[1]]]
        )
        value = complex(np.sum(overlap * psi))
        if abs(value.imag) > SNAP_ATOL:
            raise ValueError(f"rebase coefficient {value} is not real")
        coeff = _snap(value.real)
        if coeff != 0.0:
            terms.append(RebaseTerm(coeff, (lc, ld)))
    return RebaseExpansion(target_pairing, tuple(terms))


class CollapseCell(NamedTuple):
    """One collapse-table entry: sign is the physically irrelevant global phase."""

    sign: int
    pair23: BellLabel
    pair56: BellLabel


def collapse_table(op: GateKind, operated_qubit: int, p1_outcome: BellLabel) -> CollapseCell:
    """Collapsed (2,3) and (5,6) labels after the first measurement.

    The dealer applies ``op`` to qubit 1 or 4 of the all-alpha+ triple and
    the holder of (1,4) observes ``p1_outcome``; the rest of the register
    collapses to a product of Bell pairs on (2,3) and (5,6). Entries are
    derived by simulation, not transcription, and cached.
    """
    return full_collapse_table(operated_qubit)[(op, p1_outcome)]


@lru_cache(maxsize=None)
def full_collapse_table(
    operated_qubit: int,
) -> dict[tuple[GateKind, BellLabel], CollapseCell]:
    """All 16 collapse cells for one operated qubit."""
    table = {}
    for op in PAULI_KINDS:
        state = operated_triple(op, operated_qubit)
        for outcome in BELL_LABELS:
            # Unnormalized <outcome|_{14} psi over remaining qubits (2,3,5,6).
            rest = np.tensordot(
                outcome.tensor.conj(), state.tensor_view(), axes=([0, 1], [0, 3])
            )
            table[(op, outcome)] = _identify_product(rest)
    return table


def _identify_product(rest: np.ndarray) -> CollapseCell:
    for l23, l56 in itertools.product(BELL_LABELS, BELL_LABELS):
        candidate = np.multiply.outer(l23.tensor, l56.tensor)
        overlap = complex(np.sum(candidate.conj() * rest))
        if abs(abs(overlap) - 0.5) < SNAP_ATOL:
            return CollapseCell(1 if overlap.real > 0 else -1, l23, l56)
    raise ValueError("collapsed state is not a Bell product on (2,3) x (5,6)")


@lru_cache(maxsize=None)
def _pauli_action_table() -> dict[GateKind, dict[BellLabel, BellLabel]]:
    actions: dict[GateKind, dict[BellLabel, BellLabel]] = {}
    for op in PAULI_KINDS:
        actions[op] = {}
        for label in BELL_LABELS:
            moved = apply_single(bell_pair(label), GATES[op], 1)
            for target in BELL_LABELS:
                if abs(abs(np.vdot(target.vector, moved.amplitudes)) - 1.0) < SNAP_ATOL:
                    actions[op][label] = target
                    break
    return actions


def pauli_action(op: GateKind, label: BellLabel) -> BellLabel:
    """Bell label after applying a Pauli to one qubit of the pair (phase dropped)."""
    if op not in PAULI_KINDS:
        raise ValueError(f"expected a Pauli kind, got {op}")
    return _pauli_action_table()[op][label]


def pauli_between(source: BellLabel, target: BellLabel) -> GateKind:
    """The unique Pauli whose action carries ``source`` to ``target``."""
    for op in PAULI_KINDS:
        if pauli_action(op, source) == target:
            return op
    raise ValueError(f"no Pauli maps {source} to {target}")  # unreachable: action is transitive


def format_collapse_table(operated_qubit: int) -> str:
    """Fixed text layout of the 16-cell table for one operated qubit."""
    lines = [f"operated qubit {operated_qubit}"]
    lines.append(f"{'op':<4} {'P1 outcome':<11} collapsed state")
    for op in PAULI_KINDS:
        for outcome in BELL_LABELS:
            cell = collapse_table(op, operated_qubit, outcome)
            sign = "+" if cell.sign > 0 else "-"
            lines.append(
                f"{op.value:<4} {outcome.value:<11} "
                f"{sign}1/2 · {cell.pair23.value}(2,3) ⊗ {cell.pair56.value}(5,6)"
            )
    return "\n".join(lines)
