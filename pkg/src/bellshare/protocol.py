"""Three-party secret-sharing rounds: encoding, execution, reconstruction.

A round shares two classical bits. The dealer encodes them as a Pauli
applied to qubit 1 or 4 of a three-pair entangled register, the holder of
(1,4) measures first, and the holders of (2,6) and (3,5) measure next.
Reconstruction runs two independent routes:

- :func:`reconstruct` deduces the operator algebraically from the public
  announcements by re-expressing the observed Bell products over the
  dealer's original pairing and filtering on the pairs known to be
  untouched.
- :func:`reconstruct_oracle` brute-forces the four operator candidates by
  simulating each and keeping those that give the announcements nonzero
  probability.

On honest transcripts the two agree and pin the dealer's operator exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from . import bellalg, qsim
from .bellalg import ALL_ALPHA_PLUS
from .qsim import BellLabel, GateKind, StateVector

#: Fixed qubit allocation: party 1 holds (1,4), party 2 holds (2,6), party 3 holds (3,5).
P1_PAIR = (1, 4)
P2_PAIR = (2, 6)
P3_PAIR = (3, 5)

BellTriple = tuple[BellLabel, BellLabel, BellLabel]


class ReconstructionFailed(Exception):
    """No expansion term matches the announcements (inconsistent or forged)."""


class AmbiguousReconstruction(Exception):
    """A withheld announcement blocks a reconstruction step."""


class QubitPolicy(str, Enum):
    """How the dealer picks the operated qubit each round."""

    ALWAYS_ONE = "one"
    ALWAYS_FOUR = "four"
    UNIFORM_RANDOM = "uniform"


# Operator/bit correspondence; the same two bits name different operators
# depending on the operated qubit, so the qubit announcement is mandatory.
_BITS_FOR_QUBIT1 = {
    GateKind.IDENTITY: "00",
    GateKind.PAULI_X: "01",
    GateKind.PAULI_IY: "11",
    GateKind.PAULI_Z: "10",
}
_BITS_FOR_QUBIT4 = {
    GateKind.IDENTITY: "11",
    GateKind.PAULI_X: "10",
    GateKind.PAULI_IY: "00",
    GateKind.PAULI_Z: "01",
}


@dataclass(frozen=True)
class ShareOp:
    """The dealer's per-round secret carrier: a Pauli and the qubit it acts on."""

    op: GateKind
    operated_qubit: int

    def __post_init__(self) -> None:
        if self.op not in qsim.PAULI_KINDS:
            raise ValueError(f"share operator must be I, X, iY, or Z, got {self.op}")
        if self.operated_qubit not in (1, 4):
            raise ValueError(f"operated qubit must be 1 or 4, got {self.operated_qubit}")


def bits_to_op(two_bits: str, qubit_choice: int) -> ShareOp:
    """The unique operator encoding ``two_bits`` on the chosen qubit."""
    if len(two_bits) != 2 or any(c not in "01" for c in two_bits):
        raise ValueError(f"expected two bits, got {two_bits!r}")
    table = _BITS_FOR_QUBIT1 if qubit_choice == 1 else _BITS_FOR_QUBIT4
    if qubit_choice not in (1, 4):
        raise ValueError(f"operated qubit must be 1 or 4, got {qubit_choice}")
    for op, bits in table.items():
        if bits == two_bits:
            return ShareOp(op, qubit_choice)
    raise AssertionError("unreachable: the bit tables are total")


def op_to_bits(share_op: ShareOp) -> str:
    """Inverse of :func:`bits_to_op`."""
    table = _BITS_FOR_QUBIT1 if share_op.operated_qubit == 1 else _BITS_FOR_QUBIT4
    return table[share_op.op]


@dataclass(frozen=True)
class RoundAnnouncements:
    """Everything public after one round; ``None`` marks a withheld outcome."""

    initial: BellTriple
    operated_qubit: int
    p1_outcome: BellLabel | None
    p2_outcome: BellLabel | None
    p3_outcome: BellLabel | None


@dataclass(frozen=True)
class RoundTranscript:
    """One executed round, including the dealer-private truth."""

    true_op: ShareOp
    announcements: RoundAnnouncements
    reconstructed_bits: str | None
    rng_seed: int

    @property
    def consistent(self) -> bool:
        return self.reconstructed_bits == op_to_bits(self.true_op)


@dataclass(frozen=True)
class SecretSession:
    """A padded secret and the rounds that shared it, two bits at a time."""

    secret: str
    rounds: tuple[RoundTranscript, ...]

    @property
    def reconstructed(self) -> str:
        return "".join(r.reconstructed_bits or "??" for r in self.rounds)


@lru_cache(maxsize=None)
def dealer_prepare(share_op: ShareOp, initial: BellTriple = ALL_ALPHA_PLUS) -> StateVector:
    """The six-qubit register after the dealer's operation."""
    return bellalg.operated_triple(share_op.op, share_op.operated_qubit, initial)


def run_round(
    two_bits: str,
    qubit_choice: int,
    seed: int,
    initial: BellTriple = ALL_ALPHA_PLUS,
) -> RoundTranscript:
    """Execute one honest round end to end.

    The seed fully determines the three parties' sampled outcomes, so
    transcripts are reproducible.
    """
    share_op = bits_to_op(two_bits, qubit_choice)
    rng = np.random.default_rng(seed)
    state = dealer_prepare(share_op, initial)
    p1, state = qsim.sample_bell(state, *P1_PAIR, rng)
    p2, state = qsim.sample_bell(state, *P2_PAIR, rng)
    p3, state = qsim.sample_bell(state, *P3_PAIR, rng)
    announcements = RoundAnnouncements(initial, qubit_choice, p1, p2, p3)
    bits = reconstruct(announcements)
    return RoundTranscript(share_op, announcements, bits, seed)


def reconstruct(a: RoundAnnouncements) -> str:
    """Deduce the shared bits from the announcements alone.

    Route: (i) rewrite the (2,6) and (3,5) outcomes over the pairing
    ((2,3),(5,6)) and keep the term whose (5,6) label matches the announced
    initial label of that never-touched pair, fixing the (2,3) label;
    (ii) rewrite the (1,4) outcome with that (2,3) label over ((1,2),(3,4))
    and filter on the announced label of whichever of those pairs the
    dealer did not touch; (iii) the Pauli carrying the announced label of
    the touched pair onto the inferred one is the dealer's operator.
    """
    if a.p1_outcome is None:
        raise AmbiguousReconstruction("party 1 withheld its outcome")
    if a.p2_outcome is None or a.p3_outcome is None:
        withholder = "2" if a.p2_outcome is None else "3"
        raise AmbiguousReconstruction(f"party {withholder} withheld its outcome")
    l12, l34, l56 = a.initial

    swap = bellalg.rebase(a.p2_outcome, P2_PAIR, a.p3_outcome, P3_PAIR, ((2, 3), (5, 6)))
    matches = swap.matching_first(second=l56)
    if len(matches) != 1:
        raise ReconstructionFailed(f"(5,6) label {l56} matches {len(matches)} terms")
    l23 = matches[0].labels[0]

    regroup = bellalg.rebase(a.p1_outcome, P1_PAIR, l23, (2, 3), ((1, 2), (3, 4)))
    if a.operated_qubit == 1:
        matches = regroup.matching_first(second=l34)
        if len(matches) != 1:
            raise ReconstructionFailed(f"(3,4) label {l34} matches {len(matches)} terms")
        inferred, announced = matches[0].labels[0], l12
    else:
        matches = regroup.matching_second(first=l12)
        if len(matches) != 1:
            raise ReconstructionFailed(f"(1,2) label {l12} matches {len(matches)} terms")
        inferred, announced = matches[0].labels[1], l34

    op = bellalg.pauli_between(announced, inferred)
    return op_to_bits(ShareOp(op, a.operated_qubit))


def reconstruct_oracle(a: RoundAnnouncements) -> frozenset[ShareOp]:
    """Brute-force candidate set: operators consistent with the announcements.

    Simulates the dealer's preparation for each of the four Paulis on the
    announced qubit and keeps those under which every *present* announced
    outcome has nonzero joint probability. Withheld outcomes (any party's)
    simply drop out of the joint, so the set grows accordingly.
    """
    pairs = []
    outcomes = []
    for pair, outcome in ((P1_PAIR, a.p1_outcome), (P2_PAIR, a.p2_outcome), (P3_PAIR, a.p3_outcome)):
        if outcome is not None:
            pairs.append(pair)
            outcomes.append(outcome)
    candidates = set()
    for op in qsim.PAULI_KINDS:
        share_op = ShareOp(op, a.operated_qubit)
        state = dealer_prepare(share_op, a.initial)
        if qsim.joint_probability(state, pairs, outcomes) > qsim.ZERO_PROBABILITY:
            candidates.add(share_op)
    return frozenset(candidates)


def pad_secret(secret: str) -> str:
    """Left-pad with a zero bit to even length."""
    if not secret or any(c not in "01" for c in secret):
        raise ValueError(f"secret must be a non-empty bit string, got {secret!r}")
    return "0" + secret if len(secret) % 2 else secret


def share_secret(
    secret: str,
    qubit_policy: QubitPolicy = QubitPolicy.UNIFORM_RANDOM,
    seed: int = 0,
    initial: BellTriple = ALL_ALPHA_PLUS,
) -> SecretSession:
    """Share a bit string of any length, one round per two-bit chunk."""
    padded = pad_secret(secret)
    master = np.random.default_rng(seed)
    rounds = []
    for i in range(0, len(padded), 2):
        if qubit_policy is QubitPolicy.ALWAYS_ONE:
            qubit = 1
        elif qubit_policy is QubitPolicy.ALWAYS_FOUR:
            qubit = 4
        else:
            qubit = int(master.choice((1, 4)))
        round_seed = int(master.integers(0, 2**63))
        rounds.append(run_round(padded[i : i + 2], qubit, round_seed, initial))
    return SecretSession(padded, tuple(rounds))


def _outcome_name(outcome: BellLabel | None) -> str:
    return outcome.value if outcome is not None else "withheld"


def round_record(round_index: int, transcript: RoundTranscript) -> dict:
    """Flat per-round record with the fixed serialization field names."""
    a = transcript.announcements
    return {
        "round_index": round_index,
        "dealer_op": transcript.true_op.op.value,
        "operated_qubit": transcript.true_op.operated_qubit,
        "p1_outcome": _outcome_name(a.p1_outcome),
        "p2_outcome": _outcome_name(a.p2_outcome),
        "p3_outcome": _outcome_name(a.p3_outcome),
        "reconstructed_bits": transcript.reconstructed_bits or "aborted",
        "consistent": transcript.consistent,
    }
