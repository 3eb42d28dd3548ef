"""Executable adversary scenarios with Monte Carlo rate estimation.

Each scenario perturbs one link of an otherwise honest round: an outside
party forging a register qubit, a dealer lying about the prepared state or
the operated qubit, the first measurer lying about its outcome, or any
party withholding its share. Reports carry the per-round correct rate, an
abort count, and a histogram of brute-force candidate-set sizes.

Measured facts worth knowing up front (all are deterministic consequences
of the swapping algebra and are asserted in the test suite):

- A Pauli forgery on any single register qubit is announcement-level
  indistinguishable from an honest round whose operator is composed with
  the forged label offset, so reconstruction is wrong on every branch and
  no announcement-based check can detect it.
- A dealer lying about the prepared product state shifts the inferred
  operator by a fixed offset, again on every branch.
- Withholding any one share leaves all four operators consistent with the
  remaining announcements.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Union

import numpy as np

from . import qsim
from .bellalg import ALL_ALPHA_PLUS
from .protocol import (
    P1_PAIR,
    P2_PAIR,
    P3_PAIR,
    AmbiguousReconstruction,
    BellTriple,
    ReconstructionFailed,
    RoundAnnouncements,
    ShareOp,
    bits_to_op,
    dealer_prepare,
    op_to_bits,
    reconstruct,
    reconstruct_oracle,
)
from .qsim import BellLabel, GateKind

ALL_ALPHA_MINUS: BellTriple = (
    BellLabel.ALPHA_MINUS,
    BellLabel.ALPHA_MINUS,
    BellLabel.ALPHA_MINUS,
)

#: Announce the phase-flipped partner of every outcome: alpha+ <-> alpha-,
#: beta+ <-> beta-. The substitution a lying first measurer needs to flip a
#: Z round into an I round on every branch.
PHASE_FLIP_SUBSTITUTION: Mapping[BellLabel, BellLabel] = MappingProxyType(
    {
        BellLabel.ALPHA_PLUS: BellLabel.ALPHA_MINUS,
        BellLabel.ALPHA_MINUS: BellLabel.ALPHA_PLUS,
        BellLabel.BETA_PLUS: BellLabel.BETA_MINUS,
        BellLabel.BETA_MINUS: BellLabel.BETA_PLUS,
    }
)


@dataclass(frozen=True)
class EveForgery:
    """An outsider applies a gate to one register qubit before any measurement."""

    target_qubit: int = 5
    gate: GateKind = GateKind.PAULI_X

    def __post_init__(self) -> None:
        if not 1 <= self.target_qubit <= 6:
            raise ValueError(f"target qubit must be in 1..6, got {self.target_qubit}")


@dataclass(frozen=True)
class LyingDealerState:
    """The dealer prepares one product state but announces another."""

    actual: BellTriple = ALL_ALPHA_MINUS
    announced: BellTriple = ALL_ALPHA_PLUS


@dataclass(frozen=True)
class LyingDealerQubit:
    """The dealer hides which qubit it operated on.

    With ``parties_guess`` the reconstructing parties pick 1 or 4 uniformly
    at random; otherwise they trust the dealer's false announcement of the
    other qubit.
    """

    actual_qubit: int = 4
    parties_guess: bool = True

    def __post_init__(self) -> None:
        if self.actual_qubit not in (1, 4):
            raise ValueError(f"operated qubit must be 1 or 4, got {self.actual_qubit}")


@dataclass(frozen=True)
class LyingP1:
    """The first measurer announces a substituted outcome."""

    substitution: Mapping[BellLabel, BellLabel] = field(
        default_factory=lambda: PHASE_FLIP_SUBSTITUTION
    )

    def __post_init__(self) -> None:
        if set(self.substitution) != set(qsim.BELL_LABELS):
            raise ValueError("substitution map must be total over the four Bell labels")


@dataclass(frozen=True)
class WithheldShare:
    """One party refuses to announce its measurement outcome."""

    party: str = "P2"

    def __post_init__(self) -> None:
        if self.party not in ("P1", "P2", "P3"):
            raise ValueError(f"party must be P1, P2, or P3, got {self.party}")


Scenario = Union[EveForgery, LyingDealerState, LyingDealerQubit, LyingP1, WithheldShare]

SCENARIO_NAMES: dict[str, type] = {
    "eve-forgery": EveForgery,
    "lying-dealer-state": LyingDealerState,
    "lying-dealer-qubit": LyingDealerQubit,
    "lying-p1": LyingP1,
    "withheld-share": WithheldShare,
}


@dataclass(frozen=True)
class ScenarioReport:
    """Aggregate outcome of repeated scenario trials."""

    trials: int
    per_round_correct_rate: float
    ambiguity_histogram: dict[int, int]
    aborted_count: int

    def __post_init__(self) -> None:
        if sum(self.ambiguity_histogram.values()) != self.trials:
            raise ValueError("ambiguity histogram must account for every trial")


@dataclass(frozen=True)
class TrialOutcome:
    reconstructed_bits: str | None
    candidate_count: int
    aborted: bool


def run_trial(scenario: Scenario, secret_bits: str, rng: np.random.Generator) -> TrialOutcome:
    """One perturbed round: sample honestly, perturb, reconstruct both ways."""
    actual_initial = scenario.actual if isinstance(scenario, LyingDealerState) else ALL_ALPHA_PLUS
    announced_initial = (
        scenario.announced if isinstance(scenario, LyingDealerState) else actual_initial
    )
    actual_qubit = scenario.actual_qubit if isinstance(scenario, LyingDealerQubit) else 1
    true_op = bits_to_op(secret_bits, actual_qubit)

    state = dealer_prepare(true_op, actual_initial)
    if isinstance(scenario, EveForgery):
        # Attack window: after preparation, before the first measurement.
        state = qsim.apply_single(state, qsim.GATES[scenario.gate], scenario.target_qubit)

    p1, state = qsim.sample_bell(state, *P1_PAIR, rng)
    p2, state = qsim.sample_bell(state, *P2_PAIR, rng)
    p3, state = qsim.sample_bell(state, *P3_PAIR, rng)

    announced_p1: BellLabel | None = p1
    announced_p2: BellLabel | None = p2
    announced_p3: BellLabel | None = p3
    if isinstance(scenario, LyingP1):
        announced_p1 = scenario.substitution[p1]
    if isinstance(scenario, WithheldShare):
        if scenario.party == "P1":
            announced_p1 = None
        elif scenario.party == "P2":
            announced_p2 = None
        else:
            announced_p3 = None

    assumed_qubit = actual_qubit
    if isinstance(scenario, LyingDealerQubit):
        if scenario.parties_guess:
            assumed_qubit = int(rng.choice((1, 4)))
        else:
            assumed_qubit = 4 if scenario.actual_qubit == 1 else 1

    announcements = RoundAnnouncements(
        announced_initial, assumed_qubit, announced_p1, announced_p2, announced_p3
    )
    try:
        bits: str | None = reconstruct(announcements)
        aborted = False
    except (AmbiguousReconstruction, ReconstructionFailed):
        bits = None
        aborted = True
    candidates = reconstruct_oracle(announcements)
    return TrialOutcome(bits, len(candidates), aborted)


def run_scenario(
    scenario: Scenario, secret_bits: str, trials: int, seed: int = 0
) -> ScenarioReport:
    """Repeat a scenario round and aggregate.

    Per-trial streams derive from (seed, trial index), so reports are
    reproducible and independent of execution order.
    """
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    correct = 0
    aborted = 0
    histogram: Counter[int] = Counter()
    for trial in range(trials):
        rng = np.random.default_rng((seed, trial))
        outcome = run_trial(scenario, secret_bits, rng)
        if outcome.reconstructed_bits == secret_bits:
            correct += 1
        if outcome.aborted:
            aborted += 1
        histogram[outcome.candidate_count] += 1
    return ScenarioReport(trials, correct / trials, dict(sorted(histogram.items())), aborted)


def session_correct_rate(
    scenario: Scenario, secret: str, sessions: int, seed: int = 0
) -> float:
    """Fraction of multi-round sessions whose every round reconstructs exactly."""
    chunks = [secret[i : i + 2] for i in range(0, len(secret), 2)]
    good = 0
    for s in range(sessions):
        ok = True
        for r, chunk in enumerate(chunks):
            rng = np.random.default_rng((seed, s, r))
            outcome = run_trial(scenario, chunk, rng)
            if outcome.reconstructed_bits != chunk:
                ok = False
                break
        good += ok
    return good / sessions


def lying_p1_counterexample(
    announced: BellLabel = BellLabel.ALPHA_MINUS, seed: int = 0
) -> tuple[str, str]:
    """The fixed lying-first-measurer case: truth is '10', parties get '00'.

    The dealer applies Z to qubit 1; the first measurer observes alpha+ on
    (1,4) but announces ``announced`` (alpha- by default; pass alpha+ for
    the honest control). The other outcomes are sampled honestly.
    """
    true_op = ShareOp(GateKind.PAULI_Z, 1)
    state = dealer_prepare(true_op)
    _, state = qsim.project_bell(state, *P1_PAIR, BellLabel.ALPHA_PLUS)
    rng = np.random.default_rng(seed)
    p2, state = qsim.sample_bell(state, *P2_PAIR, rng)
    p3, state = qsim.sample_bell(state, *P3_PAIR, rng)
    announcements = RoundAnnouncements(ALL_ALPHA_PLUS, 1, announced, p2, p3)
    return reconstruct(announcements), op_to_bits(true_op)


def lying_dealer_state_counterexample() -> tuple[GateKind, GateKind]:
    """The fixed lying-dealer case: identity truth, parties deduce iY.

    The dealer prepares all-alpha- but announces all-alpha+ and applies no
    operator. Evaluating the announcement set (beta+ on (1,4), beta- on
    (2,6), beta+ on (3,5)) against the announced state walks the parties to
    iY. The announcements are taken as given: under the actually prepared
    state this particular combination has probability zero, so the case is
    a deduction on announcements rather than a samplable transcript.
    """
    announcements = RoundAnnouncements(
        ALL_ALPHA_PLUS, 1, BellLabel.BETA_PLUS, BellLabel.BETA_MINUS, BellLabel.BETA_PLUS
    )
    bits = reconstruct(announcements)
    deduced = bits_to_op(bits, 1).op
    return deduced, GateKind.IDENTITY
