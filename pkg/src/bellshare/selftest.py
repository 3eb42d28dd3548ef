"""Fast invariant battery behind the ``verify`` CLI subcommand.

Each check raises AssertionError with a diagnostic on violation; the
runner reports one pass/fail line per check. This is a smoke-level mirror
of the pytest suite, meant to validate an installation in a few seconds.
"""
from __future__ import annotations

import itertools
from typing import Callable

import numpy as np

from . import adversary, bellalg, neqr, protocol, qsim
from .qsim import BELL_LABELS, BellLabel, GateKind


def _random_state(num_qubits: int, seed: int) -> qsim.StateVector:
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=2**num_qubits) + 1j * rng.normal(size=2**num_qubits)
    return qsim.StateVector(num_qubits, amps / np.linalg.norm(amps))


def check_bell_orthonormality() -> None:
    for a, b in itertools.product(BELL_LABELS, BELL_LABELS):
        want = 1.0 if a is b else 0.0
        got = abs(np.vdot(a.vector, b.vector))
        assert abs(got - want) < 1e-12, f"<{a}|{b}> = {got}"


def check_projector_completeness() -> None:
    for seed in range(3):
        state = _random_state(6, seed)
        for pair in ((1, 4), (2, 6), (3, 5), (1, 2)):
            probs = qsim.bell_probabilities(state, *pair)
            total = sum(probs.values())
            assert abs(total - 1.0) < 1e-10, f"probabilities sum to {total} on {pair}"


def check_measurement_order_independence() -> None:
    state = _random_state(6, 7)
    pairs = [(1, 4), (2, 6), (3, 5)]
    base = qsim.joint_distribution(state, pairs)
    for perm in itertools.permutations(range(3)):
        permuted = qsim.joint_distribution(state, [pairs[i] for i in perm])
        for combo, p in base.items():
            assert abs(permuted[tuple(combo[i] for i in perm)] - p) < 1e-10
        break  # one nontrivial permutation suffices for a smoke check


def check_collapse_tables_match_simulation() -> None:
    for qubit in (1, 4):
        for op in qsim.PAULI_KINDS:
            state = bellalg.operated_triple(op, qubit)
            for outcome in BELL_LABELS:
                prob, post = qsim.project_bell(state, 1, 4, outcome)
                assert abs(prob - 0.25) < 1e-10
                cell = bellalg.collapse_table(op, qubit, outcome)
                expected = bellalg.bell_product_state(
                    ((1, 4), (2, 3), (5, 6)), (outcome, cell.pair23, cell.pair56)
                )
                fid = qsim.fidelity_up_to_phase(post, expected)
                assert fid > 1 - 1e-10, f"({op}, {qubit}, {outcome}): fidelity {fid}"


def check_rebase_round_trip() -> None:
    source = ((2, 6), (3, 5))
    target = ((2, 3), (5, 6))
    for first, second in itertools.product(BELL_LABELS, BELL_LABELS):
        forward = bellalg.rebase(first, source[0], second, source[1], target)
        total = 0.0
        for term in forward.terms:
            back = bellalg.rebase(term.labels[0], target[0], term.labels[1], target[1], source)
            total += term.coefficient * back.coefficient(first, second)
        assert abs(total - 1.0) < 1e-10, f"round trip lost weight: {total}"


def check_honest_rounds() -> None:
    for bits in ("00", "01", "10", "11"):
        for qubit in (1, 4):
            for seed in range(3):
                transcript = protocol.run_round(bits, qubit, seed)
                assert transcript.reconstructed_bits == bits, (bits, qubit, seed)


def check_oracle_agreement() -> None:
    rng = np.random.default_rng(11)
    for _ in range(50):
        bits = format(rng.integers(4), "02b")
        qubit = int(rng.choice((1, 4)))
        transcript = protocol.run_round(bits, qubit, int(rng.integers(2**32)))
        candidates = protocol.reconstruct_oracle(transcript.announcements)
        assert candidates == frozenset({transcript.true_op}), transcript


def check_withheld_share_ambiguity() -> None:
    report = adversary.run_scenario(adversary.WithheldShare("P2"), "10", trials=20, seed=3)
    assert report.ambiguity_histogram == {4: 20}, report.ambiguity_histogram
    assert report.aborted_count == 20


def check_neqr_round_trip() -> None:
    rng = np.random.default_rng(5)
    for _ in range(3):
        img = neqr.GrayImage(1, tuple(int(v) for v in rng.integers(0, 256, size=4)))
        assert neqr.neqr_decode(neqr.neqr_encode(img)) == img
        fid = qsim.fidelity_up_to_phase(neqr.build_image_state(img), neqr.neqr_encode(img))
        assert fid > 1 - 1e-10


def check_pixel_share_round_trip() -> None:
    bundle = neqr.share_pixel(1, 1, 55, n=1, seed=9)
    assert neqr.reconstruct_pixel(bundle) == (1, 1, 55)


CHECKS: tuple[tuple[str, Callable[[], None]], ...] = (
    ("bell-orthonormality", check_bell_orthonormality),
    ("projector-completeness", check_projector_completeness),
    ("measurement-order-independence", check_measurement_order_independence),
    ("collapse-tables-match-simulation", check_collapse_tables_match_simulation),
    ("rebase-round-trip", check_rebase_round_trip),
    ("honest-rounds", check_honest_rounds),
    ("oracle-agreement", check_oracle_agreement),
    ("withheld-share-ambiguity", check_withheld_share_ambiguity),
    ("neqr-round-trip", check_neqr_round_trip),
    ("pixel-share-round-trip", check_pixel_share_round_trip),
)


def run_self_checks() -> list[tuple[str, bool, str]]:
    """Run every check; returns (name, passed, detail) triples."""
    results = []
    for name, check in CHECKS:
        try:
            check()
            results.append((name, True, ""))
        except AssertionError as exc:
            results.append((name, False, str(exc)))
    return results
