"""Quantum-register image encoding and pixel-wise secret sharing.

A ``2**n x 2**n`` 8-bit grayscale image maps to a register of ``8 + 2n``
qubits: the intensity byte occupies the eight most significant qubit
labels, followed by the n row bits and the n column bits. The full
statevector path is capped at n <= 2 (12 qubits); sharing itself is
classical-bit plumbing over the round protocol and has no size cap.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import qsim
from .protocol import (
    QubitPolicy,
    RoundTranscript,
    reconstruct,
    share_secret,
)
from .qsim import GateKind, StateVector

INTENSITY_QUBITS = 8
MAX_STATE_N = 2  # 8 + 2n qubits stays within the engine cap


class MalformedNeqrState(Exception):
    """The statevector does not have the uniform one-value-per-position form."""


@dataclass(frozen=True)
class GrayImage:
    """Square 2**n x 2**n raster, row-major, pixel values 0..255.

    Coordinate convention: ``(x, y)`` is (row, column).
    """

    n: int
    pixels: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"image exponent must be >= 1, got {self.n}")
        side = 2**self.n
        if len(self.pixels) != side * side:
            raise ValueError(f"expected {side * side} pixels, got {len(self.pixels)}")
        if any(not 0 <= p <= 255 for p in self.pixels):
            raise ValueError("pixel values must lie in 0..255")

    @property
    def side(self) -> int:
        return 2**self.n

    def at(self, x: int, y: int) -> int:
        if not (0 <= x < self.side and 0 <= y < self.side):
            raise ValueError(f"coordinate ({x}, {y}) outside {self.side}x{self.side} image")
        return self.pixels[x * self.side + y]

    @classmethod
    def from_rows(cls, rows: list[list[int]]) -> "GrayImage":
        side = len(rows)
        n = side.bit_length() - 1
        if side < 2 or 2**n != side or any(len(r) != side for r in rows):
            raise ValueError("image must be square with power-of-two side >= 2")
        return cls(n, tuple(v for row in rows for v in row))

    def to_rows(self) -> list[list[int]]:
        return [list(self.pixels[i * self.side : (i + 1) * self.side]) for i in range(self.side)]


def _check_state_size(n: int) -> None:
    if n > MAX_STATE_N:
        raise ValueError(
            f"statevector path supports n <= {MAX_STATE_N} "
            f"({INTENSITY_QUBITS + 2 * MAX_STATE_N} qubits); got n = {n}"
        )


def _basis_index(value: int, x: int, y: int, n: int) -> int:
    return (value << (2 * n)) | (x << n) | y


def neqr_encode(img: GrayImage) -> StateVector:
    """Amplitude 1/2**n on each |value>|x>|y> basis state."""
    _check_state_size(img.n)
    num_qubits = INTENSITY_QUBITS + 2 * img.n
    amps = np.zeros(2**num_qubits, dtype=complex)
    weight = 1.0 / 2**img.n
    for x in range(img.side):
        for y in range(img.side):
            amps[_basis_index(img.at(x, y), x, y, img.n)] = weight
    return StateVector(num_qubits, amps)


def apply_pixel_xor(state: StateVector, x: int, y: int, value: int, n: int) -> StateVector:
    """The per-position set operator: XOR ``value`` into the intensity register.

    Acts as a product of X gates on the intensity qubits whose value bit is
    1, controlled on the position register being |x>|y>; an involution that
    commutes across distinct positions.
    """
    if state.num_qubits != INTENSITY_QUBITS + 2 * n:
        raise ValueError(f"state has {state.num_qubits} qubits, expected {INTENSITY_QUBITS + 2 * n}")
    if not 0 <= value <= 255:
        raise ValueError(f"pixel value {value} outside 0..255")
    side = 2**n
    if not (0 <= x < side and 0 <= y < side):
        raise ValueError(f"coordinate ({x}, {y}) outside {side}x{side} image")
    block = state.amplitudes.reshape(256, side, side).copy()
    block[:, x, y] = block[np.arange(256) ^ value, x, y]
    return StateVector(state.num_qubits, block.reshape(-1))


def build_image_state(img: GrayImage) -> StateVector:
    """Operational construction: Hadamards on the position register, then
    one set operator per pixel. Equals :func:`neqr_encode` up to rounding."""
    _check_state_size(img.n)
    state = qsim.zero_state(INTENSITY_QUBITS + 2 * img.n)
    for q in range(INTENSITY_QUBITS + 1, INTENSITY_QUBITS + 2 * img.n + 1):
        state = qsim.apply_single(state, qsim.GATES[GateKind.HADAMARD], q)
    for x in range(img.side):
        for y in range(img.side):
            value = img.at(x, y)
            if value:
                state = apply_pixel_xor(state, x, y, value, img.n)
    return state


def neqr_decode(state: StateVector) -> GrayImage:
    """Read the unique image off a well-formed encoded state."""
    n2 = state.num_qubits - INTENSITY_QUBITS
    if n2 <= 0 or n2 % 2:
        raise MalformedNeqrState(f"register of {state.num_qubits} qubits has no 8+2n layout")
    n = n2 // 2
    side = 2**n
    block = state.amplitudes.reshape(256, side, side)
    # Remove the (unobservable) global phase before checking amplitudes.
    flat = block.reshape(-1)
    anchor = flat[np.argmax(np.abs(flat))]
    block = block * (anchor.conjugate() / abs(anchor))
    weight = 1.0 / side
    pixels = []
    for x in range(side):
        for y in range(side):
            column = block[:, x, y]
            hits = np.flatnonzero(np.abs(column) > 1e-10)
            if hits.size != 1:
                raise MalformedNeqrState(
                    f"position ({x}, {y}) holds {hits.size} intensity values, expected 1"
                )
            if abs(column[hits[0]] - weight) > 1e-10:
                raise MalformedNeqrState(f"amplitude at ({x}, {y}) is not uniform")
            pixels.append(int(hits[0]))
    return GrayImage(n, tuple(pixels))


@dataclass(frozen=True)
class PixelShareBundle:
    """One pixel's shared bits plus the rounds that carried them."""

    x_bits: str
    y_bits: str
    intensity_bits: str
    rounds: tuple[RoundTranscript, ...]

    @property
    def declared(self) -> tuple[int, int, int]:
        return int(self.x_bits, 2), int(self.y_bits, 2), int(self.intensity_bits, 2)


def share_pixel(
    x: int,
    y: int,
    value: int,
    n: int,
    qubit_policy: QubitPolicy = QubitPolicy.UNIFORM_RANDOM,
    seed: int = 0,
) -> PixelShareBundle:
    """Share intensity and coordinates as one concatenated bit string."""
    side = 2**n
    if not (0 <= x < side and 0 <= y < side):
        raise ValueError(f"coordinate ({x}, {y}) outside {side}x{side} image")
    if not 0 <= value <= 255:
        raise ValueError(f"pixel value {value} outside 0..255")
    intensity_bits = format(value, f"0{INTENSITY_QUBITS}b")
    x_bits = format(x, f"0{n}b")
    y_bits = format(y, f"0{n}b")
    session = share_secret(intensity_bits + x_bits + y_bits, qubit_policy, seed)
    return PixelShareBundle(x_bits, y_bits, intensity_bits, session.rounds)


def reconstruct_pixel(bundle: PixelShareBundle) -> tuple[int, int, int]:
    """Re-run reconstruction on every round and split bits back into (x, y, value)."""
    bits = "".join(reconstruct(r.announcements) for r in bundle.rounds)
    n = len(bundle.x_bits)
    value = int(bits[:INTENSITY_QUBITS], 2)
    x = int(bits[INTENSITY_QUBITS : INTENSITY_QUBITS + n], 2)
    y = int(bits[INTENSITY_QUBITS + n :], 2)
    return x, y, value


def share_image(
    img: GrayImage,
    qubit_policy: QubitPolicy = QubitPolicy.UNIFORM_RANDOM,
    seed: int = 0,
) -> list[PixelShareBundle]:
    """One bundle per pixel; per-pixel seeds derive from (seed, pixel index)."""
    bundles = []
    for index in range(img.side * img.side):
        x, y = divmod(index, img.side)
        pixel_seed = int(np.random.SeedSequence((seed, index)).generate_state(1)[0])
        bundles.append(share_pixel(x, y, img.at(x, y), img.n, qubit_policy, pixel_seed))
    return bundles


def reconstruct_image(bundles: list[PixelShareBundle]) -> GrayImage:
    """Rebuild the raster from reconstructed (x, y, value) triples."""
    if not bundles:
        raise ValueError("no bundles to reconstruct from")
    n = len(bundles[0].x_bits)
    side = 2**n
    if len(bundles) != side * side:
        raise ValueError(f"expected {side * side} bundles for n={n}, got {len(bundles)}")
    pixels = [-1] * (side * side)
    for bundle in bundles:
        x, y, value = reconstruct_pixel(bundle)
        if not (0 <= x < side and 0 <= y < side):
            raise ValueError(f"reconstructed coordinate ({x}, {y}) outside the raster")
        pixels[x * side + y] = value
    if any(p < 0 for p in pixels):
        raise ValueError("reconstructed coordinates collide; raster left incomplete")
    return GrayImage(n, tuple(pixels))


def bundle_mismatches(bundles: list[PixelShareBundle]) -> list[tuple[int, int]]:
    """Coordinates whose reconstruction disagrees with the declared share."""
    bad = []
    for bundle in bundles:
        if reconstruct_pixel(bundle) != (
            int(bundle.x_bits, 2),
            int(bundle.y_bits, 2),
            int(bundle.intensity_bits, 2),
        ):
            bad.append((int(bundle.x_bits, 2), int(bundle.y_bits, 2)))
    return bad


# -- plain-text PGM (P2) fixtures -------------------------------------------


def write_pgm(img: GrayImage, path: str | Path) -> None:
    """Write a plain-text P2 file with maximum gray value 255."""
    lines = [f"P2", f"{img.side} {img.side}", "255"]
    lines += [" ".join(str(v) for v in row) for row in img.to_rows()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_pgm(path: str | Path) -> GrayImage:
    """Read a plain-text P2 file; the raster must be square with side 2**n."""
    tokens = []
    for line in Path(path).read_text().splitlines():
        stripped = line.split("#", 1)[0]
        tokens.extend(stripped.split())
    if not tokens or tokens[0] != "P2":
        raise ValueError(f"{path}: not a plain-text P2 file")
    try:
        width, height, maxval = (int(t) for t in tokens[1:4])
        values = [int(t) for t in tokens[4:]]
    except (ValueError, IndexError) as exc:
        raise ValueError(f"{path}: malformed PGM header or payload") from exc
    if maxval != 255:
        raise ValueError(f"{path}: maximum gray value must be 255, got {maxval}")
    if width != height:
        raise ValueError(f"{path}: raster must be square, got {width}x{height}")
    n = width.bit_length() - 1
    if width < 2 or 2**n != width:
        raise ValueError(f"{path}: side must be a power of two >= 2, got {width}")
    if len(values) != width * height:
        raise ValueError(f"{path}: expected {width * height} pixels, got {len(values)}")
    return GrayImage(n, tuple(values))
