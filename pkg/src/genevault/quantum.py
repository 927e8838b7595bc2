"""Exact two-qubit state-vector simulation of the entangled transfer channel.

Each nucleotide maps to a two-bit code (A=00, T=01, G=10, C=11); the sender
prepares the matching computational basis state, entangles it into a Bell
state with Hadamard-then-CNOT, and ships it. The receiver undoes the circuit
(CNOT, then Hadamard on the first qubit) and measures: an untouched Bell
state decodes to its basis state with probability 1, while any intermediate
measurement collapses the superposition and randomizes half of the decodes.
That disturbance is the tamper-evidence mechanism simulated here.

States are pure complex vectors; basis order is |00>, |01>, |10>, |11> with
the first qubit as the left (most significant) bit. Randomness comes from a
seeded generator, so every run is reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sequence_io import LiteralSequence

NORM_TOL = 1e-10
PRODUCT_TOL = 1e-10

#: Fixed bijection between bases and two-bit codes (basis indices).
BASE_TO_CODE = {"A": 0, "T": 1, "G": 2, "C": 3}
CODE_TO_BASE = "ATGC"


class NonUnitaryGate(ValueError):
    pass


class NotNormalized(ValueError):
    pass


def _check_normalized(amp: np.ndarray) -> np.ndarray:
    amp = np.asarray(amp, dtype=np.complex128).copy()
    norm_sq = float(np.sum(np.abs(amp) ** 2))
    if abs(norm_sq - 1.0) > NORM_TOL:
        raise NotNormalized(f"squared amplitudes sum to {norm_sq}, not 1")
    amp.setflags(write=False)
    return amp


def _amp_str(amp: np.ndarray) -> str:
    return " ".join(f"{z.real:.12g}{z.imag:+.12g}i" for z in amp)


@dataclass(frozen=True, eq=False)
class Qubit:
    """alpha|0> + beta|1> with |alpha|^2 + |beta|^2 = 1."""

    amp: np.ndarray

    def __post_init__(self):
        if np.shape(self.amp) != (2,):
            raise ValueError("qubit needs exactly 2 amplitudes")
        object.__setattr__(self, "amp", _check_normalized(self.amp))

    def __str__(self) -> str:
        return _amp_str(self.amp)


@dataclass(frozen=True, eq=False)
class TwoQubitState:
    """Amplitudes over |00>, |01>, |10>, |11>, in that order."""

    amp: np.ndarray

    def __post_init__(self):
        if np.shape(self.amp) != (4,):
            raise ValueError("two-qubit state needs exactly 4 amplitudes")
        object.__setattr__(self, "amp", _check_normalized(self.amp))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amp) ** 2

    def __str__(self) -> str:
        return _amp_str(self.amp)


@dataclass(frozen=True, eq=False)
class Ququart:
    """A 4-level state over |A>, |T>, |G>, |C>: one superposed sequence position."""

    amp: np.ndarray

    def __post_init__(self):
        if np.shape(self.amp) != (4,):
            raise ValueError("ququart needs exactly 4 amplitudes")
        object.__setattr__(self, "amp", _check_normalized(self.amp))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amp) ** 2

    def __str__(self) -> str:
        return _amp_str(self.amp)


class Gate:
    """A unitary matrix operator; non-unitary input is rejected at build time."""

    def __init__(self, matrix: np.ndarray, name: str = ""):
        matrix = np.asarray(matrix, dtype=np.complex128)
        if matrix.shape not in ((2, 2), (4, 4)):
            raise ValueError("gates are 2x2 or 4x4")
        if not np.allclose(matrix.conj().T @ matrix, np.eye(matrix.shape[0]), atol=NORM_TOL):
            raise NonUnitaryGate(f"{name or 'gate'} is not unitary")
        matrix.setflags(write=False)
        self.matrix = matrix
        self.name = name

    @property
    def arity(self) -> int:
        return 1 if self.matrix.shape == (2, 2) else 2

    def __repr__(self) -> str:
        return f"Gate({self.name or self.matrix.tolist()})"


_SQRT1_2 = 1.0 / np.sqrt(2.0)
H = Gate(np.array([[1, 1], [1, -1]]) * _SQRT1_2, "H")
X = Gate(np.array([[0, 1], [1, 0]]), "X")
Z = Gate(np.array([[1, 0], [0, -1]]), "Z")
CNOT = Gate(
    np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]),
    "CNOT",
)

_I2 = np.eye(2, dtype=np.complex128)


def basis_state(index: int) -> TwoQubitState:
    amp = np.zeros(4, dtype=np.complex128)
    amp[index] = 1.0
    return TwoQubitState(amp)


def bloch(theta: float, phi: float = 0.0) -> Qubit:
    """Qubit at Bloch angles: cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>."""
    return Qubit(np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)]))


def tensor(q1: Qubit, q2: Qubit) -> TwoQubitState:
    """Product state of two qubits; q1 is the first (left) qubit."""
    return TwoQubitState(np.kron(q1.amp, q2.amp))


def apply1(gate: Gate, state: TwoQubitState, which: str) -> TwoQubitState:
    """Apply a single-qubit gate to the first or second qubit of a pair."""
    if gate.arity != 1:
        raise ValueError("apply1 takes a single-qubit gate")
    if which == "first":
        full = np.kron(gate.matrix, _I2)
    elif which == "second":
        full = np.kron(_I2, gate.matrix)
    else:
        raise ValueError("which must be 'first' or 'second'")
    return TwoQubitState(full @ state.amp)


def apply2(gate: Gate, state: TwoQubitState) -> TwoQubitState:
    if gate.arity != 2:
        raise ValueError("apply2 takes a two-qubit gate")
    return TwoQubitState(gate.matrix @ state.amp)


_ENCODE_MATRIX = CNOT.matrix @ np.kron(H.matrix, _I2)
_DECODE_MATRIX = np.kron(H.matrix, _I2) @ CNOT.matrix

#: The four Bell states, indexed by the basis code they are built from.
BELL_STATES = tuple(TwoQubitState(_ENCODE_MATRIX[:, k].copy()) for k in range(4))


def bell_encode(base: str) -> TwoQubitState:
    """Entangle a base's code state |ij> into Bell_ij (H on first, then CNOT)."""
    try:
        code = BASE_TO_CODE[base]
    except KeyError:
        raise ValueError(f"base must be one of ATGC, got {base!r}") from None
    return BELL_STATES[code]


def bell_decode(state: TwoQubitState) -> TwoQubitState:
    """Undo the entangling circuit: CNOT, then H on the first qubit.

    An intact Bell_ij input returns exactly |ij>, so the measurement after
    decoding is deterministic; anything else leaves residual superposition.
    """
    return TwoQubitState(_DECODE_MATRIX @ state.amp)


def _draw(probs: np.ndarray, rng: np.random.Generator) -> int:
    total = probs.sum()
    r = rng.random() * total
    acc = 0.0
    for k in range(len(probs) - 1):
        acc += probs[k]
        if r < acc:
            return k
    return len(probs) - 1


def measure(state: TwoQubitState, rng: np.random.Generator) -> tuple[int, TwoQubitState]:
    """Projective measurement in the computational basis.

    Returns the observed basis index and the collapsed state |k>; every
    other contribution in the superposition is destroyed.
    """
    k = _draw(state.probabilities(), rng)
    return k, basis_state(k)


def measure_ququart(q: Ququart, rng: np.random.Generator) -> str:
    """Measure a ququart; each base comes up with probability |amp|^2."""
    return CODE_TO_BASE[_draw(q.probabilities(), rng)]


def is_product(state: TwoQubitState) -> bool:
    """True iff the state is a tensor product of two qubits.

    The amplitudes reshaped to 2x2 have zero determinant exactly for product
    states; a nonzero determinant marks entanglement (all four Bell states).
    """
    a = state.amp
    return abs(a[0] * a[3] - a[1] * a[2]) <= PRODUCT_TOL


def decode_base(state: TwoQubitState) -> tuple[str | None, float]:
    """Decode and report (base, probability concentration).

    Concentration below 1 means the decoded state is not a single basis
    state; for a receiver that is the tamper signal.
    """
    probs = bell_decode(state).probabilities()
    k = int(np.argmax(probs))
    concentration = float(probs[k])
    base = CODE_TO_BASE[k] if concentration >= 1.0 - 1e-9 else None
    return base, concentration


@dataclass(frozen=True)
class TransferReport:
    """Outcome of pushing a sequence through the simulated quantum channel."""

    bases_sent: int
    intercepted_count: int
    mismatches: int

    @property
    def detection_rate(self) -> float:
        if self.intercepted_count == 0:
            return 0.0
        return self.mismatches / self.intercepted_count

    def to_text(self) -> str:
        return (
            f"bases_sent: {self.bases_sent}\n"
            f"intercepted_count: {self.intercepted_count}\n"
            f"mismatches: {self.mismatches}\n"
            f"detection_rate: {self.detection_rate:.6f}\n"
        )


def simulate_transfer(
    seq: LiteralSequence,
    eve: float | None = None,
    seed: int = 0,
) -> TransferReport:
    """Send every base as a Bell state, optionally through an eavesdropper.

    With interception probability `eve`, the eavesdropper measures the pair
    in the computational basis (she lacks the decode circuit) and forwards
    the collapsed state. The receiver decodes and measures; a decoded base
    differing from the sent base counts as a detected tamper. Without an
    eavesdropper every base decodes correctly.
    """
    if eve is not None and not 0.0 <= eve <= 1.0:
        raise ValueError("interception probability must be in [0, 1]")
    rng = np.random.default_rng(seed)
    intercepted = 0
    mismatches = 0
    basis_amps = np.eye(4, dtype=np.complex128)
    for base in seq.bases:
        amp = BELL_STATES[BASE_TO_CODE[base]].amp
        if eve is not None and rng.random() < eve:
            k = _draw(np.abs(amp) ** 2, rng)
            amp = basis_amps[k]
            intercepted += 1
        decoded = _DECODE_MATRIX @ amp
        outcome = _draw(np.abs(decoded) ** 2, rng)
        if CODE_TO_BASE[outcome] != base:
            mismatches += 1
    return TransferReport(len(seq.bases), intercepted, mismatches)
