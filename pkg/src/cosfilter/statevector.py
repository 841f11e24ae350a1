"""Dense complex statevector engine.

States are value-like wrappers around a 2^n complex amplitude array in
little-endian qubit order. Filtered states are deliberately unnormalized;
operations that need a normalized input say so.

cos(H dt)|psi> and sin(H dt)|psi> are evaluated by even/odd truncated Taylor
series of repeated H-matvecs on the traceless part, with the identity offset
folded in exactly through the angle-addition formulas. This keeps the series
regime governed by sum|alpha_n| * dt alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional
import struct

import numpy as np

from . import kernels
from .errors import (
    DimensionMismatch,
    SeriesNonConvergence,
    SeriesRegimeError,
    TooLarge,
    ZeroNorm,
)
from .pauli import Hamiltonian, PauliString, SpectralInfo

MAX_QUBITS = 26
SERIES_RTOL = 1e-13
SERIES_MAX_TERMS = 200
_SQRT_HALF = 2.0**-0.5
_HADAMARD = np.array([[_SQRT_HALF, _SQRT_HALF], [_SQRT_HALF, -_SQRT_HALF]], dtype=np.complex128)

STATE_DUMP_MAGIC = b"CSKV1"


@dataclass
class StateVector:
    n_qubits: int
    amps: np.ndarray

    def __post_init__(self):
        self.amps = np.ascontiguousarray(self.amps, dtype=np.complex128)
        if self.amps.shape != (1 << self.n_qubits,):
            raise DimensionMismatch(
                f"expected {1 << self.n_qubits} amplitudes, got {self.amps.shape}"
            )

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n < 1e-14:
            raise ZeroNorm("cannot normalize a zero state")
        return StateVector(self.n_qubits, self.amps / n)

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amps.copy())

    def scaled(self, factor: complex) -> "StateVector":
        return StateVector(self.n_qubits, self.amps * factor)


def _check_size(n: int):
    if not 1 <= n <= MAX_QUBITS:
        raise TooLarge(f"statevector size n={n} outside 1..{MAX_QUBITS}")


def zero_state(n: int) -> StateVector:
    _check_size(n)
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n, amps)


def plus_state(n: int) -> StateVector:
    _check_size(n)
    amps = np.full(1 << n, 2.0 ** (-n / 2.0), dtype=np.complex128)
    return StateVector(n, amps)


def basis_state(n: int, index: int) -> StateVector:
    _check_size(n)
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(n, amps)


# -- gates -------------------------------------------------------------------


@dataclass(frozen=True)
class Gate:
    """One of H, Rx, Ry, Rz, CNOT, PauliRotation(P, theta).

    Rotations implement exp(-i theta A / 2) for their axis A; PauliRotation
    generalizes this to an arbitrary Pauli string.
    """

    kind: str
    qubits: tuple[int, ...]
    angle: float = 0.0
    pauli: Optional[PauliString] = None

    @classmethod
    def h(cls, q: int) -> "Gate":
        return cls("H", (q,))

    @classmethod
    def rx(cls, q: int, angle: float) -> "Gate":
        return cls("Rx", (q,), angle)

    @classmethod
    def ry(cls, q: int, angle: float) -> "Gate":
        return cls("Ry", (q,), angle)

    @classmethod
    def rz(cls, q: int, angle: float) -> "Gate":
        return cls("Rz", (q,), angle)

    @classmethod
    def cnot(cls, control: int, target: int) -> "Gate":
        if control == target:
            raise ValueError("CNOT control and target must differ")
        return cls("CNOT", (control, target))

    @classmethod
    def pauli_rotation(cls, pauli: PauliString, angle: float) -> "Gate":
        return cls("PauliRotation", (), angle, pauli)


def _rotation_matrix(kind: str, angle: float) -> np.ndarray:
    c = np.cos(angle / 2.0)
    s = np.sin(angle / 2.0)
    if kind == "Rx":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if kind == "Ry":
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if kind == "Rz":
        return np.array([[c - 1j * s, 0.0], [0.0, c + 1j * s]], dtype=np.complex128)
    raise ValueError(f"unknown rotation {kind}")


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    out = state.copy()
    apply_gate_inplace(out, gate)
    return out


def apply_gate_inplace(state: StateVector, gate: Gate) -> None:
    for q in gate.qubits:
        if not 0 <= q < state.n_qubits:
            raise DimensionMismatch(f"gate qubit {q} outside register")
    if gate.kind == "H":
        kernels.apply_single_qubit(state.amps, gate.qubits[0], _HADAMARD)
    elif gate.kind in ("Rx", "Ry", "Rz"):
        kernels.apply_single_qubit(
            state.amps, gate.qubits[0], _rotation_matrix(gate.kind, gate.angle)
        )
    elif gate.kind == "CNOT":
        kernels.apply_cnot(state.amps, gate.qubits[0], gate.qubits[1])
    elif gate.kind == "PauliRotation":
        p = gate.pauli
        if p.n_qubits != state.n_qubits:
            raise DimensionMismatch("PauliRotation register size mismatch")
        c = np.cos(gate.angle / 2.0)
        s = np.sin(gate.angle / 2.0)
        rotated = c * state.amps + (-1j * s) * kernels.pauli_apply(
            state.amps, p.x_mask, p.z_mask, p.weight_factor
        )
        state.amps[:] = rotated
    else:
        raise ValueError(f"unknown gate kind {gate.kind}")


def apply_pauli(state: StateVector, p: PauliString) -> StateVector:
    """P|state> for a bare Pauli string."""
    if p.n_qubits != state.n_qubits:
        raise DimensionMismatch("Pauli register size mismatch")
    return StateVector(
        state.n_qubits, kernels.pauli_apply(state.amps, p.x_mask, p.z_mask, p.weight_factor)
    )


# -- expectations and overlaps ------------------------------------------------


def expectation(ham: Hamiltonian, state: StateVector) -> float:
    """<psi|H|psi> / <psi|psi>; tolerates unnormalized (filtered) input."""
    if ham.n_qubits != state.n_qubits:
        raise DimensionMismatch("Hamiltonian register size mismatch")
    nrm2 = float(np.vdot(state.amps, state.amps).real)
    if nrm2 < 1e-28:
        raise ZeroNorm("expectation of a zero-norm state")
    return ham.expectation_of_amps(state.amps) / nrm2


def pauli_expectation(p: PauliString, state: StateVector) -> float:
    """<psi|P|psi> / <psi|psi> for a single Pauli string."""
    if p.n_qubits != state.n_qubits:
        raise DimensionMismatch("Pauli register size mismatch")
    nrm2 = float(np.vdot(state.amps, state.amps).real)
    if nrm2 < 1e-28:
        raise ZeroNorm("expectation of a zero-norm state")
    return kernels.pauli_expectation(state.amps, p.x_mask, p.z_mask, p.weight_factor) / nrm2


def overlap(a: StateVector, b: StateVector) -> complex:
    if a.n_qubits != b.n_qubits:
        raise DimensionMismatch("overlap of different-size registers")
    return complex(np.vdot(a.amps, b.amps))


def fidelity_to_ground_space(state: StateVector, info: SpectralInfo) -> float:
    """Squared norm of the projection of the normalized state onto the
    (possibly degenerate) ground eigenspace."""
    amps = state.normalized().amps
    coeffs = info.ground_space.conj().T @ amps
    return float(np.sum(np.abs(coeffs) ** 2))


# -- cos/sin propagator --------------------------------------------------------


def apply_cos_sin(ham: Hamiltonian, dt: float, state: StateVector) -> tuple[StateVector, StateVector]:
    """(cos(H dt)|psi>, sin(H dt)|psi>) by truncated Taylor series.

    Guarantees ||cos||^2 + ||sin||^2 = ||psi||^2 to series precision, since
    the pair is the ancilla split of the unitary exp(-i H (x) Y dt).
    """
    if ham.n_qubits != state.n_qubits:
        raise DimensionMismatch("Hamiltonian register size mismatch")
    if dt < 0:
        raise SeriesRegimeError("dt must be nonnegative")
    bound = ham.abs_coeff_sum() * dt
    if bound > np.pi + 1e-9:
        raise SeriesRegimeError(
            f"sum|alpha| * dt = {bound:.4f} exceeds pi; shrink dt or shift less"
        )
    psi = state.amps
    ref = float(np.linalg.norm(psi))
    if ref == 0.0:
        return StateVector(state.n_qubits, psi.copy()), StateVector(
            state.n_qubits, np.zeros_like(psi)
        )
    cos_acc = psi.copy()
    sin_acc = np.zeros_like(psi)
    v = psi.copy()
    below = 0
    converged = False
    for j in range(1, SERIES_MAX_TERMS + 1):
        v = ham.matvec(v, include_offset=False) * (dt / j)
        term_norm = float(np.linalg.norm(v))
        if j % 2 == 1:
            sign = -1.0 if (j // 2) % 2 else 1.0
            sin_acc += sign * v
        else:
            sign = -1.0 if (j // 2) % 2 else 1.0
            cos_acc += sign * v
        below = below + 1 if term_norm < SERIES_RTOL * ref else 0
        if below >= 2:
            converged = True
            break
    if not converged and ref > 0.0:
        raise SeriesNonConvergence(f"cos/sin series not converged in {SERIES_MAX_TERMS} terms")
    phase = ham.identity_offset * dt
    c, s = np.cos(phase), np.sin(phase)
    cos_part = c * cos_acc - s * sin_acc
    sin_part = s * cos_acc + c * sin_acc
    return StateVector(state.n_qubits, cos_part), StateVector(state.n_qubits, sin_part)


# -- projection ---------------------------------------------------------------


def project_qubit(state: StateVector, q: int, outcome: int) -> tuple[StateVector, float]:
    """Zero out amplitudes with bit q != outcome.

    Returns the UNNORMALIZED survivor and its squared norm (the outcome
    probability for a normalized input). Zero probability is reported, not
    raised; the caller decides.
    """
    if not 0 <= q < state.n_qubits:
        raise DimensionMismatch(f"qubit {q} outside register")
    if outcome not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    j = np.arange(state.amps.shape[0], dtype=np.uint64)
    keep = ((j >> np.uint64(q)) & np.uint64(1)) == np.uint64(outcome)
    projected = np.where(keep, state.amps, 0.0)
    probability = float(np.linalg.norm(projected) ** 2)
    return StateVector(state.n_qubits, projected), probability


# -- binary dump ----------------------------------------------------------------


def save_state(state: StateVector, path) -> None:
    """Binary dump: magic "CSKV1", u32 n_qubits, then (re, im) f64 pairs, all
    little-endian."""
    with open(path, "wb") as fh:
        fh.write(STATE_DUMP_MAGIC)
        fh.write(struct.pack("<I", state.n_qubits))
        interleaved = np.empty(2 * state.amps.shape[0], dtype="<f8")
        interleaved[0::2] = state.amps.real
        interleaved[1::2] = state.amps.imag
        fh.write(interleaved.tobytes())


def load_state(path) -> StateVector:
    with open(path, "rb") as fh:
        magic = fh.read(5)
        if magic != STATE_DUMP_MAGIC:
            raise ValueError(f"bad state dump magic {magic!r}")
        (n,) = struct.unpack("<I", fh.read(4))
        raw = np.frombuffer(fh.read(), dtype="<f8")
    if raw.shape[0] != 2 << n:
        raise ValueError("truncated state dump")
    amps = raw[0::2] + 1j * raw[1::2]
    return StateVector(n, amps)
