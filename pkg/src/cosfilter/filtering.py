"""Cosine-filter evolution drivers and their verification utilities.

One step multiplies the state by cos(H' dt) where H' is the positively
shifted Hamiltonian; the squared norm of the running (unnormalized) state is
exactly the cumulative probability of post-selecting the recycled ancilla in
|0> at every step so far.

Energies in traces are always expectations of the Hamiltonian that was handed
to the driver, so any shift added internally never leaks into reported
numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional, TextIO

import numpy as np

from .errors import TooLarge, ZeroNorm
from .pauli import Hamiltonian, PauliString, SpectralInfo, shift_and_timestep, spectral_info
from .statevector import (
    Gate,
    StateVector,
    apply_cos_sin,
    apply_gate_inplace,
    apply_pauli,
    expectation,
    fidelity_to_ground_space,
    project_qubit,
)

NORM_FLOOR = 1e-14
EXPLICIT_ANCILLA_MAX_STEPS = 8

CSV_BASE_HEADER = "step,energy,norm,success_prob,ground_fidelity"
CSV_RECORDING_SUFFIX = ",segment_index,record_metric,c_r"


@dataclass
class FilterConfig:
    """Driver knobs.

    dt = None lets the driver shift the Hamiltonian positive (by margin
    above zero) and choose dt* = (pi/2)/E'_max. An explicit dt means the
    caller already owns the shift: the Hamiltonian is evolved exactly as
    given.
    """

    max_steps: int
    dt: Optional[float] = None
    margin: float = 1e-3
    eta: float = 0.1

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.dt is not None and self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.margin <= 0:
            raise ValueError("margin must be positive")
        if not 0 < self.eta < 1:
            raise ValueError("eta must lie in (0, 1)")


@dataclass
class TraceRow:
    step: int
    energy: float
    norm: float
    success_prob: float
    ground_fidelity: float
    segment_index: Optional[int] = None
    record_metric: Optional[float] = None
    c_r: Optional[float] = None


@dataclass
class EvolutionTrace:
    rows: list[TraceRow] = field(default_factory=list)
    recording_columns: bool = False

    def append(self, row: TraceRow) -> None:
        if self.rows and row.step <= self.rows[-1].step:
            raise ValueError("trace steps must increase strictly")
        self.rows.append(row)

    def energies(self) -> np.ndarray:
        return np.array([r.energy for r in self.rows])

    def norms(self) -> np.ndarray:
        return np.array([r.norm for r in self.rows])

    def fidelities(self) -> np.ndarray:
        return np.array([r.ground_fidelity for r in self.rows])

    @property
    def final(self) -> TraceRow:
        return self.rows[-1]

    def steps_to_accuracy(self, ground_energy: float, rel: float = 0.01) -> Optional[int]:
        """First step whose energy is within rel of the ground energy.

        Uses |E - E_g| <= rel * |E_g| when E_g != 0 and |E| <= rel otherwise.
        """
        target = rel * abs(ground_energy) if ground_energy != 0.0 else rel
        for row in self.rows:
            if abs(row.energy - ground_energy) <= target:
                return row.step
        return None

    def write_csv(self, fh: TextIO) -> None:
        header = CSV_BASE_HEADER + (CSV_RECORDING_SUFFIX if self.recording_columns else "")
        fh.write(header + "\n")
        for r in self.rows:
            cells = [
                str(r.step),
                repr(r.energy),
                repr(r.norm),
                repr(r.success_prob),
                repr(r.ground_fidelity),
            ]
            if self.recording_columns:
                cells.append("" if r.segment_index is None else str(r.segment_index))
                cells.append("" if r.record_metric is None else repr(r.record_metric))
                cells.append("" if r.c_r is None else repr(r.c_r))
            fh.write(",".join(cells) + "\n")

    @classmethod
    def read_csv(cls, fh: TextIO) -> "EvolutionTrace":
        header = fh.readline().strip()
        if header == CSV_BASE_HEADER:
            recording = False
        elif header == CSV_BASE_HEADER + CSV_RECORDING_SUFFIX:
            recording = True
        else:
            raise ValueError(f"unrecognized trace header {header!r}")
        trace = cls(recording_columns=recording)
        for line in fh:
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            row = TraceRow(
                step=int(cells[0]),
                energy=float(cells[1]),
                norm=float(cells[2]),
                success_prob=float(cells[3]),
                ground_fidelity=float(cells[4]),
            )
            if recording:
                row.segment_index = int(cells[5]) if cells[5] else None
                row.record_metric = float(cells[6]) if cells[6] else None
                row.c_r = float(cells[7]) if cells[7] else None
            trace.rows.append(row)
        return trace


@dataclass
class ResolvedEvolution:
    """The operator a driver actually evolves under, plus reporting context."""

    ham: Hamiltonian  # as handed in; energies are reported against this
    evolved: Hamiltonian  # shifted operator the filter applies
    dt: float
    info: SpectralInfo  # spectrum of `ham`


def resolve_evolution(ham: Hamiltonian, config: FilterConfig) -> ResolvedEvolution:
    info = spectral_info(ham)
    if config.dt is None:
        evolved, dt = shift_and_timestep(ham, info, config.margin)
    else:
        evolved, dt = ham, config.dt
    return ResolvedEvolution(ham=ham, evolved=evolved, dt=dt, info=info)


def nh_step(state: StateVector, h_shifted: Hamiltonian, dt: float) -> tuple[StateVector, float]:
    """One filter application: cos(H' dt)|state>, unnormalized.

    The returned probability ||filtered||^2 / ||state||^2 is the chance of
    post-selecting the recycled ancilla in |0> for this step.
    """
    norm_in = state.norm()
    if norm_in < NORM_FLOOR:
        raise ZeroNorm("filter input has vanished")
    filtered, _ = apply_cos_sin(h_shifted, dt, state)
    norm_out = filtered.norm()
    if norm_out < NORM_FLOOR:
        raise ZeroNorm("filtered state collapsed below the norm floor")
    return filtered, (norm_out / norm_in) ** 2


def nh_evolve(psi0: StateVector, ham: Hamiltonian, config: FilterConfig) -> EvolutionTrace:
    """Pure cosine-filter run; M+1 rows, step 0 is the initial state."""
    res = resolve_evolution(ham, config)
    state = psi0.copy()
    trace = EvolutionTrace()
    trace.append(_trace_row(0, state, res))
    for m in range(1, config.max_steps + 1):
        state, _ = nh_step(state, res.evolved, res.dt)
        trace.append(_trace_row(m, state, res))
    return trace


def _trace_row(step: int, state: StateVector, res: ResolvedEvolution) -> TraceRow:
    nrm = state.norm()
    return TraceRow(
        step=step,
        energy=expectation(res.ham, state),
        norm=nrm,
        success_prob=nrm * nrm,
        ground_fidelity=fidelity_to_ground_space(state, res.info),
    )


# -- explicit-ancilla representation -----------------------------------------


def attach_ancillas(state: StateVector, count: int) -> StateVector:
    """|state> (x) |0...0> with `count` ancillas appended as high qubits."""
    n_total = state.n_qubits + count
    amps = np.zeros(1 << n_total, dtype=np.complex128)
    amps[: state.amps.shape[0]] = state.amps
    return StateVector(n_total, amps)


def apply_u_nh(state: StateVector, ham_embedded: Hamiltonian, dt: float, ancilla: int) -> StateVector:
    """exp(-i H (x) Y_ancilla dt) on the joint register.

    (H (x) Y)^2 = H^2 (x) I, so the propagator splits into
    cos(H dt) (x) I - i sin(H dt) (x) Y.
    """
    cos_part, sin_part = apply_cos_sin(ham_embedded, dt, state)
    y_term = apply_pauli(sin_part, PauliString.single(state.n_qubits, ancilla, "Y"))
    return StateVector(state.n_qubits, cos_part.amps - 1j * y_term.amps)


def explicit_filter_states(
    psi0: StateVector, ham: Hamiltonian, dt: float, steps: int
) -> list[StateVector]:
    """phi_0 .. phi_M on the (n + M)-qubit register, ancilla i on qubit n+i-1."""
    if steps > EXPLICIT_ANCILLA_MAX_STEPS:
        raise TooLarge(f"explicit-ancilla mode caps at {EXPLICIT_ANCILLA_MAX_STEPS} steps")
    n = psi0.n_qubits
    ham_emb = ham.embed(n + steps)
    states = [attach_ancillas(psi0, steps)]
    for i in range(1, steps + 1):
        states.append(apply_u_nh(states[-1], ham_emb, dt, n + i - 1))
    return states


def _ancilla_z(n_system: int, n_total: int, count: int) -> PauliString:
    mask = 0
    for i in range(count):
        mask |= 1 << (n_system + i)
    return PauliString(n_total, 0, mask)


def _pair_expectations(
    state: StateVector, ham_emb: Hamiltonian, z_string: PauliString
) -> tuple[float, float]:
    """(<phi|H Z_S|phi>, <phi|Z_S|phi>) for commuting H and Z_S."""
    z_amps = apply_pauli(state, z_string)
    num = float(np.vdot(state.amps, ham_emb.matvec(z_amps.amps)).real)
    den = float(np.vdot(state.amps, z_amps.amps).real)
    return num, den


def postprocess_energy(psi0: StateVector, ham: Hamiltonian, dt: float, steps: int) -> float:
    """Binomially weighted post-processing energy estimator.

    Valid for pure filter runs only (variational blocks break the
    time-translation symmetry the reduction relies on). Equals the
    post-selection energy of the step-M filtered state.
    """
    n = psi0.n_qubits
    states = explicit_filter_states(psi0, ham, dt, steps)
    ham_emb = ham.embed(n + steps)
    num = math.comb(steps, 0) * float(
        np.vdot(states[0].amps, ham_emb.matvec(states[0].amps)).real
    )
    den = math.comb(steps, 0) * float(np.vdot(states[0].amps, states[0].amps).real)
    for i in range(1, steps + 1):
        z_string = _ancilla_z(n, n + steps, i)
        term_num, term_den = _pair_expectations(states[i], ham_emb, z_string)
        num += math.comb(steps, i) * term_num
        den += math.comb(steps, i) * term_den
    return num / den


def postselected_energy_explicit(
    psi0: StateVector, ham: Hamiltonian, dt: float, steps: int
) -> float:
    """Full-projector estimator: project every ancilla of phi_M to |0>.

    Verification path for the binomial reduction; both must agree with the
    recycled-ancilla trace energy.
    """
    n = psi0.n_qubits
    state = explicit_filter_states(psi0, ham, dt, steps)[-1]
    for i in range(steps):
        state, _ = project_qubit(state, n + i, 0)
    return expectation(ham.embed(n + steps), state)


@dataclass
class TimeTranslationReport:
    residuals: dict[str, float]

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values()) if self.residuals else 0.0


def time_translation_check(
    psi0: StateVector,
    ham: Hamiltonian,
    dt: float,
    steps: int,
    block_gates: Optional[Iterable[Gate]] = None,
    block_after: int = 1,
) -> TimeTranslationReport:
    """Residuals of the identities that justify the binomial reduction.

    With `block_gates` a system-register circuit is inserted after step
    `block_after`, which breaks the invariance and makes the residuals O(1);
    this is the documented reason post-processing is restricted to pure runs.
    """
    if steps > 6:
        raise TooLarge("time-translation check caps at 6 steps")
    n = psi0.n_qubits
    ham_emb = ham.embed(n + steps)
    states = [attach_ancillas(psi0, steps)]
    for i in range(1, steps + 1):
        nxt = apply_u_nh(states[-1], ham_emb, dt, n + i - 1)
        if block_gates is not None and i == block_after:
            nxt = nxt.copy()
            for gate in block_gates:
                apply_gate_inplace(nxt, gate)
        states.append(nxt)

    residuals: dict[str, float] = {}
    phi_m = states[-1]

    def z_subset(ancillas: tuple[int, ...]) -> PauliString:
        mask = 0
        for a in ancillas:
            mask |= 1 << (n + a)
        return PauliString(n + steps, 0, mask)

    for size in range(1, steps + 1):
        ref_plain = ref_ham = None
        worst_plain = worst_ham = 0.0
        for subset in combinations(range(steps), size):
            num, den = _pair_expectations(phi_m, ham_emb, z_subset(subset))
            if ref_plain is None:
                ref_plain, ref_ham = den, num
            worst_plain = max(worst_plain, abs(den - ref_plain))
            worst_ham = max(worst_ham, abs(num - ref_ham))
        residuals[f"subset_symmetry_z_{size}"] = worst_plain
        residuals[f"subset_symmetry_hz_{size}"] = worst_ham
        # the final-state subset average must match the step-`size` prefix value
        num_s, den_s = _pair_expectations(
            states[size], ham_emb, z_subset(tuple(range(size)))
        )
        residuals[f"prefix_equivalence_z_{size}"] = abs(den_s - ref_plain)
        residuals[f"prefix_equivalence_hz_{size}"] = abs(num_s - ref_ham)

    # step invariance of the first-ancilla observable
    ref_plain = ref_ham = None
    worst_plain = worst_ham = 0.0
    for k in range(1, steps + 1):
        num, den = _pair_expectations(states[k], ham_emb, z_subset((0,)))
        if ref_plain is None:
            ref_plain, ref_ham = den, num
        worst_plain = max(worst_plain, abs(den - ref_plain))
        worst_ham = max(worst_ham, abs(num - ref_ham))
    residuals["step_invariance_z"] = worst_plain
    residuals["step_invariance_hz"] = worst_ham
    return TimeTranslationReport(residuals)


def required_steps_estimate(gap: float, overlap_bound: float, eps: float) -> int:
    """ceil((1/gap^2) ln^2(1/(chi * eps))): a reporting heuristic only.

    The underlying theory fixes the scaling, not the constant; never use
    this as a stopping rule.
    """
    if gap <= 0:
        raise ValueError("gap must be positive")
    if not 0 < overlap_bound <= 1:
        raise ValueError("overlap bound must lie in (0, 1]")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    return math.ceil((1.0 / gap**2) * math.log(1.0 / (overlap_bound * eps)) ** 2)
