"""State recording: store the filtered state in a variational circuit every
C steps so post-selection cost stops compounding across segments.

Three modes:
  * full      - maximize overlap fidelity with the filtered segment target;
  * reduced-co - match thresholded Pauli expectations (diagonal problems);
  * reduced-mb - match a random subset of Pauli expectations (many-body),
                 with a per-repetition sampling-ratio schedule.

Every commit replaces the running state by the circuit state V(omega)|ref>,
whose norm is exactly 1; the segment's accumulated post-selection probability
is reported on the commit row and the next segment starts fresh.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import FidelityBelowFloor, NonDiagonalHamiltonian, TooLarge
from .filtering import (
    EvolutionTrace,
    ResolvedEvolution,
    TraceRow,
    apply_u_nh,
    attach_ancillas,
    nh_step,
    resolve_evolution,
    FilterConfig,
)
from .optimize import MinimizeResult, OptimizerConfig, minimize
from .pauli import Hamiltonian
from .statevector import (
    StateVector,
    apply_gate_inplace,
    expectation,
    fidelity_to_ground_space,
    overlap,
    pauli_expectation,
    project_qubit,
    zero_state,
)
from .variational import AnsatzSpec, ansatz_apply, ansatz_gates, inverse_gates

RECORD_MODES = ("full", "reduced-co", "reduced-mb")


@dataclass
class RecordingConfig:
    segment_steps: int  # C: filter steps per segment
    repetitions: int  # number of record commits
    ansatz: AnsatzSpec
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    mode: str = "full"
    c_b: float = 0.5  # reduced-co confidence bound
    c_r_schedule: tuple[float, ...] = ()  # reduced-mb sampling ratios, one per repetition
    eta: float = 0.1
    dt: Optional[float] = None  # None: shift + dt* as in FilterConfig
    margin: float = 1e-3
    loss: str = "squared"  # "squared" | "absolute" expectation-matching loss
    local_loss: bool = False  # full mode: per-qubit |0> marginals instead of global overlap
    fidelity_floor: float = 0.9

    def __post_init__(self):
        if self.segment_steps < 1:
            raise ValueError("segment_steps must be >= 1")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.mode not in RECORD_MODES:
            raise ValueError(f"mode must be one of {RECORD_MODES}")
        if self.mode == "reduced-co" and not 0 < self.c_b < 1:
            raise ValueError("c_b must lie in (0, 1)")
        if self.mode == "reduced-mb":
            if len(self.c_r_schedule) != self.repetitions:
                raise ValueError("c_r_schedule length must equal repetitions")
            if any(not 0 < r <= 1 for r in self.c_r_schedule):
                raise ValueError("each c_r must lie in (0, 1]")
        if not 0 < self.eta < 1:
            raise ValueError("eta must lie in (0, 1)")
        if self.loss not in ("squared", "absolute"):
            raise ValueError("loss must be 'squared' or 'absolute'")

    def filter_config(self, total_steps: int) -> FilterConfig:
        return FilterConfig(
            max_steps=total_steps, dt=self.dt, margin=self.margin, eta=self.eta
        )


class SegmentLength(NamedTuple):
    steps: int
    warning: bool  # the very first step already fell to or below eta
    capped: bool


def segment_length_for_eta(
    psi0: StateVector,
    h_shifted: Hamiltonian,
    dt: float,
    eta: float,
    cap: int = 1000,
) -> SegmentLength:
    """Largest C with ||cos^C(H' dt)|psi0>|| > eta, at least 1, at most cap."""
    if not 0 < eta < 1:
        raise ValueError("eta must lie in (0, 1)")
    state = psi0.copy()
    steps = 0
    while steps < cap:
        state, _ = nh_step(state, h_shifted, dt)
        if state.norm() <= eta:
            if steps == 0:
                return SegmentLength(1, True, False)
            return SegmentLength(steps, False, False)
        steps += 1
    return SegmentLength(cap, False, True)


def threshold_correlations(values, c_b: float) -> list[float]:
    """Snap confident expectations to their sign: -1 below -c_b, +1 above c_b."""
    out = []
    for v in values:
        if abs(v) > 1 + 1e-9:
            raise ValueError(f"expectation {v} outside [-1, 1]")
        if v <= -c_b:
            out.append(-1.0)
        elif v >= c_b:
            out.append(1.0)
        else:
            out.append(float(v))
    return out


@dataclass
class RecordResult:
    params: np.ndarray
    fidelity: float
    optimizer: MinimizeResult


def full_record_segment(
    ansatz: AnsatzSpec,
    omega: np.ndarray,
    h_shifted: Hamiltonian,
    dt: float,
    segment_steps: int,
    opt: OptimizerConfig,
    reference: Optional[StateVector] = None,
    local_loss: bool = False,
    fidelity_floor: float = 0.9,
) -> RecordResult:
    """One full-state recording update.

    The target is the normalized C-step filtered image of the currently
    recorded state V(omega)|ref>; the update maximizes the squared overlap
    of V(omega + domega)|ref> with it, warm-started at domega = 0.
    """
    if reference is None:
        reference = zero_state(ansatz.n_qubits)
    current = ansatz_apply(ansatz, omega, reference)
    target = current
    for _ in range(segment_steps):
        target, _ = nh_step(target, h_shifted, dt)
    target = target.normalized()

    if local_loss:

        def objective(domega: np.ndarray) -> float:
            back = target.copy()
            for gate in inverse_gates(ansatz_gates(ansatz, omega + domega)):
                apply_gate_inplace(back, gate)
            loss = 0.0
            for q in range(ansatz.n_qubits):
                _, p0 = project_qubit(back, q, 0)
                loss += 1.0 - p0
            return loss

    else:

        def objective(domega: np.ndarray) -> float:
            candidate = ansatz_apply(ansatz, omega + domega, reference)
            return 1.0 - abs(overlap(candidate, target)) ** 2

    result = minimize(objective, np.zeros(ansatz.param_count), opt)
    new_params = omega + result.x
    achieved = abs(overlap(ansatz_apply(ansatz, new_params, reference), target)) ** 2
    if achieved < fidelity_floor:
        raise FidelityBelowFloor(
            f"recording fidelity {achieved:.4f} below floor {fidelity_floor}"
        )
    return RecordResult(new_params, achieved, result)


def recording_fidelity_projector(
    ansatz: AnsatzSpec,
    omega: np.ndarray,
    domega: np.ndarray,
    h_shifted: Hamiltonian,
    dt: float,
    segment_steps: int,
    reference: Optional[StateVector] = None,
) -> float:
    """Measurement-protocol form of the recording fidelity.

    Builds Psi = Vdag(omega+domega) U_NH^C V(omega)|ref>|0^C> with explicit
    ancillas and returns <Psi|P_A P_S|Psi> / <Psi|P_A|Psi>, the projective
    readout that equals the direct statevector overlap. Verification path
    only (C <= 4, n <= 5): the projector onto |0^n> assumes ref = |0...0>.
    """
    n = ansatz.n_qubits
    if segment_steps > 4 or n > 5:
        raise TooLarge("projector cross-check caps at C <= 4, n <= 5")
    if reference is None:
        reference = zero_state(n)
    state = ansatz_apply(ansatz, omega, reference)
    joint = attach_ancillas(state, segment_steps)
    ham_emb = h_shifted.embed(n + segment_steps)
    for i in range(segment_steps):
        joint = apply_u_nh(joint, ham_emb, dt, n + i)
    for gate in inverse_gates(ansatz_gates(ansatz, omega + domega)):
        apply_gate_inplace(joint, gate)
    # P_A: every ancilla to |0>
    anc_projected = joint
    for i in range(segment_steps):
        anc_projected, _ = project_qubit(anc_projected, n + i, 0)
    p_a = anc_projected.norm() ** 2
    # P_S on top: every system qubit to |0>
    both = anc_projected
    for q in range(n):
        both, _ = project_qubit(both, q, 0)
    p_as = both.norm() ** 2
    return p_as / p_a


# -- run drivers -----------------------------------------------------------------


def full_record_run(
    psi0: StateVector, ham: Hamiltonian, cfg: RecordingConfig
) -> EvolutionTrace:
    """Algorithm: filter C steps, re-record into the circuit, repeat.

    `psi0` is the recorder's reference state (normally |0...0>); the run's
    physical initial state is V(0)|psi0>.
    """
    if cfg.mode != "full":
        raise ValueError("full_record_run requires mode='full'")
    return _record_run(psi0, ham, cfg, seed=None)


def reduced_record_co(
    psi0: StateVector, ham: Hamiltonian, cfg: RecordingConfig
) -> EvolutionTrace:
    """Reduced recording for diagonal (combinatorial) problems.

    Matches every Pauli expectation of the Hamiltonian after snapping
    confident values to +/-1 with the c_b bound.
    """
    if cfg.mode != "reduced-co":
        raise ValueError("reduced_record_co requires mode='reduced-co'")
    if not ham.is_diagonal:
        raise NonDiagonalHamiltonian("reduced-co recording needs a Z-only Hamiltonian")
    return _record_run(psi0, ham, cfg, seed=None)


def reduced_record_mb(
    psi0: StateVector, ham: Hamiltonian, cfg: RecordingConfig, seed: int = 0
) -> EvolutionTrace:
    """Reduced recording for many-body problems: match a random sample of
    ceil(c_r * N_h) distinct Pauli expectations per repetition."""
    if cfg.mode != "reduced-mb":
        raise ValueError("reduced_record_mb requires mode='reduced-mb'")
    return _record_run(psi0, ham, cfg, seed=seed)


def _matching_loss(cfg: RecordingConfig, predicted: np.ndarray, targets: np.ndarray) -> float:
    diffs = predicted - targets
    if cfg.loss == "squared":
        return float(np.sum(diffs * diffs))
    return float(np.sum(np.abs(diffs)))


def _record_run(
    psi0: StateVector, ham: Hamiltonian, cfg: RecordingConfig, seed: Optional[int]
) -> EvolutionTrace:
    res = resolve_evolution(ham, cfg.filter_config(cfg.segment_steps * cfg.repetitions))
    rng = np.random.default_rng(seed) if seed is not None else None
    omega = np.zeros(cfg.ansatz.param_count)
    recorded = ansatz_apply(cfg.ansatz, omega, psi0)
    trace = EvolutionTrace(recording_columns=True)
    trace.append(
        TraceRow(
            step=0,
            energy=expectation(res.ham, recorded),
            norm=recorded.norm(),
            success_prob=1.0,
            ground_fidelity=fidelity_to_ground_space(recorded, res.info),
        )
    )
    step = 0
    for rep in range(1, cfg.repetitions + 1):
        seg_state = recorded
        for c in range(1, cfg.segment_steps + 1):
            seg_state, _ = nh_step(seg_state, res.evolved, res.dt)
            step += 1
            if c < cfg.segment_steps:
                nrm = seg_state.norm()
                trace.append(
                    TraceRow(
                        step=step,
                        energy=expectation(res.ham, seg_state),
                        norm=nrm,
                        success_prob=nrm * nrm,
                        ground_fidelity=fidelity_to_ground_space(seg_state, res.info),
                        segment_index=rep,
                    )
                )
        segment_prob = seg_state.norm() ** 2
        c_r_used: Optional[float] = None
        if cfg.mode == "full":
            result = full_record_segment(
                cfg.ansatz,
                omega,
                res.evolved,
                res.dt,
                cfg.segment_steps,
                cfg.optimizer,
                reference=psi0,
                local_loss=cfg.local_loss,
                fidelity_floor=cfg.fidelity_floor,
            )
            omega = result.params
            metric = result.fidelity
        else:
            if cfg.mode == "reduced-co":
                strings = [t.string for t in ham.terms]
                measured = [pauli_expectation(s, seg_state) for s in strings]
                targets = np.array(threshold_correlations(measured, cfg.c_b))
            else:
                n_h = len(ham.terms)
                c_r_used = float(cfg.c_r_schedule[rep - 1])
                n_r = math.ceil(c_r_used * n_h)
                idx = np.sort(rng.choice(n_h, size=n_r, replace=False))
                strings = [ham.terms[i].string for i in idx]
                targets = np.array([pauli_expectation(s, seg_state) for s in strings])

            def objective(candidate: np.ndarray) -> float:
                trial = ansatz_apply(cfg.ansatz, candidate, psi0)
                predicted = np.array([pauli_expectation(s, trial) for s in strings])
                return _matching_loss(cfg, predicted, targets)

            result = minimize(objective, omega, cfg.optimizer)
            omega = result.x
            metric = result.fun
        recorded = ansatz_apply(cfg.ansatz, omega, psi0)
        trace.append(
            TraceRow(
                step=step,
                energy=expectation(res.ham, recorded),
                norm=recorded.norm(),
                success_prob=segment_prob,
                ground_fidelity=fidelity_to_ground_space(recorded, res.info),
                segment_index=rep,
                record_metric=metric,
                c_r=c_r_used,
            )
        )
    return trace
