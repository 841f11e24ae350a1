import io

import numpy as np
import pytest

from cosfilter.errors import ZeroNorm
from cosfilter.filtering import (
    EvolutionTrace,
    FilterConfig,
    TraceRow,
    attach_ancillas,
    apply_u_nh,
    explicit_filter_states,
    nh_evolve,
    nh_step,
    postprocess_energy,
    postselected_energy_explicit,
    required_steps_estimate,
    resolve_evolution,
    time_translation_check,
)
from cosfilter.pauli import Hamiltonian, PauliString, PauliTerm, spectral_info, shift_and_timestep
from cosfilter.statevector import (
    Gate,
    StateVector,
    fidelity_to_ground_space,
    plus_state,
    project_qubit,
    zero_state,
)

from conftest import dense_function_apply, random_hamiltonian, random_state_amps, safe_dt


def two_level():
    """H' = Z + 2I: |0> at energy 3, |1> at energy 1."""
    return Hamiltonian(1, [PauliTerm(1.0, PauliString.from_letters("Z"))], 2.0)


def test_nh_step_two_level_analytic():
    ham = two_level()
    dt = 0.45
    filtered, prob = nh_step(plus_state(1), ham, dt)
    expected = np.array([np.cos(3 * dt), np.cos(dt)]) / np.sqrt(2)
    assert np.allclose(filtered.amps, expected, atol=1e-12)
    assert prob == pytest.approx((np.cos(dt) ** 2 + np.cos(3 * dt) ** 2) / 2)


def test_nh_step_eigenstate():
    ham = two_level()
    dt = 0.3
    filtered, prob = nh_step(zero_state(1), ham, dt)  # eigenvalue 3
    assert np.allclose(filtered.amps, np.cos(3 * dt) * zero_state(1).amps)
    assert prob == pytest.approx(np.cos(3 * dt) ** 2)


def test_nh_step_matches_explicit_ancilla(rng):
    for _ in range(20):
        n = int(rng.integers(1, 5))
        ham = random_hamiltonian(rng, n, 5)
        dt = safe_dt(ham, rng)
        state = StateVector(n, random_state_amps(rng, n))
        filtered, prob = nh_step(state, ham, dt)
        joint = apply_u_nh(attach_ancillas(state, 1), ham.embed(n + 1), dt, n)
        projected, p2 = project_qubit(joint, n, 0)
        assert prob == pytest.approx(p2, abs=1e-10)
        assert np.allclose(projected.amps[: 1 << n], filtered.amps, atol=1e-10)


def test_nh_evolve_two_level_closed_form():
    ham = two_level()
    dt = 0.37
    trace = nh_evolve(plus_state(1), ham, FilterConfig(max_steps=15, dt=dt))
    for m, row in enumerate(trace.rows):
        c1 = np.cos(dt) ** (2 * m)
        c3 = np.cos(3 * dt) ** (2 * m)
        assert row.energy == pytest.approx((c1 + 3 * c3) / (c1 + c3), abs=1e-10)
        assert row.norm == pytest.approx(np.sqrt((c1 + c3) / 2), abs=1e-12)
        assert row.success_prob == pytest.approx(row.norm**2, abs=1e-12)


def test_nh_evolve_ground_eigenstate_fixed_point(rng):
    ham = random_hamiltonian(rng, 3, 5)
    info = spectral_info(ham)
    cfg = FilterConfig(max_steps=8)
    trace = nh_evolve(StateVector(3, info.ground_state), ham, cfg)
    for row in trace.rows:
        assert row.energy == pytest.approx(info.ground_energy, abs=1e-9)
        assert row.ground_fidelity == pytest.approx(1.0, abs=1e-9)


def test_nh_evolve_energy_monotone(rng):
    for _ in range(5):
        n = int(rng.integers(1, 5))
        ham = random_hamiltonian(rng, n, 5)
        trace = nh_evolve(StateVector(n, random_state_amps(rng, n)), ham, FilterConfig(max_steps=25))
        energies = trace.energies()
        assert np.all(np.diff(energies) <= 1e-10)


def test_nh_evolve_norm_identity_and_floor(rng):
    for _ in range(5):
        n = int(rng.integers(1, 5))
        ham = random_hamiltonian(rng, n, 5)
        amps = random_state_amps(rng, n)
        cfg = FilterConfig(max_steps=15)
        res = resolve_evolution(ham, cfg)
        trace = nh_evolve(StateVector(n, amps), ham, cfg)
        lam = fidelity_to_ground_space(StateVector(n, amps), res.info)
        shifted_ground = res.info.ground_energy + (
            res.evolved.identity_offset - ham.identity_offset
        )
        for m, row in enumerate(trace.rows):
            oracle = np.linalg.norm(
                dense_function_apply(res.evolved, lambda e: np.cos(e * res.dt) ** m, amps)
            )
            assert row.norm == pytest.approx(oracle, abs=1e-9)
            floor = lam * np.cos(shifted_ground * res.dt) ** m
            assert row.norm >= floor - 1e-12


def test_nh_evolve_zero_norm_raises():
    # cos(pi/2) annihilates the single eigencomponent
    ham = Hamiltonian(1, [PauliTerm(1.0, PauliString.from_letters("Z"))], 0.0)
    cfg = FilterConfig(max_steps=3, dt=np.pi / 2)
    with pytest.raises(ZeroNorm):
        nh_evolve(zero_state(1), ham, cfg)


def test_postprocess_two_level_closed_form():
    ham = two_level()
    dt = 0.29
    value = postprocess_energy(plus_state(1), ham, dt, 2)
    c1, c3 = np.cos(dt) ** 4, np.cos(3 * dt) ** 4
    assert value == pytest.approx((c1 + 3 * c3) / (c1 + c3), abs=1e-12)


def test_postprocess_equals_projector_and_trace(rng):
    for _ in range(6):
        n = int(rng.integers(1, 4))
        steps = int(rng.integers(1, 5))
        ham = random_hamiltonian(rng, n, 4)
        dt = safe_dt(ham, rng, frac=0.45)
        state = StateVector(n, random_state_amps(rng, n))
        e_binomial = postprocess_energy(state, ham, dt, steps)
        e_projector = postselected_energy_explicit(state, ham, dt, steps)
        trace = nh_evolve(state, ham, FilterConfig(max_steps=steps, dt=dt))
        assert e_binomial == pytest.approx(e_projector, abs=1e-9)
        assert e_binomial == pytest.approx(trace.rows[steps].energy, abs=1e-9)


def test_time_translation_identities(rng):
    ham = random_hamiltonian(rng, 3, 5)
    report = time_translation_check(plus_state(3), ham, 0.2, 4)
    assert report.max_residual < 1e-10


def test_time_translation_single_step_trivial(rng):
    ham = random_hamiltonian(rng, 2, 4)
    report = time_translation_check(plus_state(2), ham, 0.3, 1)
    assert report.max_residual < 1e-12


def test_time_translation_broken_by_block(rng):
    ham = random_hamiltonian(rng, 3, 5)
    report = time_translation_check(
        plus_state(3), ham, 0.2, 4, block_gates=[Gate.ry(0, 0.9), Gate.rx(1, 1.3)]
    )
    assert report.max_residual > 1e-3


def test_explicit_filter_states_shapes(rng):
    ham = random_hamiltonian(rng, 2, 3)
    states = explicit_filter_states(plus_state(2), ham, 0.2, 3)
    assert len(states) == 4
    assert all(s.n_qubits == 5 for s in states)
    assert all(s.norm() == pytest.approx(1.0, abs=1e-10) for s in states)


def test_required_steps_estimate_values():
    eps = float(np.exp(-2))
    assert required_steps_estimate(1.0, 1.0, eps) == 4
    assert required_steps_estimate(0.5, 1.0, eps) == 16
    # non-increasing in chi and eps
    assert required_steps_estimate(1.0, 0.5, eps) >= required_steps_estimate(1.0, 1.0, eps)
    assert required_steps_estimate(1.0, 1.0, 0.05) >= required_steps_estimate(1.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        required_steps_estimate(0.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        required_steps_estimate(1.0, 2.0, 0.5)
    with pytest.raises(ValueError):
        required_steps_estimate(1.0, 1.0, 1.0)


def test_trace_csv_round_trip():
    trace = EvolutionTrace()
    trace.append(TraceRow(0, 1.5, 1.0, 1.0, 0.25))
    trace.append(TraceRow(1, 1.25, 0.9, 0.81, 0.5))
    buf = io.StringIO()
    trace.write_csv(buf)
    text = buf.getvalue()
    assert text.splitlines()[0] == "step,energy,norm,success_prob,ground_fidelity"
    back = EvolutionTrace.read_csv(io.StringIO(text))
    assert [(r.step, r.energy, r.norm) for r in back.rows] == [
        (r.step, r.energy, r.norm) for r in trace.rows
    ]


def test_trace_csv_recording_columns():
    trace = EvolutionTrace(recording_columns=True)
    trace.append(TraceRow(0, 1.0, 1.0, 1.0, 0.1))
    trace.append(TraceRow(1, 0.5, 1.0, 0.9, 0.2, segment_index=1, record_metric=0.99, c_r=0.5))
    buf = io.StringIO()
    trace.write_csv(buf)
    header = buf.getvalue().splitlines()[0]
    assert header == "step,energy,norm,success_prob,ground_fidelity,segment_index,record_metric,c_r"
    back = EvolutionTrace.read_csv(io.StringIO(buf.getvalue()))
    assert back.rows[1].c_r == 0.5
    assert back.rows[0].segment_index is None


def test_steps_to_accuracy_conventions():
    trace = EvolutionTrace()
    trace.append(TraceRow(0, 2.0, 1.0, 1.0, 0.0))
    trace.append(TraceRow(1, 0.005, 1.0, 1.0, 0.0))
    # E_g = 0: absolute threshold
    assert trace.steps_to_accuracy(0.0, 0.01) == 1
    # E_g = 2: relative threshold met at row 0
    assert trace.steps_to_accuracy(2.0, 0.01) == 0
