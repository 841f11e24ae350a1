"""Backend-equality and oracle tests for the amplitude kernels."""

import numpy as np
import pytest

from cosfilter.kernels import _pykernels

try:
    from cosfilter.kernels import _ckernels
except ImportError:
    _ckernels = None

from conftest import random_hamiltonian, random_state_amps

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def _arrays(ham):
    xs = np.array([t.string.x_mask for t in ham.terms], dtype=np.uint64)
    zs = np.array([t.string.z_mask for t in ham.terms], dtype=np.uint64)
    ws = np.array([t.coeff * t.string.weight_factor for t in ham.terms], dtype=np.complex128)
    return xs, zs, ws


@needs_ext
def test_ham_apply_backends_agree(rng):
    for _ in range(15):
        n = int(rng.integers(1, 7))
        ham = random_hamiltonian(rng, n, 6)
        xs, zs, ws = _arrays(ham)
        amps = random_state_amps(rng, n)
        a = _pykernels.ham_apply(amps, xs, zs, ws, ham.identity_offset)
        b = _ckernels.ham_apply(amps, xs, zs, ws, ham.identity_offset)
        assert np.allclose(a, b, atol=1e-13)


@needs_ext
def test_pauli_apply_backends_agree(rng):
    for _ in range(15):
        n = int(rng.integers(1, 7))
        ham = random_hamiltonian(rng, n, 3)
        amps = random_state_amps(rng, n)
        for t in ham.terms:
            w = t.string.weight_factor
            a = _pykernels.pauli_apply(amps, t.string.x_mask, t.string.z_mask, w)
            b = _ckernels.pauli_apply(amps, t.string.x_mask, t.string.z_mask, w)
            assert np.array_equal(a, b)


@needs_ext
def test_expectation_backends_agree(rng):
    for _ in range(10):
        n = int(rng.integers(1, 6))
        ham = random_hamiltonian(rng, n, 6)
        xs, zs, ws = _arrays(ham)
        amps = random_state_amps(rng, n)
        a = _pykernels.ham_expectation(amps, xs, zs, ws, ham.identity_offset)
        b = _ckernels.ham_expectation(amps, xs, zs, ws, ham.identity_offset)
        assert a == pytest.approx(b, abs=1e-12)


@needs_ext
def test_gate_kernels_agree(rng):
    u = np.array([[0.6, 0.8j], [0.8j, 0.6]], dtype=np.complex128)
    for _ in range(10):
        n = int(rng.integers(2, 7))
        amps = random_state_amps(rng, n)
        q = int(rng.integers(0, n))
        a = amps.copy()
        b = amps.copy()
        _pykernels.apply_single_qubit(a, q, u)
        _ckernels.apply_single_qubit(b, q, u)
        assert np.allclose(a, b, atol=1e-15)
        c_q, t_q = sorted(rng.choice(n, size=2, replace=False).tolist())
        a2, b2 = a.copy(), a.copy()
        _pykernels.apply_cnot(a2, c_q, t_q)
        _ckernels.apply_cnot(b2, c_q, t_q)
        assert np.array_equal(a2, b2)


def test_pauli_apply_against_dense(rng):
    from cosfilter.pauli import Hamiltonian, PauliTerm

    for _ in range(10):
        n = int(rng.integers(1, 5))
        ham = random_hamiltonian(rng, n, 1, with_offset=False)
        if not ham.terms:
            continue
        term = ham.terms[0]
        single = Hamiltonian(n, [PauliTerm(1.0, term.string)])
        amps = random_state_amps(rng, n)
        out = _pykernels.pauli_apply(
            amps, term.string.x_mask, term.string.z_mask, term.string.weight_factor
        )
        assert np.allclose(out, single.to_dense() @ amps, atol=1e-12)
