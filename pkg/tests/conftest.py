import numpy as np
import pytest

from cosfilter.pauli import Hamiltonian, PauliString, PauliTerm


def random_hamiltonian(rng, n, k_terms, with_offset=True) -> Hamiltonian:
    """Random real-weighted Pauli sum for oracle comparisons."""
    terms = []
    for _ in range(k_terms):
        letters = "".join(rng.choice(list("IXYZ"), n))
        terms.append(PauliTerm(float(rng.normal()), PauliString.from_letters(letters)))
    offset = float(rng.normal()) if with_offset else 0.0
    return Hamiltonian(n, terms, offset)


def random_state_amps(rng, n) -> np.ndarray:
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return amps / np.linalg.norm(amps)


def dense_function_apply(ham: Hamiltonian, func, amps: np.ndarray) -> np.ndarray:
    """f(H)|psi> by exact eigendecomposition (the functional-calculus oracle)."""
    evals, evecs = np.linalg.eigh(ham.to_dense())
    return evecs @ (func(evals) * (evecs.conj().T @ amps))


def safe_dt(ham: Hamiltonian, rng, lo=0.01, frac=0.9):
    """A timestep inside the series regime of the traceless part."""
    bound = max(ham.abs_coeff_sum(), 1e-9)
    return float(rng.uniform(lo, frac * np.pi / bound))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
