import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cosfilter.errors import TooLarge
from cosfilter.pauli import (
    Hamiltonian,
    PauliString,
    PauliTerm,
    parse_coefficient_table,
    pauli_coefficient_table,
    shift_and_timestep,
    spectral_info,
)

from conftest import random_hamiltonian


def test_letters_round_trip():
    rng = np.random.default_rng(0)
    for _ in range(300):
        n = int(rng.integers(1, 9))
        letters = "".join(rng.choice(list("IXYZ"), n))
        assert PauliString.from_letters(letters).letters == letters


def test_string_equality_and_hash_by_letter_sequence():
    a = PauliString.from_letters("XIZ")
    b = PauliString.from_letters("XIZ")
    c = PauliString.from_letters("XZI")
    assert a == b and hash(a) == hash(b)
    assert a != c


def test_single_qubit_constructor():
    s = PauliString.single(5, 4, "Z")
    assert s.letters == "IIIIZ"
    with pytest.raises(ValueError):
        PauliString.single(3, 3, "Z")


def test_term_merging_and_pruning():
    z0 = PauliString.from_letters("ZI")
    ham = Hamiltonian(
        2,
        [
            PauliTerm(0.5, z0),
            PauliTerm(0.25, z0),
            PauliTerm(1e-13, PauliString.from_letters("XX")),
            PauliTerm(2.0, PauliString.from_letters("II")),
        ],
        identity_offset=1.0,
    )
    assert len(ham.terms) == 1
    assert ham.terms[0].coeff == 0.75
    assert ham.identity_offset == 3.0


def test_hermiticity_of_dense_matrix(rng):
    for _ in range(20):
        ham = random_hamiltonian(rng, int(rng.integers(1, 6)), 6)
        dense = ham.to_dense()
        assert np.allclose(dense, dense.conj().T, atol=1e-12)


def test_matvec_matches_dense(rng):
    for _ in range(20):
        n = int(rng.integers(1, 6))
        ham = random_hamiltonian(rng, n, 6)
        v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
        assert np.allclose(ham.matvec(v), ham.to_dense() @ v, atol=1e-10)


def test_diagonal_fast_path(rng):
    terms = [
        PauliTerm(0.5, PauliString.from_letters("ZZI")),
        PauliTerm(-0.25, PauliString.from_letters("IIZ")),
    ]
    ham = Hamiltonian(3, terms, 0.125)
    assert ham.is_diagonal
    assert np.allclose(ham.diagonal(), np.diag(ham.to_dense()).real)


def test_spectral_info_single_qubit_z():
    ham = Hamiltonian(1, [PauliTerm(1.0, PauliString.from_letters("Z"))])
    info = spectral_info(ham)
    assert info.e_min == -1 and info.e_max == 1
    assert info.gap == 2
    # ground is |1>
    assert np.allclose(np.abs(info.ground_state), [0, 1])


def test_spectral_info_single_qubit_x():
    ham = Hamiltonian(1, [PauliTerm(1.0, PauliString.from_letters("X"))])
    info = spectral_info(ham)
    assert info.ground_energy == pytest.approx(-1)
    expected = np.array([1, -1]) / np.sqrt(2)
    phase = info.ground_state[0] / expected[0]
    assert np.allclose(info.ground_state, phase * expected, atol=1e-12)


def test_spectral_info_size_guard():
    ham = Hamiltonian(15, [PauliTerm(1.0, PauliString.single(15, 0, "Z"))])
    with pytest.raises(TooLarge):
        spectral_info(ham)


def test_shift_and_timestep_contract(rng):
    for _ in range(10):
        ham = random_hamiltonian(rng, int(rng.integers(1, 5)), 5)
        info = spectral_info(ham)
        shifted, dt = shift_and_timestep(ham, info, margin=1e-3)
        s_info = spectral_info(shifted)
        assert s_info.e_min > 0
        assert s_info.e_min == pytest.approx(1e-3, abs=1e-9)
        assert s_info.e_max * dt <= np.pi / 2 + 1e-12
        # shifting changes only the identity offset
        assert shifted.terms == ham.terms
        assert np.allclose(
            s_info.eigenvalues, info.eigenvalues + (shifted.identity_offset - ham.identity_offset)
        )


def test_shift_applies_downward_when_already_positive():
    ham = Hamiltonian(1, [PauliTerm(0.25, PauliString.from_letters("Z"))], 0.75)
    info = spectral_info(ham)  # spectrum {0.5, 1.0}
    shifted, _ = shift_and_timestep(ham, info, margin=1e-3)
    assert shifted.identity_offset == pytest.approx(0.75 - 0.5 + 1e-3)


def test_coefficient_table_fixed_point():
    ham = Hamiltonian(5, [PauliTerm(-0.25, PauliString.single(5, 4, "Z"))])
    assert pauli_coefficient_table(ham) == "IIIIZ : -0.25\n"


def test_coefficient_table_identity_only():
    ham = Hamiltonian(3, [], identity_offset=1.875)
    text = pauli_coefficient_table(ham)
    assert text == "III : 1.875\n"
    assert parse_coefficient_table(text) == ham


def test_coefficient_table_multicolumn_whitespace():
    text = "IZ : 0.5    ZI : -0.25\n  II : 1.0"
    ham = parse_coefficient_table(text)
    assert ham.identity_offset == 1.0
    assert len(ham.terms) == 2


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_coefficient_table_round_trip(seed):
    rng = np.random.default_rng(seed)
    ham = random_hamiltonian(rng, 4, int(rng.integers(1, 8)))
    assert parse_coefficient_table(pauli_coefficient_table(ham)) == ham


def test_spectral_bound_encloses_spectrum(rng):
    for _ in range(10):
        ham = random_hamiltonian(rng, 4, 6)
        lo, hi = ham.spectral_bound()
        info = spectral_info(ham)
        assert lo <= info.e_min and info.e_max <= hi
