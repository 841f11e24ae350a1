import numpy as np
import pytest

from cosfilter.errors import (
    DuplicateVariableInClause,
    MalformedHeader,
    NonThreeSatClause,
    VariableOutOfRange,
)
from cosfilter.pauli import Hamiltonian, spectral_info
from cosfilter.problems import (
    SatInstance,
    clause_projector,
    parse_dimacs,
    sat_to_hamiltonian,
    tfim_hamiltonian,
)
from cosfilter import fixtures


def test_parse_dimacs_basic():
    inst = parse_dimacs("p cnf 3 1\n1 -2 3 0")
    assert inst.n_vars == 3
    assert inst.clauses == (((0, False), (1, True), (2, False)),)


def test_parse_dimacs_rejects_short_clause():
    with pytest.raises(NonThreeSatClause):
        parse_dimacs("p cnf 2 1\n1 -2 0")


def test_parse_dimacs_comments_and_count():
    inst = parse_dimacs("c x\np cnf 3 2\n1 2 3 0\n-1 -2 -3 0")
    assert inst.n_clauses == 2


def test_parse_dimacs_header_errors():
    with pytest.raises(MalformedHeader):
        parse_dimacs("1 2 3 0")
    with pytest.raises(MalformedHeader):
        parse_dimacs("p cnf x y\n")
    with pytest.raises(MalformedHeader):
        parse_dimacs("p cnf 3 2\n1 2 3 0")  # count mismatch


def test_parse_dimacs_variable_out_of_range():
    with pytest.raises(VariableOutOfRange):
        parse_dimacs("p cnf 3 1\n1 2 4 0")


def test_parse_dimacs_duplicate_variable():
    with pytest.raises(DuplicateVariableInClause):
        parse_dimacs("p cnf 3 1\n1 -1 2 0")


def test_clause_projector_all_positive():
    terms = clause_projector(((0, False), (1, False), (2, False)), 3)
    assert len(terms) == 8
    assert all(t.coeff == pytest.approx(1 / 8) for t in terms)
    # projects onto |000>
    ham = Hamiltonian(3, terms)
    diag = np.diag(ham.to_dense()).real
    expected = np.zeros(8)
    expected[0] = 1.0
    assert np.allclose(diag, expected, atol=1e-12)


def test_clause_projector_sign_rule():
    terms = clause_projector(((0, True), (1, True), (2, True)), 3)
    for t in terms:
        n_z = t.string.letters.count("Z")
        assert t.coeff == pytest.approx((1 / 8) * (-1) ** n_z)


def test_clause_projectors_complete():
    # sum over the 8 violating patterns of fixed qubits = identity
    total = []
    for pattern in range(8):
        clause = tuple((q, bool((pattern >> q) & 1)) for q in range(3))
        total.extend(clause_projector(clause, 3))
    ham = Hamiltonian(3, total)
    assert len(ham.terms) == 0
    assert ham.identity_offset == pytest.approx(1.0)


def test_single_clause_hamiltonian_spectrum():
    inst = SatInstance(3, (((0, False), (1, False), (2, False)),))
    ham = sat_to_hamiltonian(inst)
    info = spectral_info(ham)
    assert info.ground_energy == pytest.approx(0.0, abs=1e-12)
    assert info.ground_degeneracy == 7
    assert ham.identity_offset == pytest.approx(1 / 8)


def test_unsatisfiable_covering_instance():
    clauses = []
    for pattern in range(8):
        clauses.append(tuple((q, bool((pattern >> q) & 1)) for q in range(3)))
    ham = sat_to_hamiltonian(SatInstance(3, tuple(clauses)))
    info = spectral_info(ham)
    assert info.ground_energy == pytest.approx(1.0, abs=1e-9)


def _random_instance(rng, n_vars, n_clauses):
    clauses = []
    for _ in range(n_clauses):
        vs = rng.choice(n_vars, size=3, replace=False)
        clauses.append(tuple((int(v), bool(rng.integers(2))) for v in vs))
    return SatInstance(n_vars, tuple(clauses))


def test_sat_spectrum_counts_violations(rng):
    for _ in range(10):
        n = int(rng.integers(3, 7))
        inst = _random_instance(rng, n, int(rng.integers(1, 3 * n)))
        ham = sat_to_hamiltonian(inst)
        diag = ham.diagonal()
        expected = np.array([inst.violated_count(a) for a in range(1 << n)], dtype=float)
        assert np.allclose(diag, expected, atol=1e-9)
        assert diag.min() >= -1e-10


def test_satisfiability_oracle_agreement(rng):
    for _ in range(15):
        n = int(rng.integers(3, 7))
        inst = _random_instance(rng, n, int(rng.integers(2, 3 * n)))
        ham = sat_to_hamiltonian(inst)
        ground = spectral_info(ham).ground_energy
        assert (ground < 1e-9) == bool(inst.satisfying_assignments())


def test_tfim_term_enumeration():
    ham = tfim_hamiltonian(3, 0.5, 0.25, periodic=True)
    letters = {t.string.letters: t.coeff for t in ham.terms}
    assert letters == {
        "ZZI": 0.5,
        "IZZ": 0.5,
        "ZIZ": 0.5,
        "XII": 0.25,
        "IXI": 0.25,
        "IIX": 0.25,
    }


def test_tfim_two_site_periodic_bond_dedup():
    ham = tfim_hamiltonian(2, 1.0, 0.3, periodic=True)
    zz = [t for t in ham.terms if "Z" in t.string.letters]
    assert len(zz) == 1 and zz[0].coeff == 1.0


def test_tfim_rejects_single_site():
    with pytest.raises(ValueError):
        tfim_hamiltonian(1, 1.0, 1.0, periodic=False)


def test_sat5_fixture_values():
    traceless = fixtures.sat5_traceless()
    assert len(traceless.terms) == 23
    info = spectral_info(traceless)
    assert info.ground_energy == pytest.approx(-1.875, abs=1e-9)
    full = fixtures.sat5_hamiltonian()
    assert spectral_info(full).ground_energy == pytest.approx(0.0, abs=1e-9)
    assert spectral_info(full).ground_degeneracy == 1


def test_sat8_fixture_parses():
    ham = fixtures.sat8_hamiltonian()
    assert ham.n_qubits == 8
    assert len(ham.terms) == 255
    assert ham.is_diagonal
