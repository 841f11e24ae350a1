"""Problem Hamiltonians: 3-SAT clause projectors and the 1D TFIM chain.

SAT mapping: boolean variable i lives on qubit i with true <-> |1>. Each
clause contributes the rank-1 projector onto the single assignment of its
three variables that violates it, so eigenvalues of the full operator count
violated clauses and the instance is satisfiable iff the ground energy is 0.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    DuplicateVariableInClause,
    MalformedHeader,
    NonThreeSatClause,
    VariableOutOfRange,
)
from .pauli import Hamiltonian, PauliString, PauliTerm

Literal = tuple[int, bool]  # (variable index, negated?)


@dataclass(frozen=True)
class SatInstance:
    n_vars: int
    clauses: tuple[tuple[Literal, Literal, Literal], ...]

    def __post_init__(self):
        for clause in self.clauses:
            if len(clause) != 3:
                raise NonThreeSatClause(f"clause {clause} does not have 3 literals")
            vs = [v for v, _ in clause]
            if len(set(vs)) != 3:
                raise DuplicateVariableInClause(f"clause {clause} repeats a variable")
            for v in vs:
                if not 0 <= v < self.n_vars:
                    raise VariableOutOfRange(f"variable {v} outside 0..{self.n_vars - 1}")

    @property
    def n_clauses(self) -> int:
        return len(self.clauses)

    def violated_count(self, assignment: int) -> int:
        """Number of clauses violated by the bitmask assignment."""
        count = 0
        for clause in self.clauses:
            sat = False
            for var, negated in clause:
                bit = (assignment >> var) & 1
                if bool(bit) != negated:
                    sat = True
                    break
            if not sat:
                count += 1
        return count

    def satisfying_assignments(self) -> list[int]:
        """Exhaustive search; intended for small oracles only."""
        return [a for a in range(1 << self.n_vars) if self.violated_count(a) == 0]


def parse_dimacs(text: str) -> SatInstance:
    """Parse DIMACS CNF (3-SAT only): comments, `p cnf n m`, 0-terminated clauses."""
    n_vars = None
    n_clauses = None
    literal_tokens: list[int] = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("c"):
            continue
        if stripped.startswith("p"):
            if n_vars is not None:
                raise MalformedHeader("duplicate problem line")
            parts = stripped.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise MalformedHeader(f"bad problem line: {stripped!r}")
            try:
                n_vars, n_clauses = int(parts[2]), int(parts[3])
            except ValueError as exc:
                raise MalformedHeader(f"bad problem line: {stripped!r}") from exc
            continue
        if n_vars is None:
            raise MalformedHeader("clause data before the problem line")
        try:
            literal_tokens.extend(int(tok) for tok in stripped.split())
        except ValueError as exc:
            raise MalformedHeader(f"non-integer clause token in {stripped!r}") from exc
    if n_vars is None:
        raise MalformedHeader("missing problem line")

    clauses: list[tuple[Literal, Literal, Literal]] = []
    current: list[Literal] = []
    for tok in literal_tokens:
        if tok == 0:
            if len(current) != 3:
                raise NonThreeSatClause(f"clause of length {len(current)}")
            clauses.append(tuple(current))  # type: ignore[arg-type]
            current = []
            continue
        var = abs(tok) - 1
        if var >= n_vars:
            raise VariableOutOfRange(f"literal {tok} exceeds {n_vars} variables")
        current.append((var, tok < 0))
    if current:
        raise NonThreeSatClause("trailing clause not terminated by 0")
    if len(clauses) != n_clauses:
        raise MalformedHeader(f"header claims {n_clauses} clauses, found {len(clauses)}")
    return SatInstance(n_vars, tuple(clauses))


def clause_projector(clause: tuple[Literal, Literal, Literal], n_qubits: int) -> list[PauliTerm]:
    """8-term Pauli expansion of the projector onto the clause's violating pattern.

    The violating bit of a positive literal is 0, of a negated literal 1, so
    the projector is the product over the clause qubits of (I + s_q Z_q)/2
    with s_q = +1 for positive and -1 for negated literals.
    """
    vs = [v for v, _ in clause]
    if len(set(vs)) != 3:
        raise DuplicateVariableInClause(f"clause {clause} repeats a variable")
    for v in vs:
        if not 0 <= v < n_qubits:
            raise VariableOutOfRange(f"variable {v} outside 0..{n_qubits - 1}")
    terms = []
    for subset in range(8):
        coeff = 1.0 / 8.0
        z_mask = 0
        for k, (var, negated) in enumerate(clause):
            if (subset >> k) & 1:
                z_mask |= 1 << var
                if negated:
                    coeff = -coeff
        terms.append(PauliTerm(coeff, PauliString(n_qubits, 0, z_mask)))
    return terms


def sat_to_hamiltonian(inst: SatInstance) -> Hamiltonian:
    """Sum of clause projectors; ground energy 0 iff satisfiable."""
    terms: list[PauliTerm] = []
    for clause in inst.clauses:
        terms.extend(clause_projector(clause, inst.n_vars))
    return Hamiltonian(inst.n_vars, terms)


def tfim_hamiltonian(n: int, j: float, h_x: float, periodic: bool) -> Hamiltonian:
    """1D TFIM: J sum_<i,i+1> Z_i Z_{i+1} + h_x sum_i X_i.

    The periodic bond (n-1, 0) is skipped for n = 2, where it would double
    the single open bond.
    """
    if n < 2:
        raise ValueError("TFIM needs at least 2 sites")
    terms = []
    bonds = [(i, i + 1) for i in range(n - 1)]
    if periodic and n > 2:
        bonds.append((n - 1, 0))
    for a, b in bonds:
        terms.append(PauliTerm(j, PauliString(n, 0, (1 << a) | (1 << b))))
    for i in range(n):
        terms.append(PauliTerm(h_x, PauliString(n, 1 << i, 0)))
    return Hamiltonian(n, terms)
