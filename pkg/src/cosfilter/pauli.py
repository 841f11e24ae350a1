"""Pauli-string algebra, Hamiltonians, and the dense spectral oracle.

Conventions (used everywhere in this package):
  * qubit q is the q-th least significant bit of a basis-state index;
  * a letters string is written qubit 0 first, so "IIZ" is Z on qubit 2;
  * Z = diag(+1, -1), i.e. Z|0> = +|0>;
  * Hamiltonians are real-weighted Pauli sums plus a separately stored
    identity offset, and are Hermitian by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from . import kernels
from .errors import DimensionMismatch, TooLarge

COEFF_PRUNE = 1e-12
DENSE_QUBIT_LIMIT = 14
DEGENERACY_TOL = 1e-9

_LETTERS = "IXYZ"


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis, encoded as two bitmasks."""

    n_qubits: int
    x_mask: int = 0
    z_mask: int = 0

    def __post_init__(self):
        if self.n_qubits < 1 or self.n_qubits > 64:
            raise ValueError(f"unsupported qubit count {self.n_qubits}")
        full = (1 << self.n_qubits) - 1
        if (self.x_mask | self.z_mask) & ~full:
            raise ValueError("mask bits outside the register")

    @classmethod
    def from_letters(cls, letters: str) -> "PauliString":
        x = z = 0
        for q, ch in enumerate(letters):
            if ch in ("X", "Y"):
                x |= 1 << q
            if ch in ("Z", "Y"):
                z |= 1 << q
            if ch not in _LETTERS:
                raise ValueError(f"bad Pauli letter {ch!r}")
        return cls(len(letters), x, z)

    @classmethod
    def single(cls, n_qubits: int, q: int, letter: str) -> "PauliString":
        if not 0 <= q < n_qubits:
            raise ValueError(f"qubit {q} outside register of {n_qubits}")
        bit = 1 << q
        x = bit if letter in ("X", "Y") else 0
        z = bit if letter in ("Z", "Y") else 0
        if letter not in "XYZ":
            raise ValueError(f"bad Pauli letter {letter!r}")
        return cls(n_qubits, x, z)

    @property
    def letters(self) -> str:
        out = []
        for q in range(self.n_qubits):
            x = (self.x_mask >> q) & 1
            z = (self.z_mask >> q) & 1
            out.append("IXZY"[x + 2 * z])
        return "".join(out)

    @property
    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    @property
    def is_diagonal(self) -> bool:
        return self.x_mask == 0

    @property
    def weight_factor(self) -> complex:
        """(-i)^{#Y}; see kernels._pykernels for the derivation."""
        n_y = (self.x_mask & self.z_mask).bit_count()
        return (-1j) ** (n_y % 4)

    def embed(self, n_qubits: int) -> "PauliString":
        """Same operator on a wider register (identity on the new qubits)."""
        if n_qubits < self.n_qubits:
            raise ValueError("cannot shrink a Pauli string")
        return PauliString(n_qubits, self.x_mask, self.z_mask)

    def __repr__(self):
        return f"PauliString({self.letters!r})"


@dataclass(frozen=True)
class PauliTerm:
    coeff: float
    string: PauliString

    def __post_init__(self):
        if not np.isfinite(self.coeff):
            raise ValueError("non-finite Pauli coefficient")


class Hamiltonian:
    """Real-weighted Pauli sum H = sum_n alpha_n h_n + identity_offset * I.

    Terms are merged, pruned below 1e-12, and kept in lexicographic letters
    order so equal operators compare equal and kernel traversal order is
    deterministic.
    """

    def __init__(self, n_qubits: int, terms: Iterable[PauliTerm], identity_offset: float = 0.0):
        merged: dict[tuple[int, int], float] = {}
        offset = float(identity_offset)
        for term in terms:
            s = term.string
            if s.n_qubits != n_qubits:
                raise DimensionMismatch(
                    f"term on {s.n_qubits} qubits in a {n_qubits}-qubit Hamiltonian"
                )
            if s.is_identity:
                offset += term.coeff
                continue
            key = (s.x_mask, s.z_mask)
            merged[key] = merged.get(key, 0.0) + float(term.coeff)
        kept = [
            PauliTerm(c, PauliString(n_qubits, x, z))
            for (x, z), c in merged.items()
            if abs(c) >= COEFF_PRUNE
        ]
        kept.sort(key=lambda t: t.string.letters)
        self.n_qubits = n_qubits
        self.terms: tuple[PauliTerm, ...] = tuple(kept)
        self.identity_offset = offset
        self._arrays = None
        self._diag = None

    # -- kernel plumbing ---------------------------------------------------

    def _kernel_arrays(self):
        if self._arrays is None:
            xs = np.array([t.string.x_mask for t in self.terms], dtype=np.uint64)
            zs = np.array([t.string.z_mask for t in self.terms], dtype=np.uint64)
            ws = np.array(
                [t.coeff * t.string.weight_factor for t in self.terms], dtype=np.complex128
            )
            self._arrays = (xs, zs, ws)
        return self._arrays

    def matvec(self, amps: np.ndarray, include_offset: bool = True) -> np.ndarray:
        xs, zs, ws = self._kernel_arrays()
        offset = self.identity_offset if include_offset else 0.0
        return kernels.ham_apply(amps, xs, zs, ws, offset)

    def expectation_of_amps(self, amps: np.ndarray) -> float:
        """<amps|H|amps> without normalization."""
        xs, zs, ws = self._kernel_arrays()
        return kernels.ham_expectation(amps, xs, zs, ws, self.identity_offset)

    # -- structure ---------------------------------------------------------

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    @property
    def is_diagonal(self) -> bool:
        return all(t.string.is_diagonal for t in self.terms)

    def abs_coeff_sum(self) -> float:
        """sum |alpha_n| over non-identity terms (series-regime bound)."""
        return float(sum(abs(t.coeff) for t in self.terms))

    def spectral_bound(self) -> tuple[float, float]:
        """Gershgorin-style enclosure offset -/+ sum|alpha_n| (any n)."""
        s = self.abs_coeff_sum()
        return (self.identity_offset - s, self.identity_offset + s)

    def shifted(self, c: float) -> "Hamiltonian":
        """H + c*I; only the identity offset changes."""
        return Hamiltonian(self.n_qubits, self.terms, self.identity_offset + c)

    def traceless(self) -> "Hamiltonian":
        return Hamiltonian(self.n_qubits, self.terms, 0.0)

    def embed(self, n_qubits: int) -> "Hamiltonian":
        """Same operator on a wider register."""
        return Hamiltonian(
            n_qubits,
            [PauliTerm(t.coeff, t.string.embed(n_qubits)) for t in self.terms],
            self.identity_offset,
        )

    def diagonal(self) -> np.ndarray:
        """Diagonal entries as a real vector; requires Z-only terms."""
        if not self.is_diagonal:
            raise ValueError("Hamiltonian has off-diagonal terms")
        if self._diag is None:
            d = np.full(self.dim, self.identity_offset, dtype=np.float64)
            j = np.arange(self.dim, dtype=np.uint64)
            for t in self.terms:
                parity = np.bitwise_count(j & np.uint64(t.string.z_mask)) & np.uint64(1)
                d += t.coeff * (1.0 - 2.0 * parity.astype(np.float64))
            self._diag = d
        return self._diag

    def to_dense(self) -> np.ndarray:
        """Dense 2^n x 2^n matrix; guarded by the dense qubit limit."""
        if self.n_qubits > DENSE_QUBIT_LIMIT:
            raise TooLarge(f"dense matrix for n={self.n_qubits} > {DENSE_QUBIT_LIMIT}")
        dim = self.dim
        mat = np.zeros((dim, dim), dtype=np.complex128)
        j = np.arange(dim, dtype=np.uint64)
        rows = np.arange(dim)
        for t in self.terms:
            w = t.coeff * t.string.weight_factor
            parity = (np.bitwise_count(j & np.uint64(t.string.z_mask)) & np.uint64(1)).astype(
                np.float64
            )
            signs = 1.0 - 2.0 * parity
            cols = (j ^ np.uint64(t.string.x_mask)).astype(np.intp)
            mat[rows, cols] += w * signs
        mat[rows, rows] += self.identity_offset
        return mat

    def __iter__(self) -> Iterator[PauliTerm]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, Hamiltonian):
            return NotImplemented
        return (
            self.n_qubits == other.n_qubits
            and self.identity_offset == other.identity_offset
            and self.terms == other.terms
        )

    def __repr__(self):
        return (
            f"Hamiltonian(n={self.n_qubits}, terms={len(self.terms)}, "
            f"offset={self.identity_offset!r})"
        )


@dataclass
class SpectralInfo:
    """Exact dense spectrum summary used as the oracle across the package."""

    e_min: float
    e_max: float
    ground_energy: float
    gap: float
    ground_state: "np.ndarray"
    ground_space: "np.ndarray" = field(repr=False, default=None)
    eigenvalues: "np.ndarray" = field(repr=False, default=None)

    @property
    def ground_degeneracy(self) -> int:
        return self.ground_space.shape[1]


def spectral_info(ham: Hamiltonian) -> SpectralInfo:
    """Full dense eigensolve (n <= 14); diagonal operators take a fast path."""
    if ham.n_qubits > DENSE_QUBIT_LIMIT:
        raise TooLarge(f"spectral_info needs n <= {DENSE_QUBIT_LIMIT}, got {ham.n_qubits}")
    if ham.is_diagonal:
        evals = ham.diagonal()
        order = np.argsort(evals, kind="stable")
        e_min = float(evals[order[0]])
        e_max = float(evals.max())
        ground_idx = order[np.abs(evals[order] - e_min) <= DEGENERACY_TOL]
        space = np.zeros((ham.dim, len(ground_idx)), dtype=np.complex128)
        for k, idx in enumerate(ground_idx):
            space[idx, k] = 1.0
        above = evals[evals > e_min + DEGENERACY_TOL]
        gap = float(above.min() - e_min) if above.size else 0.0
        sorted_evals = np.sort(evals)
    else:
        mat = ham.to_dense()
        evals, evecs = np.linalg.eigh(mat)
        e_min = float(evals[0])
        e_max = float(evals[-1])
        mask = np.abs(evals - e_min) <= DEGENERACY_TOL
        space = evecs[:, mask]
        above = evals[evals > e_min + DEGENERACY_TOL]
        gap = float(above.min() - e_min) if above.size else 0.0
        sorted_evals = evals
    return SpectralInfo(
        e_min=e_min,
        e_max=e_max,
        ground_energy=e_min,
        gap=gap,
        ground_state=np.ascontiguousarray(space[:, 0]),
        ground_space=space,
        eigenvalues=np.asarray(sorted_evals, dtype=np.float64),
    )


def shift_and_timestep(
    ham: Hamiltonian, info: SpectralInfo, margin: float = 1e-3
) -> tuple[Hamiltonian, float]:
    """Shift H so its spectrum starts at `margin`, and pick the timestep.

    Returns (H + c*I, dt*) with c = -e_min + margin and dt* = (pi/2) / E'_max,
    so the whole shifted spectrum lands in (0, pi/2] where the cosine filter
    is positive and decreasing.
    """
    if margin <= 0:
        raise ValueError("margin must be positive")
    c = -info.e_min + margin
    e_max_shifted = info.e_max + c
    dt_star = (np.pi / 2.0) / e_max_shifted
    return ham.shifted(c), float(dt_star)


# -- coefficient table text format ------------------------------------------


def pauli_coefficient_table(ham: Hamiltonian) -> str:
    """Render "LETTERS : coeff" lines (identity offset last, if any).

    Coefficients are printed with repr, which round-trips exactly and always
    carries enough significant digits.
    """
    lines = [f"{t.string.letters} : {t.coeff!r}" for t in ham.terms]
    if ham.identity_offset != 0.0:
        lines.append(f"{'I' * ham.n_qubits} : {ham.identity_offset!r}")
    return "\n".join(lines) + ("\n" if lines else "")

def parse_coefficient_table(text: str, n_qubits: int | None = None) -> Hamiltonian:
    """Parse "LETTERS : coeff" entries separated by arbitrary whitespace.

    Accepts multi-column layouts; all entries must agree on the register
    size. An all-I entry becomes the identity offset.
    """
    tokens = text.split()
    if len(tokens) % 3 != 0:
        raise ValueError("coefficient table must be LETTERS : value triples")
    terms = []
    offset = 0.0
    for i in range(0, len(tokens), 3):
        letters, colon, value = tokens[i : i + 3]
        if colon != ":":
            raise ValueError(f"expected ':' between {letters!r} and {value!r}")
        if n_qubits is None:
            n_qubits = len(letters)
        elif len(letters) != n_qubits:
            raise ValueError(f"mixed register sizes in table ({letters!r})")
        string = PauliString.from_letters(letters)
        if string.is_identity:
            offset += float(value)
        else:
            terms.append(PauliTerm(float(value), string))
    if n_qubits is None:
        raise ValueError("empty coefficient table")
    return Hamiltonian(n_qubits, terms, offset)
