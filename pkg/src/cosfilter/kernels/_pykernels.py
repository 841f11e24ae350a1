"""NumPy implementations of the amplitude kernels.

Import-time fallback for the compiled extension. Both backends follow the
same per-term accumulation order so results agree to the last bit wherever
the summation order is the only degree of freedom.

Pauli-string encoding: a string on n qubits is a pair of bitmasks
(x_mask, z_mask), bit q set when the letter on qubit q is X/Y (x_mask) or
Z/Y (z_mask). Acting on a basis state,

    P|b> = (-i)^{popcount(x&z)} * (-1)^{popcount(b & z)} |b ^ x>,

and the (-i) factor together with the sign at b = j^x is folded into a
complex weight w per term, so every kernel only needs

    out[j] += w * (-1)^{parity(j & z)} * amps[j ^ x].
"""

import numpy as np

BACKEND = "numpy"

_U64 = np.uint64


def _signs(dim: int, z_mask: int) -> np.ndarray:
    """(-1)^{parity(j & z_mask)} for j = 0..dim-1, as float64."""
    j = np.arange(dim, dtype=_U64)
    parity = (np.bitwise_count(j & _U64(z_mask)) & 1).astype(np.float64)
    return 1.0 - 2.0 * parity


def pauli_apply(amps: np.ndarray, x_mask: int, z_mask: int, weight: complex) -> np.ndarray:
    """Return weight * P * amps for a single encoded Pauli string."""
    dim = amps.shape[0]
    j = np.arange(dim, dtype=_U64)
    src = (j ^ _U64(x_mask)).astype(np.intp)
    return (weight * _signs(dim, z_mask)) * amps[src]


def ham_apply(
    amps: np.ndarray,
    x_masks: np.ndarray,
    z_masks: np.ndarray,
    weights: np.ndarray,
    offset: float,
) -> np.ndarray:
    """Return H * amps where H = sum_n weights[n] * P_n + offset * I."""
    dim = amps.shape[0]
    out = offset * amps if offset != 0.0 else np.zeros_like(amps)
    j = np.arange(dim, dtype=_U64)
    for x, z, w in zip(x_masks, z_masks, weights):
        src = (j ^ x).astype(np.intp)
        out += (w * _signs(dim, int(z))) * amps[src]
    return out


def pauli_expectation(amps: np.ndarray, x_mask: int, z_mask: int, weight: complex) -> float:
    """Re <amps| weight * P |amps> (unnormalized)."""
    return float(np.vdot(amps, pauli_apply(amps, x_mask, z_mask, weight)).real)


def ham_expectation(
    amps: np.ndarray,
    x_masks: np.ndarray,
    z_masks: np.ndarray,
    weights: np.ndarray,
    offset: float,
) -> float:
    """Re <amps| H |amps> (unnormalized)."""
    acc = offset * float(np.vdot(amps, amps).real)
    for x, z, w in zip(x_masks, z_masks, weights):
        acc += pauli_expectation(amps, int(x), int(z), complex(w))
    return acc


def apply_single_qubit(amps: np.ndarray, q: int, u: np.ndarray) -> None:
    """In-place 2x2 unitary on qubit q (little-endian bit q)."""
    dim = amps.shape[0]
    view = amps.reshape(dim >> (q + 1), 2, 1 << q)
    a = view[:, 0, :].copy()
    b = view[:, 1, :]
    view[:, 0, :] = u[0, 0] * a + u[0, 1] * b
    view[:, 1, :] = u[1, 0] * a + u[1, 1] * b


def apply_cnot(amps: np.ndarray, control: int, target: int) -> None:
    """In-place CNOT: flip target where control bit is 1."""
    dim = amps.shape[0]
    j = np.arange(dim, dtype=_U64)
    sel = (j >> _U64(control)) & _U64(1) == 1
    idx = np.nonzero(sel & (((j >> _U64(target)) & _U64(1)) == 0))[0]
    flipped = idx ^ (1 << target)
    tmp = amps[idx].copy()
    amps[idx] = amps[flipped]
    amps[flipped] = tmp


def apply_diag_phase(amps: np.ndarray, phases: np.ndarray) -> None:
    """In-place elementwise multiply by exp(-1j * phases)."""
    amps *= np.exp(-1j * phases)
