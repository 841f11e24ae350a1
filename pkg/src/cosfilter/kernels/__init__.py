"""Amplitude kernels: compiled core with a pure-NumPy fallback.

The compiled extension is preferred when present; set COSFILTER_PURE_PYTHON=1
to force the NumPy backend (used by the benchmark and the backend-equality
tests).
"""

import os

if os.environ.get("COSFILTER_PURE_PYTHON"):
    from . import _pykernels as _impl
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _pykernels as _impl

BACKEND = _impl.BACKEND
pauli_apply = _impl.pauli_apply
ham_apply = _impl.ham_apply
pauli_expectation = _impl.pauli_expectation
ham_expectation = _impl.ham_expectation
apply_single_qubit = _impl.apply_single_qubit
apply_cnot = _impl.apply_cnot
apply_diag_phase = _impl.apply_diag_phase

__all__ = [
    "BACKEND",
    "pauli_apply",
    "ham_apply",
    "pauli_expectation",
    "ham_expectation",
    "apply_single_qubit",
    "apply_cnot",
    "apply_diag_phase",
]
