# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Cython implementations of the amplitude kernels.

Same contract and per-term accumulation order as _pykernels; see that module
for the Pauli-string encoding and sign/weight conventions.
"""

import numpy as np

cimport cython
cimport numpy as cnp

cnp.import_array()

cdef extern from *:
    int __builtin_parityll(unsigned long long) nogil

BACKEND = "cython"

ctypedef unsigned long long u64


cdef inline double _sign(u64 j, u64 z) nogil:
    return -1.0 if __builtin_parityll(j & z) else 1.0


def pauli_apply(cnp.ndarray[cnp.complex128_t, ndim=1] amps,
                x_mask, z_mask, weight):
    cdef u64 x = <u64> x_mask
    cdef u64 z = <u64> z_mask
    cdef double complex w = weight
    cdef Py_ssize_t dim = amps.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(dim, dtype=np.complex128)
    cdef Py_ssize_t j
    with nogil:
        for j in range(dim):
            out[j] = w * (_sign(<u64> j, z) * amps[(<u64> j) ^ x])
    return out


def ham_apply(cnp.ndarray[cnp.complex128_t, ndim=1] amps,
              cnp.ndarray[cnp.uint64_t, ndim=1] x_masks,
              cnp.ndarray[cnp.uint64_t, ndim=1] z_masks,
              cnp.ndarray[cnp.complex128_t, ndim=1] weights,
              double offset):
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t nterms = x_masks.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.zeros(dim, dtype=np.complex128)
    cdef Py_ssize_t j, n
    cdef u64 x, z
    cdef double complex w
    with nogil:
        if offset != 0.0:
            for j in range(dim):
                out[j] = offset * amps[j]
        for n in range(nterms):
            x = x_masks[n]
            z = z_masks[n]
            w = weights[n]
            for j in range(dim):
                out[j] = out[j] + w * (_sign(<u64> j, z) * amps[(<u64> j) ^ x])
    return out


def pauli_expectation(cnp.ndarray[cnp.complex128_t, ndim=1] amps,
                      x_mask, z_mask, weight):
    cdef u64 x = <u64> x_mask
    cdef u64 z = <u64> z_mask
    cdef double complex w = weight
    cdef Py_ssize_t dim = amps.shape[0]
    cdef double complex acc = 0
    cdef Py_ssize_t j
    with nogil:
        for j in range(dim):
            acc = acc + amps[j].conjugate() * (w * (_sign(<u64> j, z) * amps[(<u64> j) ^ x]))
    return acc.real


def ham_expectation(cnp.ndarray[cnp.complex128_t, ndim=1] amps,
                    cnp.ndarray[cnp.uint64_t, ndim=1] x_masks,
                    cnp.ndarray[cnp.uint64_t, ndim=1] z_masks,
                    cnp.ndarray[cnp.complex128_t, ndim=1] weights,
                    double offset):
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t nterms = x_masks.shape[0]
    cdef double acc = 0.0
    cdef double complex term
    cdef Py_ssize_t j, n
    cdef u64 x, z
    cdef double complex w
    with nogil:
        if offset != 0.0:
            for j in range(dim):
                acc += offset * (amps[j].conjugate() * amps[j]).real
        for n in range(nterms):
            x = x_masks[n]
            z = z_masks[n]
            w = weights[n]
            term = 0
            for j in range(dim):
                term = term + amps[j].conjugate() * (w * (_sign(<u64> j, z) * amps[(<u64> j) ^ x]))
            acc += term.real
    return acc


def apply_single_qubit(cnp.ndarray[cnp.complex128_t, ndim=1] amps, int q, u):
    cdef double complex u00 = u[0, 0]
    cdef double complex u01 = u[0, 1]
    cdef double complex u10 = u[1, 0]
    cdef double complex u11 = u[1, 1]
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t stride = (<Py_ssize_t> 1) << q
    cdef Py_ssize_t i0, i1, base
    cdef double complex a, b
    with nogil:
        base = 0
        while base < dim:
            for i0 in range(base, base + stride):
                i1 = i0 + stride
                a = amps[i0]
                b = amps[i1]
                amps[i0] = u00 * a + u01 * b
                amps[i1] = u10 * a + u11 * b
            base += 2 * stride


def apply_cnot(cnp.ndarray[cnp.complex128_t, ndim=1] amps, int control, int target):
    cdef Py_ssize_t dim = amps.shape[0]
    cdef u64 cbit = (<u64> 1) << control
    cdef u64 tbit = (<u64> 1) << target
    cdef Py_ssize_t j
    cdef double complex tmp
    with nogil:
        for j in range(dim):
            if ((<u64> j) & cbit) and not ((<u64> j) & tbit):
                tmp = amps[j]
                amps[j] = amps[(<u64> j) | tbit]
                amps[(<u64> j) | tbit] = tmp


def apply_diag_phase(cnp.ndarray[cnp.complex128_t, ndim=1] amps,
                     cnp.ndarray[cnp.float64_t, ndim=1] phases):
    # matches the numpy path: amps *= exp(-1j * phases)
    amps *= np.exp(-1j * phases)
