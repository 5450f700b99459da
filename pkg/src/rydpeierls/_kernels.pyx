# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. See ``_kernels_py.py`` for the reference semantics."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def exchange_hamiltonian(int n_sites, hop, onsite, double vdw):
    cdef const double complex[:, :, :, ::1] hp = np.ascontiguousarray(hop, dtype=np.complex128)
    cdef const double[::1] en = np.ascontiguousarray(onsite, dtype=np.float64)
    cdef Py_ssize_t dim = 1
    cdef int k
    if n_sites < 1 or n_sites > 64:
        raise ValueError("n_sites must lie in 1..64")
    for k in range(n_sites):
        dim *= 3
    out = np.zeros((dim, dim), dtype=np.complex128)
    cdef double complex[:, ::1] H = out
    cdef Py_ssize_t[64] powers
    cdef int[64] digits
    cdef Py_ssize_t s, rem, base
    cdef int src, dst, a, b, n_exc
    cdef double diag
    powers[n_sites - 1] = 1
    for k in range(n_sites - 2, -1, -1):
        powers[k] = 3 * powers[k + 1]
    for s in range(dim):
        rem = s
        for k in range(n_sites):
            digits[k] = <int>(rem // powers[k])
            rem -= digits[k] * powers[k]
        diag = 0.0
        n_exc = 0
        for k in range(n_sites):
            if digits[k]:
                diag += en[digits[k] - 1]
                n_exc += 1
        diag += vdw * ((n_exc * (n_exc - 1)) // 2)
        H[s, s] = H[s, s] + diag
        for src in range(n_sites):
            a = digits[src]
            if a == 0:
                continue
            for dst in range(n_sites):
                if dst == src or digits[dst] != 0:
                    continue
                base = s - a * powers[src]
                for b in range(1, 3):
                    H[base + b * powers[dst], s] = H[base + b * powers[dst], s] + hp[src, dst, a - 1, b - 1]
    return out


def sample_detect(pattern_probs, u_pattern, u_flip, double eps_1to0, double eps_0to1):
    cdef const double[:, ::1] p = np.ascontiguousarray(pattern_probs, dtype=np.float64)
    cdef const double[::1] up = np.ascontiguousarray(u_pattern, dtype=np.float64)
    cdef const double[:, ::1] uf = np.ascontiguousarray(u_flip, dtype=np.float64)
    cdef Py_ssize_t n_times = p.shape[0]
    cdef Py_ssize_t n_patterns = p.shape[1]
    cdef int n_sites = uf.shape[1]
    out = np.empty(n_times, dtype=np.int64)
    cdef long long[::1] res = out
    cdef Py_ssize_t t, k
    cdef int i, bit, shift
    cdef long long drawn, observed
    cdef double acc
    for t in range(n_times):
        acc = 0.0
        drawn = 0
        for k in range(n_patterns):
            acc = acc + p[t, k]
            if up[t] >= acc:
                drawn += 1
        if drawn > n_patterns - 1:
            drawn = n_patterns - 1
        observed = 0
        for i in range(n_sites):
            shift = n_sites - 1 - i
            bit = (drawn >> shift) & 1
            if bit == 1:
                if uf[t, i] < eps_1to0:
                    bit = 0
            else:
                if uf[t, i] < eps_0to1:
                    bit = 1
            observed |= (<long long>bit) << shift
        res[t] = observed
    return out
