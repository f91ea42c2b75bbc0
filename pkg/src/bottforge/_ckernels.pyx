# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled counterparts of the numpy kernels in _pykernels."""
import numpy as np
from libc.math cimport atan2


cdef double complex _pf_inplace(double complex[:, ::1] a) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t k, i, j, kp
    cdef double best, mag
    cdef double complex pf = 1.0, piv, tmp, ti, tj
    if n % 2:
        return 0.0
    for k in range(0, n - 1, 2):
        kp = k + 1
        best = abs(a[k + 1, k])
        for i in range(k + 2, n):
            mag = abs(a[i, k])
            if mag > best:
                best = mag
                kp = i
        if kp != k + 1:
            for j in range(n):
                tmp = a[k + 1, j]
                a[k + 1, j] = a[kp, j]
                a[kp, j] = tmp
            for i in range(n):
                tmp = a[i, k + 1]
                a[i, k + 1] = a[i, kp]
                a[i, kp] = tmp
            pf = -pf
        piv = a[k, k + 1]
        if piv == 0:
            return 0.0
        pf = pf * piv
        for i in range(k + 2, n):
            ti = a[k, i] / piv
            for j in range(k + 2, n):
                tj = a[k, j] / piv
                a[i, j] = a[i, j] + ti * a[j, k + 1] - a[i, k + 1] * tj
    return pf


def pfaffian(A):
    cdef double complex[:, ::1] a = np.array(A, dtype=np.complex128, order="C")
    if a.shape[0] != a.shape[1]:
        raise ValueError("square matrix required")
    return complex(_pf_inplace(a))


def batch_pfaffian(stack):
    cdef double complex[:, :, ::1] s = np.array(stack, dtype=np.complex128, order="C")
    cdef Py_ssize_t m = s.shape[0], idx
    out = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] o = out
    if s.shape[1] != s.shape[2]:
        raise ValueError("square matrices required")
    with nogil:
        for idx in range(m):
            o[idx] = _pf_inplace(s[idx])
    return out


def loop_phase(links):
    cdef double complex[:, ::1] l = np.ascontiguousarray(links, dtype=np.complex128)
    cdef Py_ssize_t f = l.shape[0], e = l.shape[1], i, j
    cdef double complex prod
    out = np.empty(f, dtype=np.float64)
    cdef double[::1] o = out
    for i in range(f):
        prod = 1.0
        for j in range(e):
            prod = prod * l[i, j]
        o[i] = atan2(prod.imag, prod.real)
    return out
