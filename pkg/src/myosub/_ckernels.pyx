# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: fused Gaussian MMD^2 with gradients, exact distances.

Loops run in a fixed order, so results do not depend on thread count.
Wide inputs are handed to the BLAS-backed numpy versions instead, where
direct loops lose to matrix products.
"""

import numpy as np
cimport numpy as cnp

from . import _pykernels

cnp.import_array()

cdef extern from "_vexp.h":
    void myosub_vexp(double *buf, long n, double scale) nogil

# Above these feature widths the direct loops lose to BLAS (measured with
# benchmarks/bench_kernels.py).
DIRECT_MAX_DIM = 24
DIRECT_MAX_DIM_GRAD = 12


cdef inline double _sq(const double[:, ::1] a, Py_ssize_t i,
                       const double[:, ::1] b, Py_ssize_t j,
                       Py_ssize_t p) noexcept nogil:
    cdef double s = 0.0, t
    cdef Py_ssize_t k
    for k in range(p):
        t = a[i, k] - b[j, k]
        s += t * t
    return s


def sqdist(a, b):
    """Exact pairwise squared Euclidean distances (n, m)."""
    cdef const double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:, ::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t n = av.shape[0], m = bv.shape[0], p = av.shape[1]
    out = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t i, j
    with nogil:
        for i in range(n):
            for j in range(m):
                ov[i, j] = _sq(av, i, bv, j, p)
    return out


def gaussian_gram(a, b, double bandwidth2):
    """Gaussian kernel matrix exp(-|a_i - b_j|^2 / (2 * bandwidth2))."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    if a.shape[1] > DIRECT_MAX_DIM_GRAD:
        return _pykernels.gaussian_gram(a, b, bandwidth2)
    out = sqdist(a, b)
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(ov.shape[0]):
            myosub_vexp(&ov[i, 0], ov.shape[1], -0.5 / bandwidth2)
    return out


cdef extern from "_mmd_core.h":
    double myosub_within(const double *x, long n, long p, double scale,
                         double coef, double *g, double *buf) nogil
    double myosub_cross(const double *a, long n, const double *b, long m,
                        long p, double scale, double coef, int offdiag,
                        double *ga, double *gb, double *buf) nogil


def _mmd2_direct(a, b, double bandwidth2, bint offdiag_cross, bint need_grad):
    # feature-major copies keep the per-row sample loops contiguous
    cdef const double[:, ::1] at = np.ascontiguousarray(a.T)
    cdef const double[:, ::1] bt = np.ascontiguousarray(b.T)
    cdef long p = at.shape[0], n = at.shape[1], m = bt.shape[1]
    cdef double c_aa = 1.0 / (n * (n - 1.0))
    cdef double c_bb = 1.0 / (m * (m - 1.0))
    cdef double c_ab = 2.0 / (n * <double>n) if offdiag_cross else 2.0 / (n * <double>m)
    cdef double scale = -0.5 / bandwidth2
    cdef double inv_h = 1.0 / bandwidth2
    grad_a = np.zeros((p, n), dtype=np.float64)
    grad_b = np.zeros((p, m), dtype=np.float64)
    cdef double[:, ::1] gav = grad_a
    cdef double[:, ::1] gbv = grad_b
    cdef double *ga = &gav[0, 0] if need_grad else NULL
    cdef double *gb = &gbv[0, 0] if need_grad else NULL
    work = np.empty(max(n, m), dtype=np.float64)
    cdef double[::1] wv = work
    cdef double s_aa, s_bb, s_ab
    with nogil:
        s_aa = myosub_within(&at[0, 0], n, p, scale, 2.0 * c_aa * inv_h, ga, &wv[0])
        s_bb = myosub_within(&bt[0, 0], m, p, scale, 2.0 * c_bb * inv_h, gb, &wv[0])
        s_ab = myosub_cross(&at[0, 0], n, &bt[0, 0], m, p, scale, -c_ab * inv_h,
                            offdiag_cross, ga, gb, &wv[0])
    value = c_aa * s_aa + c_bb * s_bb - c_ab * s_ab
    if not need_grad:
        return value, None, None
    return value, grad_a.T.copy(), grad_b.T.copy()


def mmd2(a, b, double bandwidth2, bint offdiag_cross):
    """Squared MMD between samples ``a`` and ``b`` under a Gaussian kernel."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    if a.shape[1] > DIRECT_MAX_DIM:
        return _pykernels.mmd2(a, b, bandwidth2, offdiag_cross)
    return _mmd2_direct(a, b, bandwidth2, offdiag_cross, False)[0]


def mmd2_grad(a, b, double bandwidth2, bint offdiag_cross):
    """Squared MMD plus its gradients with respect to every row of a and b."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    if a.shape[1] > DIRECT_MAX_DIM_GRAD:
        return _pykernels.mmd2_grad(a, b, bandwidth2, offdiag_cross)
    return _mmd2_direct(a, b, bandwidth2, offdiag_cross, True)
