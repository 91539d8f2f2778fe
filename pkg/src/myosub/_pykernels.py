"""Pure numpy implementations of the numerical kernels.

Every function here has a twin in ``_ckernels.pyx`` with the same signature.
The package picks one of the two at import time (see ``_backend``).
"""

import numpy as np

# Bounds on the (rows, m, d) difference block materialised by ``sqdist``.
_CHUNK = 256
_CHUNK_ELEMS = 4_000_000


def sqdist(a, b):
    """Exact pairwise squared Euclidean distances (n, m).

    Uses explicit differences rather than the ``|a|^2 + |b|^2 - 2ab``
    expansion, so coincident points get exactly zero distance.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    out = np.empty((a.shape[0], b.shape[0]))
    step = max(1, min(_CHUNK, _CHUNK_ELEMS // max(1, b.shape[0] * a.shape[1])))
    for start in range(0, a.shape[0], step):
        diff = a[start:start + step, None, :] - b[None, :, :]
        out[start:start + step] = np.einsum("ijk,ijk->ij", diff, diff)
    return out


def _gram_sqdist(a, b):
    # BLAS route: fast for wide data, tiny cancellation error near zero.
    aa = np.einsum("ij,ij->i", a, a)
    bb = np.einsum("ij,ij->i", b, b)
    d2 = aa[:, None] + bb[None, :] - 2.0 * (a @ b.T)
    np.maximum(d2, 0.0, out=d2)
    return d2


def gaussian_gram(a, b, bandwidth2):
    """Gaussian kernel matrix exp(-|a_i - b_j|^2 / (2 * bandwidth2))."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    return np.exp(_gram_sqdist(a, b) / (-2.0 * bandwidth2))


def _offdiag_sum(k):
    return k.sum() - np.trace(k)


def mmd2(a, b, bandwidth2, offdiag_cross):
    """Squared MMD between samples ``a`` and ``b`` under a Gaussian kernel.

    ``offdiag_cross`` selects the cross term that skips i == j pairs and is
    normalised by 2/n^2 (requires len(a) == len(b)).
    """
    value, _, _ = _mmd2_parts(a, b, bandwidth2, offdiag_cross, need_grad=False)
    return value


def mmd2_grad(a, b, bandwidth2, offdiag_cross):
    """Squared MMD plus its gradients with respect to every row of a and b."""
    return _mmd2_parts(a, b, bandwidth2, offdiag_cross, need_grad=True)


def _mmd2_parts(a, b, bandwidth2, offdiag_cross, need_grad):
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    n, m = a.shape[0], b.shape[0]
    kaa = gaussian_gram(a, a, bandwidth2)
    kbb = gaussian_gram(b, b, bandwidth2)
    kab = gaussian_gram(a, b, bandwidth2)
    c_aa = 1.0 / (n * (n - 1))
    c_bb = 1.0 / (m * (m - 1))
    if offdiag_cross:
        np.fill_diagonal(kab, 0.0)
        c_ab = 2.0 / (n * n)
    else:
        c_ab = 2.0 / (n * m)
    value = c_aa * _offdiag_sum(kaa) + c_bb * _offdiag_sum(kbb) - c_ab * kab.sum()
    if not need_grad:
        return float(value), None, None

    # d k(u, v) / du = k(u, v) * (v - u) / bandwidth2
    np.fill_diagonal(kaa, 0.0)
    np.fill_diagonal(kbb, 0.0)
    inv_h = 1.0 / bandwidth2
    w_aa = (2.0 * c_aa * inv_h) * kaa
    w_bb = (2.0 * c_bb * inv_h) * kbb
    w_ab = (c_ab * inv_h) * kab
    grad_a = (w_aa @ a - w_aa.sum(axis=1)[:, None] * a) - (
        w_ab @ b - w_ab.sum(axis=1)[:, None] * a
    )
    grad_b = (w_bb @ b - w_bb.sum(axis=1)[:, None] * b) - (
        w_ab.T @ a - w_ab.sum(axis=0)[:, None] * b
    )
    return float(value), grad_a, grad_b
