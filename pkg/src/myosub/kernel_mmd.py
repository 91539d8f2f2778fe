"""Gaussian kernels, MMD^2 estimators and the permutation myopicity test."""

from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from ._backend import kernels
from .errors import InputError
from .lens import LensDistribution

UNBIASED = "unbiased_cross_full"
PAPER_EQ6 = "paper_eq6_cross_offdiag"
VARIANTS = (UNBIASED, PAPER_EQ6)

# Permutation statistics are evaluated this many at a time.
_PERM_BLOCK = 64


@dataclass(frozen=True)
class KernelSpec:
    """Gaussian kernel exp(-|x - y|^2 / (2 * bandwidth2)).

    If ``encoder`` is given (any object with an ``encode(rows)`` method),
    both arguments are encoded before the base kernel is applied.
    """

    bandwidth2: float
    kind: str = "gaussian"
    encoder: Optional[Any] = None

    def __post_init__(self):
        if self.kind != "gaussian":
            raise InputError(f"unsupported kernel kind {self.kind!r}")
        if not (self.bandwidth2 > 0 and np.isfinite(self.bandwidth2)):
            raise InputError("bandwidth2 must be a positive finite number")

    def features(self, rows):
        rows = np.asarray(rows, dtype=np.float64)
        if self.encoder is None:
            return rows
        return self.encoder.encode(rows)


@dataclass(frozen=True)
class MmdEstimate:
    value: float
    variant: str
    sample_sizes: tuple


@dataclass(frozen=True)
class MmdTestResult:
    statistic: float
    p_value: float
    alpha: float
    reject: bool
    num_permutations: int


def gaussian_kernel(x, y, spec):
    """Kernel value between two vectors; 1.0 exactly when x == y."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise InputError(f"dimension mismatch: {x.shape[0]} vs {y.shape[0]}")
    fx, fy = spec.features(x[None, :])[0], spec.features(y[None, :])[0]
    diff = fx - fy
    return float(np.exp(-np.dot(diff, diff) / (2.0 * spec.bandwidth2)))


def median_heuristic(data):
    """Half the median squared pairwise distance over distinct row pairs.

    Falls back to 1.0 when every row is identical.
    """
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] < 2:
        raise InputError("median heuristic needs at least two rows")
    d2 = kernels.sqdist(data, data)
    iu = np.triu_indices(data.shape[0], k=1)
    med = float(np.median(d2[iu]))
    if med <= 0.0:
        return 1.0
    return med / 2.0


def _check_pair(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2:
        raise InputError("samples must be two-dimensional arrays")
    if a.shape[0] < 2 or b.shape[0] < 2:
        raise InputError("each sample needs at least two rows")
    if a.shape[1] != b.shape[1]:
        raise InputError("samples have different column counts")
    return a, b


def _offdiag_flag(variant, n, m):
    if variant == UNBIASED:
        return False
    if variant == PAPER_EQ6:
        if n != m:
            raise InputError(f"{PAPER_EQ6} requires equal sample sizes")
        return True
    raise InputError(f"unknown MMD variant {variant!r}")


def mmd2(sample_a, sample_b, spec, variant=UNBIASED):
    """Squared MMD estimate between two samples.

    ``unbiased_cross_full`` is the standard unbiased estimator;
    ``paper_eq6_cross_offdiag`` drops the i == j cross pairs and scales the
    cross sum by 2/n^2.
    """
    a, b = _check_pair(sample_a, sample_b)
    offdiag = _offdiag_flag(variant, a.shape[0], b.shape[0])
    value = kernels.mmd2(spec.features(a), spec.features(b), spec.bandwidth2, offdiag)
    return MmdEstimate(float(value), variant, (a.shape[0], b.shape[0]))


def _split_statistics(gram, labels, n_a):
    """Unbiased MMD^2 for each 0/1 group assignment (columns of ``labels``).

    Group sums come from one matrix product: with l the indicator of group
    A, sum_AA = l'Kl, sum_AB = l'r - l'Kl and sum_BB = T - 2l'r + l'Kl where
    r holds the row sums and T the grand total.
    """
    total_n = gram.shape[0]
    n_b = total_n - n_a
    diag = np.diag(gram)
    rows = gram.sum(axis=1)
    grand = rows.sum()
    trace = diag.sum()
    out = np.empty(labels.shape[1])
    for start in range(0, labels.shape[1], _PERM_BLOCK):
        block = labels[:, start:start + _PERM_BLOCK]
        kl = gram @ block
        s_aa_full = np.einsum("ij,ij->j", block, kl)
        l_r = block.T @ rows
        tr_a = block.T @ diag
        s_ab = l_r - s_aa_full
        s_bb_full = grand - 2.0 * l_r + s_aa_full
        out[start:start + block.shape[1]] = (
            (s_aa_full - tr_a) / (n_a * (n_a - 1.0))
            + (s_bb_full - (trace - tr_a)) / (n_b * (n_b - 1.0))
            - 2.0 * s_ab / (n_a * n_b)
        )
    return out


def permutation_test(sample_a, sample_b, spec, alpha=0.10, num_permutations=200, seed=0):
    """Two-sample permutation test on the unbiased MMD^2 statistic."""
    a, b = _check_pair(sample_a, sample_b)
    if not 0.0 < alpha < 1.0:
        raise InputError("alpha must lie in (0, 1)")
    if num_permutations < 1:
        raise InputError("num_permutations must be positive")
    rng = np.random.default_rng(seed)
    n_a = a.shape[0]
    pooled = spec.features(np.vstack([a, b]))
    gram = kernels.gaussian_gram(pooled, pooled, spec.bandwidth2)
    total = pooled.shape[0]
    labels = np.zeros((total, num_permutations + 1))
    labels[:n_a, 0] = 1.0
    for p in range(1, num_permutations + 1):
        labels[rng.permutation(total)[:n_a], p] = 1.0
    stats = _split_statistics(gram, labels, n_a)
    observed = stats[0]
    p_value = (1.0 + np.count_nonzero(stats[1:] >= observed)) / (num_permutations + 1.0)
    return MmdTestResult(
        statistic=float(observed),
        p_value=float(p_value),
        alpha=float(alpha),
        reject=bool(p_value <= alpha),
        num_permutations=int(num_permutations),
    )


def project_with_lens(data, lens, rng):
    """Apply one independently drawn lens mask to every row."""
    idx = rng.choice(len(lens), size=data.shape[0], p=lens.probs)
    return data * lens.masks[idx]


def myopicity_test(data, lens, spec, alpha=0.10, num_permutations=200, seed=0):
    """Test H0: the data and its lens projection share one distribution.

    Each row gets its own mask drawn from ``lens``; the projected sample is
    then compared with the original by an MMD^2 permutation test.
    """
    data = np.asarray(data, dtype=np.float64)
    if not isinstance(lens, LensDistribution) or len(lens) == 0:
        raise InputError("myopicity test needs a nonempty lens distribution")
    if data.ndim != 2 or data.shape[1] != lens.dim:
        raise InputError("lens width does not match the data")
    rng = np.random.default_rng(seed)
    projected = project_with_lens(data, lens, rng)
    return permutation_test(
        data, projected, spec, alpha, num_permutations, seed=rng.integers(2**63)
    )
