"""Outlier detectors on subspace projections and their weighted ensembles."""

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from ._backend import kernels
from .errors import InputError
from .lens import LensDistribution, as_mask, mask_key

DEFAULT_K = {"lof": 20, "knn": 5}

# Query rows handled per distance block.
_BLOCK = 512

# Mean reachability distances are floored here so duplicate points keep a
# finite local reachability density.
REACH_FLOOR = 1e-12


@dataclass
class OdScores:
    scores: np.ndarray
    detector: str
    k: int


@dataclass
class LabeledSplit:
    """Inlier-only training rows, mixed test rows, test labels (1 = outlier)."""

    train: np.ndarray
    test: np.ndarray
    test_labels: np.ndarray

    def __post_init__(self):
        self.train = np.asarray(self.train, dtype=np.float64)
        self.test = np.asarray(self.test, dtype=np.float64)
        self.test_labels = np.asarray(self.test_labels, dtype=np.int64)
        if self.train.ndim != 2 or self.train.shape[0] == 0:
            raise InputError("training set must be a nonempty matrix")
        if self.test.ndim != 2 or self.test.shape[1] != self.train.shape[1]:
            raise InputError("test set must have the training set's columns")
        if self.test_labels.shape != (self.test.shape[0],):
            raise InputError("one label per test row is required")


def project(data, mask):
    """Keep the columns selected by ``mask`` (order preserved)."""
    data = np.asarray(data, dtype=np.float64)
    mask = as_mask(mask, data.shape[1])
    return data[:, mask.astype(bool)]


def _distances(query, ref):
    return np.sqrt(kernels.sqdist(query, ref))


def _kth(dist, k):
    return np.partition(dist, k - 1, axis=1)[:, k - 1]


def _k_distances(query, ref, k, exclude_self=False):
    out = np.empty(query.shape[0])
    for start in range(0, query.shape[0], _BLOCK):
        dist = _distances(query[start:start + _BLOCK], ref)
        if exclude_self:
            rows = np.arange(dist.shape[0])
            dist[rows, rows + start] = np.inf
        out[start:start + _BLOCK] = _kth(dist, k)
    return out


def _reach_stats(query, ref, k, ref_kdist, ref_lrd, exclude_self=False):
    """Local reachability density of each query row against ``ref``.

    The neighbourhood holds every reference point within the k-distance,
    so ties can make it larger than k. With ``ref_lrd`` given, also returns
    the mean density of each query's neighbours.
    """
    lrd = np.empty(query.shape[0])
    neigh_lrd = np.empty(query.shape[0]) if ref_lrd is not None else None
    for start in range(0, query.shape[0], _BLOCK):
        dist = _distances(query[start:start + _BLOCK], ref)
        if exclude_self:
            rows = np.arange(dist.shape[0])
            dist[rows, rows + start] = np.inf
        kdist = _kth(dist, k)
        inside = dist <= kdist[:, None]
        count = inside.sum(axis=1)
        reach = np.maximum(dist, ref_kdist[None, :])
        mean_reach = np.where(inside, reach, 0.0).sum(axis=1) / count
        lrd[start:start + _BLOCK] = 1.0 / np.maximum(mean_reach, REACH_FLOOR)
        if ref_lrd is not None:
            neigh_lrd[start:start + _BLOCK] = (
                np.where(inside, ref_lrd[None, :], 0.0).sum(axis=1) / count
            )
    return lrd, neigh_lrd


def knn_score(split, k=DEFAULT_K["knn"]):
    """Distance from each test row to its k-th nearest training row."""
    if not 1 <= k <= split.train.shape[0]:
        raise InputError(f"k={k} must lie in [1, n_train={split.train.shape[0]}]")
    return OdScores(_k_distances(split.test, split.train, k), "knn", k)


def lof_score(split, k=DEFAULT_K["lof"]):
    """Local outlier factor of each test row relative to the training rows."""
    train = split.train
    if not 1 <= k < train.shape[0]:
        raise InputError(f"k={k} must lie in [1, n_train={train.shape[0]})")
    train_kdist = _k_distances(train, train, k, exclude_self=True)
    train_lrd, _ = _reach_stats(train, train, k, train_kdist, None, exclude_self=True)
    test_lrd, neigh_lrd = _reach_stats(split.test, train, k, train_kdist, train_lrd)
    return OdScores(neigh_lrd / test_lrd, "lof", k)


DETECTORS = {"lof": lof_score, "knn": knn_score}


def detector_scores(split, detector, k=None):
    try:
        fn = DETECTORS[detector]
    except KeyError:
        raise InputError(f"unknown detector {detector!r}") from None
    return fn(split, DEFAULT_K[detector] if k is None else k)


def ensemble_scores(split, lens, detector="lof", k=None):
    """Probability-weighted sum of detector scores over the lens subspaces.

    Raw scores are combined without per-subspace normalisation, summed in
    lens-entry order.
    """
    if lens.dim != split.train.shape[1]:
        raise InputError("lens width does not match the data")
    total = None
    k_used = DEFAULT_K.get(detector) if k is None else k
    for mask, prob in zip(lens.masks, lens.probs):
        sub = LabeledSplit(project(split.train, mask), project(split.test, mask), split.test_labels)
        try:
            scores = detector_scores(sub, detector, k_used).scores
        except InputError as exc:
            raise InputError(f"subspace {mask_key(mask)}: {exc}") from exc
        term = prob * scores
        total = term if total is None else total + term
    return OdScores(total, detector, k_used)


def auc(scores, labels):
    """ROC AUC as the Mann-Whitney statistic; ties count one half."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape:
        raise InputError("scores and labels differ in length")
    pos = labels == 1
    n_pos = int(pos.sum())
    n_neg = labels.shape[0] - n_pos
    if n_pos == 0 or n_neg == 0:
        raise InputError("AUC needs both outliers and inliers")
    ranks = rankdata(scores)
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def feature_bagging_lens(d, num_subspaces, seed=0):
    """Uniform random subspaces of size floor(d/2)..d-1, equally weighted."""
    if d < 2:
        raise InputError("feature bagging needs at least two features")
    if num_subspaces < 1:
        raise InputError("num_subspaces must be positive")
    rng = np.random.default_rng(seed)
    masks = np.zeros((num_subspaces, d), dtype=np.uint8)
    for row in masks:
        size = rng.integers(d // 2, d)
        row[rng.choice(d, size=size, replace=False)] = 1
    counts = {}
    for row in masks:
        key = mask_key(row)
        counts[key] = counts.get(key, 0) + 1
    return LensDistribution.from_dict(
        {key: c / num_subspaces for key, c in counts.items()}, sample_count=num_subspaces
    )


def one_class_split(data, labels, ratio=0.8, seed=0):
    """Train on a seeded ``ratio`` share of inliers; test on the rest plus outliers."""
    data = np.asarray(data, dtype=np.float64)
    labels = np.asarray(labels)
    if data.ndim != 2 or labels.shape != (data.shape[0],):
        raise InputError("need a data matrix and one label per row")
    if not 0.0 < ratio < 1.0:
        raise InputError("ratio must lie in (0, 1)")
    inliers = np.flatnonzero(labels == 0)
    outliers = np.flatnonzero(labels == 1)
    if inliers.shape[0] < 5 or outliers.shape[0] < 1:
        raise InputError("need at least 5 inliers and 1 outlier")
    rng = np.random.default_rng(seed)
    inliers = inliers[rng.permutation(inliers.shape[0])]
    n_train = int(np.floor(ratio * inliers.shape[0]))
    test_idx = np.concatenate([inliers[n_train:], outliers])
    test_labels = np.concatenate(
        [np.zeros(inliers.shape[0] - n_train, dtype=np.int64), np.ones(outliers.shape[0], dtype=np.int64)]
    )
    return LabeledSplit(data[inliers[:n_train]], data[test_idx], test_labels)
