"""Synthetic data, lens recovery, one-class benchmark and timing runs."""

import logging
import time
from dataclasses import dataclass, replace

import numpy as np

from .errors import InputError, TrainingError
from .generator import TrainConfig, sample_lens
from .kernel_mmd import KernelSpec, median_heuristic, myopicity_test
from .lens import LensDistribution
from .od_ensemble import (
    auc,
    ensemble_scores,
    feature_bagging_lens,
    one_class_split,
)
from .training import train_vgan

log = logging.getLogger(__name__)

LENS_COLUMNS = ["F", "rep", "Fhat_S1", "Fhat_S2", "other"]
OD_COLUMNS = ["method", "detector", "rep", "auc", "wallclock_seconds", "myopicity_reject"]
SCALABILITY_COLUMNS = ["d", "seconds", "epochs", "status"]

# Lower end and step of the feature-bagging K grid (five values up to 500).
FB_GRID = (50, 162, 275, 387, 500)


@dataclass(frozen=True)
class SyntheticSpec:
    n: int
    F: float
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise InputError("n must be positive")
        if not 0.0 <= self.F <= 1.0:
            raise InputError("F must lie in [0, 1]")


def gen_synthetic_population(spec):
    """Rows from the plane (g1, g2, 0) with probability F, else the line (0, 0, g3)."""
    rng = np.random.default_rng(spec.seed)
    g = rng.standard_normal((spec.n, 3))
    on_plane = rng.random(spec.n) < spec.F
    out = np.zeros((spec.n, 3))
    out[on_plane, :2] = g[on_plane, :2]
    out[~on_plane, 2] = g[~on_plane, 2]
    return out


def far_outliers(count, distance=10.0, seed=0):
    """Points with every coordinate at +-``distance``.

    They stay separated from the population in every axis-parallel
    projection, not only in the full space.
    """
    rng = np.random.default_rng(seed)
    return distance * rng.choice([-1.0, 1.0], (count, 3))


def line_tail_outliers(count, low=3.0, high=4.0, seed=0):
    """Points on the (0, 0, x3) line with |x3| in [low, high]."""
    rng = np.random.default_rng(seed)
    out = np.zeros((count, 3))
    out[:, 2] = rng.choice([-1.0, 1.0], count) * rng.uniform(low, high, count)
    return out


def labeled_population(spec, outliers):
    data = np.vstack([gen_synthetic_population(spec), outliers])
    labels = np.r_[np.zeros(spec.n, dtype=np.int64), np.ones(outliers.shape[0], dtype=np.int64)]
    return data, labels


def bandwidth_for(data, max_rows=2000, seed=0):
    """Median-heuristic bandwidth, on a seeded subsample for large inputs."""
    data = np.asarray(data, dtype=np.float64)
    if data.shape[0] > max_rows:
        rng = np.random.default_rng(seed)
        data = data[rng.choice(data.shape[0], max_rows, replace=False)]
    return median_heuristic(data)


def attribute_lens(lens):
    """Split lens mass into S1 (support within features 1-2), S2 (exactly 3), other."""
    s1 = s2 = other = 0.0
    for mask, p in zip(lens.masks, lens.probs):
        support = set(np.flatnonzero(mask))
        if support and support <= {0, 1}:
            s1 += p
        elif support == {2}:
            s2 += p
        else:
            other += p
    total = s1 + s2 + other
    return float(s1 / total), float(s2 / total), float(other / total)


def run_lens_experiment(F_values, repetitions=10, n=10000, train=None, seed=0,
                        lens_samples=500, kernel_rows=2000):
    """Train on fresh populations and report the recovered subspace weights."""
    train = train if train is not None else TrainConfig()
    rows = []
    for F in F_values:
        if not 0.0 <= F <= 1.0:
            raise InputError("F values must lie in [0, 1]")
        for rep in range(repetitions):
            rep_seed = seed + rep
            data = gen_synthetic_population(SyntheticSpec(n, F, rep_seed))
            spec = KernelSpec(bandwidth_for(data, kernel_rows, rep_seed))
            try:
                result = train_vgan(data, replace(train, seed=rep_seed, kernel_learning=False), spec)
            except TrainingError as exc:
                log.warning("F=%s rep=%d failed: %s", F, rep, exc)
                nan = float("nan")
                rows.append({"F": float(F), "rep": rep, "Fhat_S1": nan, "Fhat_S2": nan, "other": nan})
                continue
            lens = sample_lens(result.net, lens_samples, rep_seed)
            s1, s2, other = attribute_lens(lens)
            rows.append({"F": float(F), "rep": rep, "Fhat_S1": s1, "Fhat_S2": s2, "other": other})
    return rows


def full_space_lens(d):
    return LensDistribution(np.ones((1, d), dtype=np.uint8), np.ones(1))


def _method_lens(method, train_rows, train_cfg, rep_seed, fb_k, lens_samples, kernel_rows):
    d = train_rows.shape[1]
    if method == "full":
        return full_space_lens(d)
    if method == "fb":
        return feature_bagging_lens(d, fb_k, rep_seed)
    if method == "vgan":
        spec = KernelSpec(bandwidth_for(train_rows, kernel_rows, rep_seed))
        result = train_vgan(train_rows, replace(train_cfg, seed=rep_seed), spec)
        return sample_lens(result.net, lens_samples, rep_seed)
    raise InputError(f"unknown subspace method {method!r}")


def run_od_benchmark(data, labels, methods=("vgan", "fb", "full"), detectors=("lof",),
                     repetitions=10, train=None, seed=0, k=None, fb_k=50, lens_samples=500,
                     alpha=0.10, num_permutations=200, test_rows=1000, kernel_rows=2000,
                     myopicity=True):
    """One-class benchmark: split, build each method's lens, score, report AUC."""
    train = train if train is not None else TrainConfig()
    rows = []
    for rep in range(repetitions):
        rep_seed = seed + rep
        split = one_class_split(data, labels, 0.8, rep_seed)
        for method in methods:
            start = time.perf_counter()
            try:
                lens = _method_lens(method, split.train, train, rep_seed, fb_k,
                                    lens_samples, kernel_rows)
            except (TrainingError, InputError) as exc:
                log.warning("rep %d method %s failed: %s", rep, method, exc)
                for det in detectors:
                    rows.append({"method": method, "detector": det, "rep": rep,
                                 "auc": float("nan"), "wallclock_seconds": float("nan"),
                                 "myopicity_reject": "error"})
                continue
            build_time = time.perf_counter() - start
            reject = "skipped"
            if myopicity:
                sub = split.train
                if sub.shape[0] > test_rows:
                    pick = np.random.default_rng(rep_seed).choice(sub.shape[0], test_rows, replace=False)
                    sub = sub[np.sort(pick)]
                spec = KernelSpec(bandwidth_for(sub, kernel_rows, rep_seed))
                result = myopicity_test(sub, lens, spec, alpha, num_permutations, rep_seed)
                reject = "true" if result.reject else "false"
            for det in detectors:
                t0 = time.perf_counter()
                try:
                    scores = ensemble_scores(split, lens, det, k).scores
                    value = auc(scores, split.test_labels)
                except InputError as exc:
                    log.warning("rep %d method %s detector %s failed: %s", rep, method, det, exc)
                    value = float("nan")
                rows.append({
                    "method": method,
                    "detector": det,
                    "rep": rep,
                    "auc": value,
                    "wallclock_seconds": build_time + time.perf_counter() - t0,
                    "myopicity_reject": reject,
                })
    return rows


class _Timeout(Exception):
    pass


def run_scalability(d_values, n=1000, train=None, seed=0, time_budget=None):
    """Time training on uniform noise for each feature count.

    Call inside a single-thread limit (the CLI does this). Runs that exceed
    ``time_budget`` seconds stop at the next epoch boundary and are marked
    ``timeout``.
    """
    train = train if train is not None else TrainConfig(epochs=200)
    rows = []
    histories = {}
    for d in d_values:
        if d < 2:
            raise InputError("feature counts must be at least 2")
        data = np.random.default_rng([seed, d]).random((n, d))
        spec = KernelSpec(bandwidth_for(data, 2000, seed))
        start = time.perf_counter()

        def guard(epoch, loss, start=start):
            if time_budget is not None and time.perf_counter() - start > time_budget:
                raise _Timeout

        status = "ok"
        try:
            result = train_vgan(data, replace(train, seed=seed), spec, on_epoch=guard)
            histories[d] = result.loss_history
        except _Timeout:
            status = "timeout"
        except TrainingError as exc:
            log.warning("d=%d failed: %s", d, exc)
            status = "error"
        seconds = time.perf_counter() - start
        rows.append({"d": int(d), "seconds": seconds, "epochs": train.epochs, "status": status})
    run_scalability.last_histories = histories
    return rows
