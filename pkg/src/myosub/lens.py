"""Subspace masks and empirical distributions over them."""

from dataclasses import dataclass

import numpy as np

from .errors import InputError


def as_mask(bits, d=None):
    """Validate a 0/1 vector as a subspace mask and return it as uint8."""
    mask = np.asarray(bits)
    if mask.ndim != 1:
        raise InputError("mask must be one-dimensional")
    if not np.all((mask == 0) | (mask == 1)):
        raise InputError("mask entries must be 0 or 1")
    if d is not None and mask.shape[0] != d:
        raise InputError(f"mask has length {mask.shape[0]}, expected {d}")
    if not mask.any():
        raise InputError("mask selects no features")
    return mask.astype(np.uint8)


def mask_key(mask):
    return "".join("1" if b else "0" for b in mask)


def mask_from_key(key):
    return as_mask([int(c) for c in key])


@dataclass(frozen=True)
class LensDistribution:
    """Distinct subspace masks with their empirical probabilities.

    ``masks`` is a (K, d) uint8 array, ``probs`` a length-K float array
    summing to one. ``sample_count`` is the number of draws the
    probabilities were estimated from (1 for hand-built lenses).
    """

    masks: np.ndarray
    probs: np.ndarray
    sample_count: int = 1

    def __post_init__(self):
        masks = np.atleast_2d(np.asarray(self.masks))
        probs = np.asarray(self.probs, dtype=np.float64).ravel()
        if masks.shape[0] == 0:
            raise InputError("lens distribution is empty")
        if masks.shape[0] != probs.shape[0]:
            raise InputError("masks and probabilities differ in length")
        masks = np.stack([as_mask(m) for m in masks])
        if len({mask_key(m) for m in masks}) != masks.shape[0]:
            raise InputError("lens masks must be pairwise distinct")
        if np.any(probs <= 0) or np.any(probs > 1) or abs(probs.sum() - 1.0) > 1e-9:
            raise InputError("lens probabilities must lie in (0, 1] and sum to 1")
        if self.sample_count < 1:
            raise InputError("sample_count must be positive")
        masks.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "masks", masks)
        object.__setattr__(self, "probs", probs)

    @property
    def dim(self):
        return self.masks.shape[1]

    def __len__(self):
        return self.masks.shape[0]

    @classmethod
    def from_dict(cls, weights, sample_count=1):
        """Build from ``{"110": 0.5, ...}`` or ``{(1, 1, 0): 0.5, ...}``."""
        masks, probs = [], []
        for key, p in weights.items():
            masks.append(mask_from_key(key) if isinstance(key, str) else as_mask(key))
            probs.append(p)
        return cls(np.stack(masks), np.asarray(probs), sample_count)

    @classmethod
    def from_draws(cls, draws):
        """Deduplicate a (count, d) array of masks into a distribution.

        Entries are ordered by mask key, so the result does not depend on
        the order of the draws.
        """
        draws = np.asarray(draws, dtype=np.uint8)
        uniq, counts = np.unique(draws, axis=0, return_counts=True)
        order = np.argsort([mask_key(m) for m in uniq], kind="stable")[::-1]
        total = draws.shape[0]
        return cls(uniq[order], counts[order] / total, total)

    def as_dict(self):
        return {mask_key(m): float(p) for m, p in zip(self.masks, self.probs)}

    def probability(self, bits):
        key = mask_key(bits)
        return self.as_dict().get(key, 0.0)

    def identity_frequency(self):
        """Sampled probability of the all-ones mask (a diagnostic)."""
        return self.probability(np.ones(self.dim, dtype=np.uint8))
