"""The subspace generator: latent noise -> binary feature masks."""

from dataclasses import asdict, dataclass
from math import ceil

import numpy as np

from ._backend import kernels
from .errors import InputError
from .kernel_mmd import UNBIASED, _offdiag_flag
from .lens import LensDistribution
from .nn import Mlp
from .optim import AdadeltaState


@dataclass
class TrainConfig:
    epochs: int = 2000
    batch_size: int = 500
    learning_rate: float = 0.007
    decay_rho: float = 0.99
    weight_decay: float = 0.04
    encoder_period: int = 5
    kernel_learning: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 0:
            raise InputError("epochs must be nonnegative")
        if self.batch_size < 1:
            raise InputError("batch_size must be positive")
        if not self.learning_rate > 0:
            raise InputError("learning_rate must be positive")
        if not 0.0 < self.decay_rho < 1.0:
            raise InputError("decay_rho must lie in (0, 1)")
        if self.weight_decay < 0:
            raise InputError("weight_decay must be nonnegative")
        if self.encoder_period < 1:
            raise InputError("encoder_period must be positive")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, values):
        unknown = set(values) - set(cls.__dataclass_fields__)
        if unknown:
            raise InputError(f"unknown train config keys: {sorted(unknown)}")
        return cls(**values)


def generator_dims(d):
    """Latent width, four growing hidden layers, then the d-wide output."""
    if d < 2:
        raise InputError("the generator needs at least two features")
    return [
        max(1, ceil(d / 16)),
        max(1, ceil(d / 8)),
        max(1, ceil(d / 4)),
        max(1, ceil(d / 2)),
        d,
        d,
    ]


class GeneratorNet:
    """Generator parameters plus the optimizer state that trains them."""

    def __init__(self, mlp, rng_seed=0, optimizer=None):
        self.mlp = mlp
        self.rng_seed = rng_seed
        self.optimizer = optimizer if optimizer is not None else AdadeltaState(mlp.params())

    @classmethod
    def initialize(cls, d, seed=0):
        rng = np.random.default_rng([seed, 0])
        return cls(Mlp.initialize(generator_dims(d), rng), rng_seed=seed)

    @property
    def layer_dims(self):
        return self.mlp.dims

    @property
    def latent_dim(self):
        return self.mlp.dims[0]

    @property
    def dim(self):
        return self.mlp.dims[-1]

    def params(self):
        return self.mlp.params()

    def copy(self):
        return GeneratorNet(self.mlp.copy(), self.rng_seed, self.optimizer.copy())


def softmax(logits):
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def upper_softmax(pre_activation):
    """Binary mask: coordinates whose softmax weight exceeds 1/d.

    A row with no such coordinate (exactly uniform softmax) gets the bit of
    its first maximal pre-activation set instead. Accepts a vector or a
    batch of rows.
    """
    x = np.asarray(pre_activation, dtype=np.float64)
    d = x.shape[-1]
    if d < 2:
        raise InputError("upper softmax needs at least two coordinates")
    mask = _upper_softmax_from(x, softmax(x))
    return mask


def _upper_softmax_from(logits, probs):
    d = logits.shape[-1]
    mask = (probs - 1.0 / d > 0).astype(np.uint8)
    flat = mask.reshape(-1, d)
    empty = ~flat.any(axis=1)
    if empty.any():
        rows = np.flatnonzero(empty)
        flat[rows, np.argmax(logits.reshape(-1, d)[rows], axis=1)] = 1
    return flat.reshape(mask.shape)


def generator_forward(net, z):
    """Masks, relaxed softmax outputs and a backprop cache for latent ``z``.

    ``z`` may be one latent vector or a batch of rows.
    """
    z = np.asarray(z, dtype=np.float64)
    single = z.ndim == 1
    zb = z[None, :] if single else z
    if zb.ndim != 2 or zb.shape[1] != net.latent_dim:
        raise InputError(f"latent vectors must have length {net.latent_dim}")
    logits, mlp_cache = net.mlp.forward(zb)
    relaxed = softmax(logits)
    mask = _upper_softmax_from(logits, relaxed)
    cache = (mlp_cache, logits, relaxed)
    if single:
        return mask[0], relaxed[0], cache
    return mask, relaxed, cache


def softmax_backward(relaxed, grad_probs):
    """Vector-Jacobian product of the row-wise softmax."""
    inner = np.einsum("ij,ij->i", grad_probs, relaxed)
    return relaxed * (grad_probs - inner[:, None])


def generator_backward(net, cache, grad_mask):
    """Straight-through: d(loss)/d(mask) goes through the softmax Jacobian."""
    mlp_cache, _, relaxed = cache
    grad_logits = softmax_backward(relaxed, grad_mask)
    grads, _ = net.mlp.backward(mlp_cache, grad_logits)
    return grads


def _check_batch(batch, noise, net):
    batch = np.asarray(batch, dtype=np.float64)
    noise = np.asarray(noise, dtype=np.float64)
    if batch.ndim != 2 or batch.shape[0] < 2:
        raise InputError("a batch needs at least two rows")
    if noise.shape[0] != batch.shape[0]:
        raise InputError("batch and noise row counts differ")
    if batch.shape[1] != net.dim:
        raise InputError("batch width does not match the generator")
    return batch, noise


def vgan_loss_and_grad(net, batch, noise, spec, variant=UNBIASED, relaxed=False):
    """MMD^2 between a batch and its masked copy, with generator gradients.

    With ``relaxed=False`` (training) the loss and the derivative with
    respect to the masks are evaluated at the binary masks and passed
    straight through to the softmax. ``relaxed=True`` substitutes the
    softmax outputs for the masks everywhere, giving the smooth surrogate
    whose exact gradient the same code path computes.

    A kernel spec carrying an autoencoder as its encoder yields the
    kernel-learning loss (MMD term minus reconstruction error).
    """
    if spec.encoder is not None:
        from .kernel_learning import kl_loss_and_grads

        base = type(spec)(spec.bandwidth2)
        loss, grads, _ = kl_loss_and_grads(net, spec.encoder, batch, noise, base, variant, relaxed)
        return loss, grads
    batch, noise = _check_batch(batch, noise, net)
    offdiag = _offdiag_flag(variant, batch.shape[0], batch.shape[0])
    mask, probs, cache = generator_forward(net, noise)
    used = probs if relaxed else mask
    masked = used * batch
    loss, _, grad_masked = kernels.mmd2_grad(batch, masked, spec.bandwidth2, offdiag)
    grads = generator_backward(net, cache, grad_masked * batch)
    return loss, grads


def sample_masks(net, count, rng):
    z = rng.random((count, net.latent_dim))
    mask, _, _ = generator_forward(net, z)
    return mask


def sample_lens(net, count=500, seed=0):
    """Draw ``count`` masks and deduplicate them into a lens distribution."""
    if count < 1:
        raise InputError("count must be positive")
    return LensDistribution.from_draws(sample_masks(net, count, np.random.default_rng(seed)))
