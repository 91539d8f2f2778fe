"""Adversarial kernel learning: an autoencoder whose encoder shapes the kernel.

The encoder is pushed to make the composed-kernel MMD^2 large while the
decoder keeps it close to injective through a reconstruction penalty.
"""

from math import ceil

import numpy as np

from ._backend import kernels
from .errors import InputError, TrainingError
from .generator import _check_batch, generator_backward, generator_forward
from .kernel_mmd import UNBIASED, _offdiag_flag, median_heuristic
from .nn import Mlp
from .optim import AdadeltaState


def encoder_dims(d):
    return [d, max(1, ceil(d / 2)), max(1, ceil(d / 4)), max(1, ceil(d / 8))]


class AutoencoderNet:
    """Encoder/decoder pair; the decoder mirrors the encoder widths."""

    def __init__(self, encoder, decoder, optimizer=None):
        if encoder.dims[-1] != decoder.dims[0] or encoder.dims[0] != decoder.dims[-1]:
            raise InputError("decoder must map the code space back to the input space")
        self.encoder = encoder
        self.decoder = decoder
        self.optimizer = optimizer if optimizer is not None else AdadeltaState(self.params())

    @classmethod
    def initialize(cls, d, seed=0):
        rng = np.random.default_rng([seed, 1])
        dims = encoder_dims(d)
        return cls(Mlp.initialize(dims, rng), Mlp.initialize(dims[::-1], rng))

    @classmethod
    def from_dims(cls, dims, seed=0):
        """Build with explicit encoder widths (decoder mirrored)."""
        rng = np.random.default_rng([seed, 1])
        return cls(Mlp.initialize(list(dims), rng), Mlp.initialize(list(dims)[::-1], rng))

    @property
    def dim(self):
        return self.encoder.dims[0]

    @property
    def code_dim(self):
        return self.encoder.dims[-1]

    def params(self):
        return self.encoder.params() + self.decoder.params()

    def encode(self, rows):
        out, _ = self.encoder.forward(np.atleast_2d(rows))
        return out

    def copy(self):
        return AutoencoderNet(self.encoder.copy(), self.decoder.copy(), self.optimizer.copy())


def encode(ae, x):
    """Encode one vector (or a batch of rows)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != ae.dim:
        raise InputError(f"expected {ae.dim} features, got {x.shape[-1]}")
    if x.ndim == 1:
        return ae.encode(x[None, :])[0]
    return ae.encode(x)


def median_heuristic_in_encoder_space(ae, data):
    return median_heuristic(ae.encode(np.asarray(data, dtype=np.float64)))


def reconstruction_error(ae, rows):
    """Sum over rows of the (unsquared) Euclidean reconstruction error."""
    code, _ = ae.encoder.forward(rows)
    recon, _ = ae.decoder.forward(code)
    return float(np.linalg.norm(rows - recon, axis=1).sum())


def kl_loss_and_grads(gen, ae, batch, noise, base_spec, variant=UNBIASED, relaxed=False):
    """Kernel-learning loss and the gradients of both players.

    loss = MMD^2 under k(enc(.), enc(.)) between the batch and its masked
    copy, minus the summed reconstruction error. ``gen_grads`` are the
    (straight-through) gradients of the MMD term for descent; ``ae_grads``
    are the gradients of the full loss, which the autoencoder ascends.
    ``relaxed`` has the same meaning as in ``vgan_loss_and_grad``.
    """
    batch, noise = _check_batch(batch, noise, gen)
    if batch.shape[1] != ae.dim:
        raise InputError("batch width does not match the autoencoder")
    offdiag = _offdiag_flag(variant, batch.shape[0], batch.shape[0])
    mask, probs, gcache = generator_forward(gen, noise)
    masked = (probs if relaxed else mask) * batch

    code_x, cache_x = ae.encoder.forward(batch)
    code_y, cache_y = ae.encoder.forward(masked)
    mmd, g_code_x, g_code_y = kernels.mmd2_grad(code_x, code_y, base_spec.bandwidth2, offdiag)

    recon, cache_dec = ae.decoder.forward(code_x)
    resid = batch - recon
    norms = np.linalg.norm(resid, axis=1)
    loss = mmd - norms.sum()
    if not np.isfinite(loss):
        raise TrainingError("non-finite kernel-learning loss")

    # d(-sum |x - r|)/dr = (x - r)/|x - r|, taken as 0 at a perfect reconstruction
    safe = np.where(norms > 0, norms, 1.0)
    g_recon = np.where(norms[:, None] > 0, resid / safe[:, None], 0.0)
    dec_grads, g_code_from_dec = ae.decoder.backward(cache_dec, g_recon)
    enc_grads_x, _ = ae.encoder.backward(cache_x, g_code_x + g_code_from_dec)
    enc_grads_y, g_masked = ae.encoder.backward(cache_y, g_code_y)
    ae_grads = [gx + gy for gx, gy in zip(enc_grads_x, enc_grads_y)] + dec_grads

    gen_grads = generator_backward(gen, gcache, g_masked * batch)
    return float(loss), gen_grads, ae_grads
