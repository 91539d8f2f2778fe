"""Minibatch training of the generator, optionally with kernel learning."""

import logging

import numpy as np

from .errors import InputError, TrainingError
from .generator import GeneratorNet, vgan_loss_and_grad
from .kernel_learning import (
    AutoencoderNet,
    kl_loss_and_grads,
    median_heuristic_in_encoder_space,
)
from .kernel_mmd import UNBIASED, KernelSpec
from .optim import adadelta_step

log = logging.getLogger(__name__)


def iter_batches(n, batch_size, rng):
    """Shuffled index batches; a trailing batch under two rows is dropped."""
    perm = rng.permutation(n)
    size = min(batch_size, n)
    for start in range(0, n, size):
        idx = perm[start:start + size]
        if idx.shape[0] >= 2:
            yield idx


class Alternation:
    """Encoder/generator update schedule with persistent counters.

    Each cycle runs ``encoder_iters`` encoder ascents, then
    ``generator_iters`` generator descents, then resets both counters.
    """

    def __init__(self, encoder_iters, generator_iters):
        if encoder_iters < 1 or generator_iters < 1:
            raise InputError("alternation needs at least one update of each kind")
        self.encoder_iters = encoder_iters
        self.generator_iters = generator_iters
        self.trained_encoder = 0
        self.trained_generator = 0

    def next(self):
        """Return "encoder" or "generator" for the next batch update."""
        if self.trained_encoder < self.encoder_iters:
            self.trained_encoder += 1
            return "encoder"
        self.trained_generator += 1
        if self.trained_generator >= self.generator_iters:
            self.trained_encoder = 0
            self.trained_generator = 0
        return "generator"


class TrainResult:
    """Trained generator, optional autoencoder and per-epoch mean losses."""

    def __init__(self, net, loss_history, autoencoder=None, kernel=None):
        self.net = net
        self.loss_history = loss_history
        self.autoencoder = autoencoder
        self.kernel = kernel

    def __iter__(self):
        # unpacks as (net, loss_history)
        return iter((self.net, self.loss_history))


def train_vgan(data, config, spec, variant=UNBIASED, on_epoch=None):
    """Train a generator so that masked data matches the data in MMD.

    ``spec`` is the plain Gaussian kernel; with ``config.kernel_learning``
    it becomes the base kernel under a learned encoder whose bandwidth is
    re-derived by the median heuristic after every encoder update.
    ``on_epoch(epoch, mean_loss)`` is called after each epoch.

    Returns a ``TrainResult`` that unpacks as ``(net, loss_history)``.
    """
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] < 2:
        raise InputError("training data needs at least two rows")
    n, d = data.shape
    if d < 2:
        raise InputError("training data needs at least two columns")
    net = GeneratorNet.initialize(d, config.seed)
    ae = None
    kernel = spec
    if config.kernel_learning:
        if config.encoder_period < 2:
            raise InputError("kernel learning needs encoder_period >= 2")
        ae = AutoencoderNet.initialize(d, config.seed)
        kernel = None
        schedule = Alternation(1, config.encoder_period - 1)
    rng = np.random.default_rng([config.seed, 2])
    history = []
    for epoch in range(config.epochs):
        losses = []
        for idx in iter_batches(n, config.batch_size, rng):
            batch = data[idx]
            noise = rng.random((idx.shape[0], net.latent_dim))
            if ae is None:
                loss, grads = vgan_loss_and_grad(net, batch, noise, kernel, variant)
                if not np.isfinite(loss):
                    raise TrainingError("non-finite loss", epoch)
                adadelta_step(net.params(), grads, net.optimizer, config, epoch)
            else:
                if kernel is None:
                    kernel = KernelSpec(median_heuristic_in_encoder_space(ae, batch))
                try:
                    loss, gen_grads, ae_grads = kl_loss_and_grads(
                        net, ae, batch, noise, kernel, variant
                    )
                except TrainingError as exc:
                    raise TrainingError(str(exc), epoch) from exc
                if schedule.next() == "encoder":
                    ascent = [-g for g in ae_grads]
                    adadelta_step(ae.params(), ascent, ae.optimizer, config, epoch)
                    kernel = KernelSpec(median_heuristic_in_encoder_space(ae, batch))
                else:
                    adadelta_step(net.params(), gen_grads, net.optimizer, config, epoch)
            losses.append(loss)
        mean_loss = float(np.mean(losses)) if losses else float("nan")
        history.append(mean_loss)
        if on_epoch is not None:
            on_epoch(epoch, mean_loss)
        if epoch % 100 == 0:
            log.debug("epoch %d mean loss %.6g", epoch, mean_loss)
    if ae is not None and kernel is not None:
        kernel = KernelSpec(kernel.bandwidth2, encoder=ae)
    return TrainResult(net, history, ae, kernel)
