"""Adadelta with additive weight decay."""

import numpy as np

from .errors import InputError, TrainingError

EPS = 1e-6


class AdadeltaState:
    """Running averages of squared gradients and squared updates."""

    def __init__(self, params):
        self.square_avg = [np.zeros_like(p) for p in params]
        self.acc_delta = [np.zeros_like(p) for p in params]
        self.steps = 0

    def copy(self):
        new = AdadeltaState([])
        new.square_avg = [a.copy() for a in self.square_avg]
        new.acc_delta = [a.copy() for a in self.acc_delta]
        new.steps = self.steps
        return new


def adadelta_step(params, grads, state, config, epoch=None):
    """Apply one Adadelta update to ``params`` in place.

    The decay constant is ``config.decay_rho``; ``config.weight_decay * p``
    is added to each gradient first and the resulting update is scaled by
    ``config.learning_rate``. Returns ``(params, state)``.
    """
    if len(params) != len(grads) or len(params) != len(state.square_avg):
        raise InputError("params, grads and optimizer state differ in length")
    for g in grads:
        if not np.all(np.isfinite(g)):
            raise TrainingError("non-finite gradient", epoch)
    rho = config.decay_rho
    for p, g, sq, acc in zip(params, grads, state.square_avg, state.acc_delta):
        if p.shape != g.shape or p.shape != sq.shape:
            raise InputError("parameter and gradient shapes disagree")
        if config.weight_decay:
            g = g + config.weight_decay * p
        sq *= rho
        sq += (1.0 - rho) * g * g
        delta = np.sqrt(acc + EPS) / np.sqrt(sq + EPS) * g
        acc *= rho
        acc += (1.0 - rho) * delta * delta
        p -= config.learning_rate * delta
    state.steps += 1
    return params, state
