"""A small fully connected network with hand-written backpropagation."""

import numpy as np

from .errors import InputError

LEAKY_SLOPE = 0.01


def glorot_uniform(rng, fan_in, fan_out):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


class Mlp:
    """Linear layers with leaky ReLU between them and an identity output.

    ``weights[i]`` has shape (dims[i], dims[i + 1]); rows are samples.
    """

    def __init__(self, weights, biases):
        if len(weights) != len(biases) or not weights:
            raise InputError("need one bias per weight matrix")
        self.weights = [np.ascontiguousarray(w, dtype=np.float64) for w in weights]
        self.biases = [np.ascontiguousarray(b, dtype=np.float64) for b in biases]
        for w, b, w_next in zip(self.weights, self.biases, self.weights[1:] + [None]):
            if b.shape != (w.shape[1],):
                raise InputError("bias length does not match layer width")
            if w_next is not None and w_next.shape[0] != w.shape[1]:
                raise InputError("consecutive layer shapes do not chain")

    @classmethod
    def initialize(cls, dims, rng):
        weights = [glorot_uniform(rng, a, b) for a, b in zip(dims[:-1], dims[1:])]
        biases = [np.zeros(b) for b in dims[1:]]
        return cls(weights, biases)

    @property
    def dims(self):
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    def params(self):
        """Flat list [W0, b0, W1, b1, ...] of the live parameter arrays."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    def num_params(self):
        return sum(p.size for p in self.params())

    def copy(self):
        return Mlp([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def forward(self, x):
        """Return the output and the activations needed by ``backward``."""
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.dims[0]:
            raise InputError(f"expected input width {self.dims[0]}, got shape {x.shape}")
        inputs, pre = [], []
        h = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            inputs.append(h)
            a = h @ w + b
            if i < last:
                pre.append(a)
                h = np.where(a > 0, a, LEAKY_SLOPE * a)
            else:
                h = a
        return h, (inputs, pre)

    def backward(self, cache, grad_out):
        """Gradients of a scalar loss given d(loss)/d(output).

        Returns ``(param_grads, grad_input)`` with ``param_grads`` laid out
        like ``params()``.
        """
        inputs, pre = cache
        grads = [None] * (2 * len(self.weights))
        g = grad_out
        for i in range(len(self.weights) - 1, -1, -1):
            grads[2 * i] = inputs[i].T @ g
            grads[2 * i + 1] = g.sum(axis=0)
            g = g @ self.weights[i].T
            if i > 0:
                g = np.where(pre[i - 1] > 0, g, LEAKY_SLOPE * g)
        return grads, g
