"""Slow, loop-based reference implementations used as test oracles."""

import math

import numpy as np


def kernel(x, y, h):
    s = 0.0
    for a, b in zip(x, y):
        s += (a - b) ** 2
    return math.exp(-s / (2.0 * h))


def mmd2_unbiased(a, b, h):
    n, m = len(a), len(b)
    saa = sum(kernel(a[i], a[j], h) for i in range(n) for j in range(n) if i != j)
    sbb = sum(kernel(b[i], b[j], h) for i in range(m) for j in range(m) if i != j)
    sab = sum(kernel(a[i], b[j], h) for i in range(n) for j in range(m))
    return saa / (n * (n - 1)) + sbb / (m * (m - 1)) - 2.0 * sab / (n * m)


def mmd2_eq6(a, b, h):
    n = len(a)
    saa = sum(kernel(a[i], a[j], h) for i in range(n) for j in range(n) if i != j)
    sbb = sum(kernel(b[i], b[j], h) for i in range(n) for j in range(n) if i != j)
    sab = sum(kernel(a[i], b[j], h) for i in range(n) for j in range(n) if i != j)
    return (saa + sbb) / (n * (n - 1)) - 2.0 * sab / (n * n)


def dist(x, y):
    return math.sqrt(sum((a - b) ** 2 for a, b in zip(x, y)))


def knn(train, test, k):
    return [sorted(dist(t, r) for r in train)[k - 1] for t in test]


def _neighbourhood(point, refs, k, skip=None):
    d = [(dist(point, r), j) for j, r in enumerate(refs) if j != skip]
    kd = sorted(x for x, _ in d)[k - 1]
    return kd, [j for x, j in d if x <= kd]


def lof(train, test, k, floor=1e-12):
    kdist = [_neighbourhood(r, train, k, skip=i)[0] for i, r in enumerate(train)]

    def lrd(point, skip=None):
        _, nb = _neighbourhood(point, train, k, skip)
        reach = [max(dist(point, train[j]), kdist[j]) for j in nb]
        return 1.0 / max(sum(reach) / len(reach), floor)

    train_lrd = [lrd(r, i) for i, r in enumerate(train)]
    out = []
    for t in test:
        _, nb = _neighbourhood(t, train, k)
        out.append(sum(train_lrd[j] for j in nb) / len(nb) / lrd(t))
    return out


def auc_pairs(scores, labels):
    pos = [s for s, l in zip(scores, labels) if l == 1]
    neg = [s for s, l in zip(scores, labels) if l == 0]
    hits = sum(1.0 if p > q else 0.5 if p == q else 0.0 for p in pos for q in neg)
    return hits / (len(pos) * len(neg))


def adadelta_scalar(w, steps, grad, lr=0.007, rho=0.99, wd=0.04, eps=1e-6):
    """Adadelta on one scalar, written out independently; returns the path."""
    sq = acc = 0.0
    path = [w]
    for _ in range(steps):
        g = grad(w) + wd * w
        sq = rho * sq + (1 - rho) * g * g
        step = math.sqrt(acc + eps) / math.sqrt(sq + eps) * g
        acc = rho * acc + (1 - rho) * step * step
        w -= lr * step
        path.append(w)
    return path


def central_diff(f, params, step=1e-5):
    """Central finite differences of scalar ``f()`` w.r.t. arrays in ``params``."""
    grads = []
    for p in params:
        g = np.zeros_like(p)
        it = np.nditer(p, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            old = p[idx]
            p[idx] = old + step
            up = f()
            p[idx] = old - step
            down = f()
            p[idx] = old
            g[idx] = (up - down) / (2 * step)
        grads.append(g)
    return grads
