import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from threadpoolctl import threadpool_limits

from myosub import _backend
from myosub.experiments import SyntheticSpec, gen_synthetic_population
from myosub.generator import TrainConfig
from myosub.kernel_mmd import KernelSpec, myopicity_test
from myosub.lens import LensDistribution
from myosub.training import train_vgan

needs_c = pytest.mark.skipif(_backend.ckernels is None, reason="compiled backend not built")


@needs_c
class TestEquivalence:
    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 40), st.integers(2, 40), st.sampled_from([1, 2, 3, 7, 12, 13, 30, 60]),
           st.integers(0, 2**31), st.booleans())
    def test_mmd_value_and_gradients(self, n, m, p, seed, offdiag):
        if offdiag:
            m = n
        rng = np.random.default_rng(seed)
        a, b = rng.normal(size=(n, p)), rng.normal(size=(m, p)) * (rng.random((m, p)) < 0.6)
        h = float(rng.uniform(0.1, 5.0)) * p
        c = _backend.ckernels.mmd2_grad(a, b, h, offdiag)
        py = _backend.pykernels.mmd2_grad(a, b, h, offdiag)
        assert c[0] == pytest.approx(py[0], abs=1e-12)
        assert np.allclose(c[1], py[1], atol=1e-12) and np.allclose(c[2], py[2], atol=1e-12)
        assert _backend.ckernels.mmd2(a, b, h, offdiag) == pytest.approx(c[0], abs=1e-14)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 30), st.integers(1, 30), st.sampled_from([1, 3, 12, 13, 50]), st.integers(0, 2**31))
    def test_gram_and_sqdist(self, n, m, p, seed):
        rng = np.random.default_rng(seed)
        a, b = rng.normal(size=(n, p)), rng.normal(size=(m, p))
        assert np.allclose(_backend.ckernels.gaussian_gram(a, b, 1.7),
                           _backend.pykernels.gaussian_gram(a, b, 1.7), atol=1e-14, rtol=0)
        assert np.allclose(_backend.ckernels.sqdist(a, b), _backend.pykernels.sqdist(a, b), rtol=1e-14)

    def test_extreme_distances_underflow_to_zero(self):
        a, b = np.zeros((2, 1)), np.full((2, 1), 100.0)
        assert _backend.ckernels.gaussian_gram(a, b, 0.5).max() == 0.0


def test_pure_python_switch():
    code = "from myosub import _backend; print(_backend.NAME)"
    env = dict(os.environ, MYOSUB_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def test_thread_cap_does_not_change_results():
    data = gen_synthetic_population(SyntheticSpec(300, 0.5, 1))
    cfg = TrainConfig(epochs=3, batch_size=100, seed=2)
    lens = LensDistribution.from_dict({"110": 0.5, "001": 0.5})
    results = []
    for limit in (1, 4):
        with threadpool_limits(limits=limit):
            hist = train_vgan(data, cfg, KernelSpec(1.0)).loss_history
            test = myopicity_test(data, lens, KernelSpec(1.0), 0.1, 150, 3)
        results.append((hist, test))
    assert results[0] == results[1]
