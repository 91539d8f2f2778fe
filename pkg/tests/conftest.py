import numpy as np
import pytest

from myosub import _backend

BACKENDS = [pytest.param(_backend.pykernels, id="numpy")]
if _backend.ckernels is not None:
    BACKENDS.append(pytest.param(_backend.ckernels, id="cython"))


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def use_backend(monkeypatch, backend):
    """Route every module that holds a kernel reference to ``backend``."""
    import myosub.generator
    import myosub.kernel_learning
    import myosub.kernel_mmd
    import myosub.od_ensemble

    for mod in (myosub.generator, myosub.kernel_learning, myosub.kernel_mmd, myosub.od_ensemble):
        if hasattr(mod, "kernels"):
            monkeypatch.setattr(mod, "kernels", backend)
    return backend


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def report(request):
    """Print one PASS/FAIL line to the terminal, bypassing output capture."""
    terminal = request.config.pluginmanager.get_plugin("terminalreporter")

    def emit(label, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} {label}: {detail}"
        if terminal is not None:
            terminal.write_line("")
            terminal.write_line(line)
        else:
            print(line)
        return ok

    return emit
