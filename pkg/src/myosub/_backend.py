"""Select the compiled kernels when available, numpy otherwise.

Set ``MYOSUB_PURE_PYTHON=1`` to force the numpy fallback.
"""

import os

from . import _pykernels

pykernels = _pykernels

if os.environ.get("MYOSUB_PURE_PYTHON", "") not in ("", "0"):
    ckernels = None
else:
    try:
        from . import _ckernels as ckernels
    except ImportError:  # extension not built
        ckernels = None

kernels = ckernels if ckernels is not None else _pykernels
NAME = "cython" if ckernels is not None else "numpy"
