import os

import numpy as np
from setuptools import Extension, setup

# -fno-trapping-math lets gcc vectorise the branch-free exp in _vexp.h.
compile_args = ["-O3", "-fno-trapping-math"]
if not os.environ.get("MYOSUB_PORTABLE_BUILD"):
    compile_args.append("-march=native")

try:
    from Cython.Build import cythonize
except ImportError:  # build without the compiled core; numpy fallback is used
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "myosub._ckernels",
                ["src/myosub/_ckernels.pyx"],
                include_dirs=[np.get_include(), "src/myosub"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=compile_args,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
