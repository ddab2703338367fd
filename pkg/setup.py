import os

from setuptools import setup

ext_modules = []
if os.environ.get("CFWB_NO_EXT", "") in ("", "0"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "cfwb._kernels",
                    ["src/cfwb/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    # no -ffast-math: floors must see IEEE-754 results
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
