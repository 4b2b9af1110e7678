import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("HTK_NO_EXTENSION", "") in ("", "0"):
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        # no build tooling: the pure-Python kernels are used at runtime
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "htk._kernels",
                    ["src/htk/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
