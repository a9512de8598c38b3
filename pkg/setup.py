import os

from setuptools import Extension, setup

ext_modules = []
compile_args = ["-O3", "-ffast-math"]
if not os.environ.get("REUPLOAD_PORTABLE"):
    compile_args.append("-march=native")
if not os.environ.get("REUPLOAD_NO_EXTENSION"):
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "reupload._ckernels",
                    ["src/reupload/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=compile_args,
                    libraries=["m"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
