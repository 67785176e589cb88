"""Build hook for the optional compiled kernels.

The extension is marked optional: without Cython or a C compiler the package
installs and runs on the numpy fallback.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("qcnoise._ckernels", ["src/qcnoise/_ckernels.pyx"],
                   extra_compile_args=["-O3"], optional=True)],
        language_level=3,
    )

setup(ext_modules=ext_modules)
