from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# The compiled kernel is optional: stresslab.kernels falls back to the pure
# NumPy implementation when the extension is missing.
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "stresslab.kernels._ckern",
                sources=["src/stresslab/kernels/_ckern.pyx"],
                optional=True,
            )
        ],
        language_level="3",
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules)
