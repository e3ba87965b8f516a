"""Optional compiled extension; the package works without it."""

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/capwiener/_speedups.pyx",
        compiler_directives={"language_level": "3"},
        quiet=True,
    )
    for ext in ext_modules:
        ext.include_dirs.append(np.get_include())
        ext.optional = True
except ImportError:
    pass

setup(ext_modules=ext_modules)
