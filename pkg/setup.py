from setuptools import Extension, setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "pathlap._walk_kernel",
                ["src/pathlap/_walk_kernel.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level="3",
    )
except ImportError:
    # No Cython at build time: install the pure-Python package; the walk
    # module falls back to the numpy kernel at import.
    ext_modules = []

setup(ext_modules=ext_modules)
