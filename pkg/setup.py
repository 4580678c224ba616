# Builds the optional compiled trial kernel; the package falls back to the
# pure-Python loop when the extension is missing.
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "docsat._ckernel",
                ["src/docsat/_ckernel.pyx"],
                # keep float scores bit-identical to the Python picker
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
