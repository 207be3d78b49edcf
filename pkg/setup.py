import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    # The compiled kernels are an accelerator, not a requirement.  If the
    # toolchain is missing the install falls back to the pure-Python kernels.
    def run(self):
        try:
            super().run()
        except Exception as exc:
            print(f"warning: compiled kernels skipped ({exc}); using pure-Python fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: building {ext.name} failed ({exc}); using pure-Python fallback")


extensions = []
if not os.environ.get("MINIONLAB_PURE"):
    try:
        from Cython.Build import cythonize

        extensions = cythonize(
            [
                Extension(
                    "minionlab._kernels_c",
                    ["src/minionlab/_kernels_c.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        extensions = []

setup(ext_modules=extensions, cmdclass={"build_ext": optional_build_ext})
