"""Build hook: compile the SAT solver with Cython when possible.

``exactmine/sat.py`` is plain Python; ``sat.pxd`` adds static types for the
compiled build. Without Cython or a C compiler the package installs as pure
Python and behaves identically, only slower.
"""

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # no compiler, missing headers, ...
            print(f"warning: skipping compiled solver ({exc})")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: skipping compiled solver ({exc})")


try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        ["src/exactmine/sat.py"],
        compiler_directives={"language_level": 3, "annotation_typing": False},
        quiet=True,
    )

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
