"""Builds the _core extension by driving the repository's CMake project."""

import os
import shutil
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name: str, sourcedir: str = "") -> None:
        super().__init__(name, sources=[])
        self.sourcedir = os.fspath(Path(sourcedir).resolve())


class CMakeBuild(build_ext):
    def build_extension(self, ext: CMakeExtension) -> None:
        build_temp = Path(self.build_temp).resolve() / ext.name
        build_temp.mkdir(parents=True, exist_ok=True)

        cmake_args = [
            f"-DPython3_EXECUTABLE={sys.executable}",
            "-DCMAKE_BUILD_TYPE=RelWithDebInfo",
            "-DSENTGRID_BUILD_CLI=OFF",
            "-DSENTGRID_BUILD_TESTS=OFF",
        ]
        try:
            import pybind11

            cmake_args.append(f"-Dpybind11_DIR={pybind11.get_cmake_dir()}")
        except ImportError:
            pass  # fall back to a system-wide pybind11 config

        subprocess.run(["cmake", ext.sourcedir, *cmake_args], cwd=build_temp, check=True)
        subprocess.run(
            ["cmake", "--build", ".", "--target", "_core", "-j", str(os.cpu_count() or 2)],
            cwd=build_temp,
            check=True,
        )

        staged = sorted((build_temp / "python" / "sentgrid").glob("_core.*"))
        if not staged:
            raise RuntimeError("CMake did not stage the _core module")
        dest = Path(self.get_ext_fullpath(ext.name)).resolve()
        dest.parent.mkdir(parents=True, exist_ok=True)
        shutil.copy2(staged[0], dest)


setup(
    ext_modules=[CMakeExtension("sentgrid._core")],
    cmdclass={"build_ext": CMakeBuild},
)
