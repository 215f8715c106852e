from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

ext = Pybind11Extension(
    "pfckit._pfckit",
    sources=[
        "bindings/module.cpp",
        "src/design.cpp",
        "src/sim.cpp",
        "src/analysis.cpp",
        "src/smallsignal.cpp",
        "src/json_io.cpp",
    ],
    include_dirs=["include", "vendor"],
    cxx_std=20,
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
