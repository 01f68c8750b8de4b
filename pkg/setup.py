import os

from setuptools import find_namespace_packages, setup

this_directory = os.path.abspath(os.path.dirname(__file__))
with open(os.path.join(this_directory, "README.md")) as f:
    long_description = f.read()

setup(
    name="fq-decomp",
    version="0.3.0",
    description="Low-energy decompositions of finite-field sets and triple character sums",
    long_description=long_description,
    long_description_content_type="text/markdown",
    author="fq-decomp developers",
    packages=find_namespace_packages(include=["fq", "fq.*"]),
    include_package_data=True,
    install_requires=[
        "agate>=1.7.0",
        "click>=8.0",
        "jsonschema>=4.0",
        "logbook>=1.5",
        "mashumaro>=3.8",
        "numpy>=1.21",
        "sympy>=1.10",
    ],
    entry_points={"console_scripts": ["fq-decomp = fq.decomp.cli:main"]},
    classifiers=[
        "Development Status :: 4 - Beta",
        "License :: OSI Approved :: Apache Software License",
        "Operating System :: Microsoft :: Windows",
        "Operating System :: MacOS :: MacOS X",
        "Operating System :: POSIX :: Linux",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.8",
)
