# setup.py

"""
Setup script for the pytdpt package.

Packages the propagators, the norm-order analysis, the closed-form oracles
and the bundled scenario configs, and installs the ``pytdpt`` command.
"""

import re
from setuptools import setup, find_packages

# --- Version Handling ---
# The version lives in __init__.py; read it without importing the package.
with open("pytdpt/__init__.py", "r") as f:
    version_file = f.read()

version_match = re.search(r"^__version__ = ['\"]([^'\"]*)['\"]", version_file, re.M)

if version_match:
    version = version_match.group(1)
else:
    raise RuntimeError("Unable to find version string.")


with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()


setup(
    name="pytdpt",
    version=version,

    description="Norm analysis of time-dependent perturbation theory for two-state wave-packet propagation.",
    long_description=long_description,
    long_description_content_type="text/markdown",

    license="MIT",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering :: Physics",
    ],

    # --- Package Finding and Data ---
    packages=find_packages(exclude=["tests", "tests.*", "docs", "docs.*"]),
    package_data={"pytdpt.configs": ["*.cfg"]},
    include_package_data=True,

    # --- Dependencies and Requirements ---
    python_requires=">=3.9",
    install_requires=[
        'numpy',
        'scipy',
        'pandas',
        'colorlog',
    ],
    extras_require={
        "docs": [
            "sphinx",
            "sphinx-rtd-theme",
        ],
        "tests": [
            "pytest",
        ],
    },
    entry_points={
        "console_scripts": [
            "pytdpt=pytdpt.cli:console_main",
        ],
    },
)
