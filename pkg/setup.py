from setuptools import find_packages, setup


project = "polarkern"
version = "0.1.0"  # DO NOT EDIT THIS LINE MANUALLY. LET bump2version UTILITY DO IT

with open("README.md") as readme_file:
    readme = readme_file.read()

setup(
    name="polarkern",
    version=version,
    description="Search for low-complexity polarization kernels with RMLD decoding and tree-search self-play",
    long_description=readme,
    long_description_content_type="text/markdown",
    keywords=["polar codes", "polarization kernels", "python", "reinforcement learning"],
    packages=find_packages(),
    include_package_data=True,
    license="MIT",
    install_requires=[
        "numpy",
        "pandas",
        "torch",
        "tqdm",
    ],
    extras_require={
        "lint": [
            "flake8-isort>=3.0.1",
            "flake8-print>=3.1.0",
            "flake8-logging-format",
            "globality-black",
        ],
        "test": [
            "pytest",
            "pytest-cov",
            "PyHamcrest",
        ],
        "typehinting": [
            "mypy",
            "types-setuptools",
        ],
    },
    tests_require=[],
    entry_points={
        "console_scripts": [
            "polarkern = polarkern.cli:main",
        ],
    },
)
