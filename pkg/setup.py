from setuptools import setup, find_packages

setup(
    name="hardedge",
    version="1.0.0",
    description="Hardedge - inverse spectral moments of the beta-Laguerre ensemble: exact formulas, hard-edge limits and Monte Carlo checks",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    author="Hardedge Maintainers",
    packages=find_packages(exclude=["scripts", "examples", "examples.*"]),
    include_package_data=True,
    package_data={"src": ["schemas/*.json"]},
    install_requires=[
        line.strip() 
        for line in open("requirements.txt").readlines() 
        if line.strip() and not line.startswith("#")
    ],
    entry_points={
        "console_scripts": [
            "hardedge=src.cli.main:cli",
        ],
    },
    python_requires=">=3.9",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
    ],
)
