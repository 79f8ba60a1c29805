from setuptools import setup, find_packages

# Read README.md
with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="dqlib",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "examples", "examples.*"]),
    package_data={
        "dq": ["suites/*.json"],
    },
    include_package_data=True,
    install_requires=[
        "numpy>=1.26.0",
        "mmh3>=4.0.1",
        "python-dotenv>=1.0.0",
        "pandas>=2.2.3"
    ],
    extras_require={
        "test": ["pytest>=8.0.0", "hypothesis>=6.100.0"],
    },
    entry_points={
        "console_scripts": ["dq=dq.cli:main"],
    },
    python_requires=">=3.9",
    description="Dataset quality assessment for tabular classification (q_a metric)",
    long_description=long_description,
    long_description_content_type="text/markdown",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12"
    ],
)
