from setuptools import setup

# Get the long description by reading the README
try:
    readme_content = open("README.rst").read()
except Exception as e:
    readme_content = ""

# Create the actual setup method
setup(
    name="pyincrements",
    version="1.0.0",
    description="Increment-based volatility diagnostics for return series.",
    long_description=readme_content,
    license="MIT License",
    keywords=["volatility", "arch", "garch", "increments", "ensemble", "falsification"],
    packages=["pyincrements"],
    python_requires=">=3.7",
    install_requires=[
        "numpy>=1.17",
        "scipy>=1.6",
        "six",
    ],
    entry_points={
        "console_scripts": ["pyincrements = pyincrements.cli:run"],
    },
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Mathematics"
    ]
)
