"""Setup script for stashkit."""
from setuptools import setup, find_packages

setup(
    name="stashkit",
    version="1.0.0",
    packages=find_packages(include=["stashkit*"]),
    python_requires=">=3.10",
    entry_points={"console_scripts": ["stashkit=stashkit.cli.main:main"]},
)
