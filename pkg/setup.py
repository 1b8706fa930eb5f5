"""
edgepose: edge and corner detection in point clouds and 6D pose of cuboids
"""
from setuptools import setup, find_packages
from pathlib import Path

# Read the long description from README
this_directory = Path(__file__).parent
long_description = (this_directory / "README.md").read_text(encoding="utf-8")

setup(
    name="edgepose",
    version="0.1.0",
    description="Edge and corner detection in unorganized point clouds and 6D pose estimation of cuboids",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests*", "test_*", "examples*"]),
    include_package_data=True,
    package_data={
        'edgepose': ['config/*.yaml', 'config/objects/*.yaml', 'config/scenes/*.yaml'],
    },
    install_requires=[
        "numpy>=1.22.0",
        "PyYAML>=5.4.0",
        "scipy>=1.7.0",
        "numba>=0.56.0",
    ],
    python_requires=">=3.8",
    keywords=[
        'point-cloud', 'edge-detection', 'corner-detection', 'pose-estimation',
        'ransac', 'robotics', 'bin-picking', 'cuboid', 'kd-tree',
    ],
    entry_points={
        'console_scripts': [
            'edgepose=edgepose.cli.cli:main',
        ],
    },
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Operating System :: OS Independent",
    ],
)
