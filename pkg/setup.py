from setuptools import setup
import os

# name: this is the name of the distribution.
# Packages using the same name here cannot be installed together

version_path = os.path.join(
    os.path.abspath(os.path.dirname(__file__)), "ellipsoid_spectrum", "version.py"
)
with open(version_path) as fp:
    exec(fp.read())

setup(
    name="ellipsoid-spectrum",
    version=str(__version__),
    packages=["ellipsoid_spectrum"],
    description="Laplace–Beltrami eigenvalues of near-spherical ellipsoids, installable with pip",
    python_requires=">=3.7",
    install_requires=["numpy", "scipy"],
    extras_require={"test": ["pytest"]},
    entry_points={"console_scripts": ["ellipsoid-spectrum = ellipsoid_spectrum.cli:main"]},
    include_package_data=True,
)
