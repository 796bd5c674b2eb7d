# coding: utf8
"""Laplace–Beltrami spectra of near-sphere ellipsoids.

First-order perturbation theory (closed forms and tridiagonal blocks), direct
discretizations (finite differences for spheroids, a spherical-harmonic
Galerkin method for triaxial ellipsoids) and nodal domain counting.
"""
from ellipsoid_spectrum.version import __version__
