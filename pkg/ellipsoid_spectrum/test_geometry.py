# coding: utf8
"""This module tests metrics, Laplace–Beltrami coefficients and the first-order operator"""
import math

import numpy as np
import pytest
from pytest import approx

from ellipsoid_spectrum import special_fn
from ellipsoid_spectrum.geometry import (
    EllipsoidSpec,
    Family,
    InvalidEllipsoidError,
    PoleMarginError,
    a1_apply,
    apply_operator,
    harmonic_grid,
    harmonic_jet,
    laplace_coeffs,
    metric_biaxial,
    metric_triaxial,
)

PHI, THETA = np.meshgrid(np.linspace(0.3, 2.8, 6), np.linspace(0.1, 6.0, 7), indexing="ij")
PARAMS = [(0.0, 1.0, -1.0), (1.0, -0.5, 0.25), (0.3, 0.3, -0.7), (1.0, 1.0, 1.0)]


def shifted(params, eps):
    return EllipsoidSpec.from_axes(*[1.0 + value * eps for value in params])


def test_spec_validation():
    with pytest.raises(InvalidEllipsoidError):
        EllipsoidSpec.from_axes(1.0, -1.0, 1.0)
    with pytest.raises(InvalidEllipsoidError):
        EllipsoidSpec.from_perturbation(0.0, 1.0, -1.0, 1.5)
    with pytest.raises(InvalidEllipsoidError):
        EllipsoidSpec.from_perturbation(0.0, 1.0, -1.0, -0.1)


def test_from_perturbation():
    spec = EllipsoidSpec.from_perturbation(0.0, 1.0, -1.0, 0.2)
    assert spec.axes == approx((1.0, 1.2, 0.8))
    assert spec.perturbation == (0.0, 1.0, -1.0, 0.2)


def test_permuted_carries_perturbation():
    spec = EllipsoidSpec.from_perturbation(0.0, 1.0, -1.0, 0.2).permuted((2, 0, 1))
    assert spec.axes == approx((0.8, 1.0, 1.2))
    assert spec.perturbation == (-1.0, 0.0, 1.0, 0.2)
    assert spec.permutation == (2, 0, 1)


@pytest.mark.parametrize(
    ("axes", "expected"),
    [((1.0, 1.0, 2.0), (1.0, 1.0, 2.0)), ((2.0, 1.0, 2.0), (2.0, 2.0, 1.0)), ((3.0, 1.0, 1.0), (1.0, 1.0, 3.0))],
)
def test_as_spheroid(axes, expected):
    spheroid = EllipsoidSpec.from_axes(*axes).as_spheroid()
    assert spheroid.axes == expected
    assert spheroid.is_biaxial


def test_as_spheroid_needs_equal_pair():
    with pytest.raises(InvalidEllipsoidError):
        EllipsoidSpec.from_axes(1.0, 2.0, 3.0).as_spheroid()


def test_metric_on_sphere():
    metric = metric_triaxial(EllipsoidSpec.from_axes(1.0, 1.0, 1.0), PHI, THETA)
    assert metric.g11 == approx(np.ones_like(PHI))
    assert metric.g12 == approx(np.zeros_like(PHI), abs=1e-15)
    assert metric.g22 == approx(np.sin(PHI) ** 2)
    assert metric.D == approx(np.sin(PHI) ** 2)


def test_metric_flags_poles():
    metric = metric_triaxial(EllipsoidSpec.from_axes(1.0, 1.2, 0.8), np.array([0.0, 1.0, math.pi]), 0.4)
    assert list(metric.at_pole) == [True, False, True]


def test_metric_matches_embedding():
    spec = EllipsoidSpec.from_axes(1.3, 0.7, 1.1)
    phi, theta = 0.9, 2.2
    x_phi = np.array([spec.a * math.cos(phi) * math.cos(theta), spec.b * math.cos(phi) * math.sin(theta), -spec.c * math.sin(phi)])
    x_theta = np.array([-spec.a * math.sin(phi) * math.sin(theta), spec.b * math.sin(phi) * math.cos(theta), 0.0])
    metric = metric_triaxial(spec, phi, theta)
    assert metric.g11 == approx(x_phi @ x_phi)
    assert metric.g12 == approx(x_phi @ x_theta)
    assert metric.g22 == approx(x_theta @ x_theta)


def test_metric_biaxial():
    spec = EllipsoidSpec.spheroid(1.0, 2.0)
    metric = metric_biaxial(spec, np.array([0.5, 1.5]))
    assert metric.g11 == approx(np.cos([0.5, 1.5]) ** 2 + 4 * np.sin([0.5, 1.5]) ** 2)
    assert metric.g22 == approx(np.sin([0.5, 1.5]) ** 2)
    with pytest.raises(InvalidEllipsoidError):
        metric_biaxial(EllipsoidSpec.from_axes(1.0, 2.0, 1.0), 0.5)


def test_sphere_coefficients():
    coeffs = laplace_coeffs(EllipsoidSpec.from_axes(1.0, 1.0, 1.0), PHI, THETA)
    assert coeffs.A == approx(np.ones_like(PHI))
    assert coeffs.B == approx(np.zeros_like(PHI), abs=1e-15)
    assert coeffs.C == approx(1.0 / np.sin(PHI) ** 2)
    assert coeffs.E == approx(np.cos(PHI) / np.sin(PHI))
    assert coeffs.F == approx(np.zeros_like(PHI), abs=1e-15)


def test_pole_margin():
    with pytest.raises(PoleMarginError):
        laplace_coeffs(EllipsoidSpec.from_axes(1.0, 1.2, 0.8), 0.0, 0.0)


@pytest.mark.parametrize(("l", "m", "family"), [(0, 0, Family.COS), (2, 1, Family.SIN), (3, 3, Family.COS), (5, 2, Family.SIN)])
def test_harmonics_are_sphere_eigenfunctions(l, m, family):
    jet = harmonic_jet(l, m, family)(PHI, THETA)
    coeffs = laplace_coeffs(EllipsoidSpec.from_axes(1.0, 1.0, 1.0), PHI, THETA)
    assert apply_operator(coeffs, jet) == approx(-l * (l + 1) * jet.value, abs=1e-11)


def test_harmonic_jet_derivatives():
    jet = harmonic_jet(4, 2, Family.COS)
    step = 1e-5
    base = jet(PHI, THETA)
    d_phi = (jet(PHI + step, THETA).value - jet(PHI - step, THETA).value) / (2 * step)
    d_theta = (jet(PHI, THETA + step).value - jet(PHI, THETA - step).value) / (2 * step)
    d_phiphi = (jet(PHI + step, THETA).d_phi - jet(PHI - step, THETA).d_phi) / (2 * step)
    assert base.d_phi == approx(d_phi, abs=1e-8)
    assert base.d_theta == approx(d_theta, abs=1e-8)
    assert base.d_phiphi == approx(d_phiphi, abs=1e-7)


def test_harmonic_grid_matches_jet():
    t = np.array([-0.6, 0.1, 0.8])
    theta = np.array([0.3, 1.9])
    labels = [(2, 0, Family.COS), (3, 2, Family.SIN)]
    values, d_phi, d_theta = harmonic_grid(labels, t, theta, derivatives=True)
    phi = np.arccos(t)[:, None]
    jet = harmonic_jet(3, 2, Family.SIN)(phi, theta[None, :])
    assert values[1] == approx(jet.value)
    assert d_phi[1] == approx(jet.d_phi)
    assert d_theta[1] == approx(jet.d_theta)


def test_w0_rejected():
    with pytest.raises(ValueError):
        harmonic_jet(2, 0, Family.SIN)


@pytest.mark.parametrize("params", PARAMS)
@pytest.mark.parametrize(("l", "m", "family"), [(1, 1, Family.COS), (2, 0, Family.COS), (3, 2, Family.SIN)])
def test_a1_is_derivative_of_laplacian(params, l, m, family):
    jet = harmonic_jet(l, m, family)(PHI, THETA)

    def central(eps):
        plus = apply_operator(laplace_coeffs(shifted(params, eps), PHI, THETA), jet)
        minus = apply_operator(laplace_coeffs(shifted(params, -eps), PHI, THETA), jet)
        return (plus - minus) / (2 * eps)

    extrapolated = (4 * central(5e-3) - central(1e-2)) / 3
    exact = a1_apply(*params, harmonic_jet(l, m, family), PHI, THETA)
    assert exact == approx(extrapolated, abs=1e-6)


def test_a1_of_uniform_scaling():
    jet = harmonic_jet(3, 1, Family.COS)
    value = jet(PHI, THETA).value
    assert a1_apply(1.0, 1.0, 1.0, jet, PHI, THETA) == approx(2 * 12 * value, abs=1e-11)


def test_laplacian_is_symmetric():
    spec = EllipsoidSpec.from_axes(1.1, 0.85, 1.3)
    rule = special_fn.gauss_legendre(60)
    theta, theta_weights = special_fn.periodic_trapezoid(64)
    phi = np.arccos(rule.nodes)[:, None]
    theta = theta[None, :]
    first = harmonic_jet(2, 1, Family.COS)(phi, theta)
    second = harmonic_jet(3, 1, Family.COS)(phi, theta)
    coeffs = laplace_coeffs(spec, phi, theta)
    # √D dφ = √(D)/sinφ dt
    weight = np.sqrt(metric_triaxial(spec, phi, theta).D) / np.sin(phi)
    left = rule.weights @ (first.value * apply_operator(coeffs, second) * weight) @ theta_weights
    right = rule.weights @ (second.value * apply_operator(coeffs, first) * weight) @ theta_weights
    assert left == approx(right, abs=1e-7)


def test_shape_predicates_allow_rounding():
    assert EllipsoidSpec.from_axes(1.0, 1.0, 1.0 + 1e-14).is_sphere
    assert EllipsoidSpec.from_axes(1.0 + 1e-14, 1.0, 1.1).is_biaxial
    assert not EllipsoidSpec.from_axes(1.0, 1.0, 1.1).is_sphere
    assert not EllipsoidSpec.from_axes(1.0, 1.0 + 1e-9, 1.1).is_biaxial
