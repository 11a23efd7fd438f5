import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from hypdomain.domain import ClosedCurve, Component, annulus_domain, disc_domain, validate_domain
from hypdomain.exceptions import CurveTooCloseToBoundary, GridTooCoarse, PointNotInDomain
from hypdomain.hypmetric import (
    HyperbolicDensity,
    boundary_sandwich,
    annulus_equator_length,
    closed_form_density,
    hyp_dist_point_to_set,
    hyp_length,
    solve_density,
)

# 2*pi/log(4): density of A(1/4, 1) on the circle |z| = 1/2
ANNULUS_CORE_DENSITY = 4.532360141827194


def circle(c, r, n=400):
    return ClosedCurve(c + r * np.exp(2j * np.pi * np.arange(n) / n))


def test_closed_forms():
    assert closed_form_density("disc", None, 0.0)[0] == 2.0
    assert closed_form_density("annulus", {"r": 0.25, "R": 1.0}, 0.5)[0] == pytest.approx(ANNULUS_CORE_DENSITY, rel=1e-14)
    assert annulus_equator_length(0.25, 1.0) == pytest.approx(2 * math.pi ** 2 / math.log(4), rel=1e-15)
    with pytest.raises(PointNotInDomain):
        closed_form_density("disc", None, 1.5)
    with pytest.raises(ValueError):
        closed_form_density("strip", None, 0.0)


@given(st.floats(0.0, 0.85), st.floats(0, 2 * math.pi))
def test_disc_density(disc_field, rho, theta):
    z = rho * np.exp(1j * theta)
    assert disc_field.density(z)[0] == pytest.approx(2 / (1 - rho ** 2), rel=5e-3)


@given(st.floats(0.3, 0.9), st.floats(0, 2 * math.pi))
def test_annulus_density(annulus_field, rho, theta):
    z = rho * np.exp(1j * theta)
    exact = closed_form_density("annulus", {"r": 0.25, "R": 1.0}, z)[0]
    assert annulus_field.density(z)[0] == pytest.approx(exact, rel=1e-2)


def test_annulus_core_value(annulus_field):
    assert annulus_field.density(0.5j)[0] == pytest.approx(ANNULUS_CORE_DENSITY, rel=5e-3)


@given(st.floats(0.3, 0.9), st.floats(0, 2 * math.pi))
def test_monotone_under_inclusion(disc_field, annulus_field, rho, theta):
    z = rho * np.exp(1j * theta)
    assert annulus_field.density(z)[0] > disc_field.density(z)[0]


def test_scaling(disc_field):
    big = solve_density(disc_domain(2.0, 0.0), 0.02)
    z = np.array([0.0, 0.3, 0.5j, -0.6 + 0.2j])
    np.testing.assert_allclose(2 * big.density(2 * z), disc_field.density(z), rtol=5e-3)


def test_translation(disc_field):
    moved = solve_density(disc_domain(1.0, 0.0, center=0.3 - 0.2j), 0.01)
    z = np.array([0.0, 0.4, -0.5j])
    np.testing.assert_allclose(moved.density(z + 0.3 - 0.2j), disc_field.density(z), rtol=5e-3)


def test_curvature_minus_one(annulus_field):
    # log-density satisfies Laplacian(u) = exp(2u)
    s = 0.02
    z = np.array([0.5, 0.55j, -0.6 + 0.1j, 0.45 - 0.3j])
    u = lambda w: annulus_field.log_density(w)
    lap = (u(z + s) + u(z - s) + u(z + 1j * s) + u(z - 1j * s) - 4 * u(z)) / s ** 2
    np.testing.assert_allclose(lap, np.exp(2 * u(z)), rtol=2e-2)


def test_outside_is_nan(annulus_field):
    assert np.isnan(annulus_field.density(0.1)[0])
    assert np.isnan(annulus_field.log_density(1.2)[0])


def test_grid_too_coarse():
    dom = validate_domain([Component.disc(-0.2, 0.15), Component.disc(0.2, 0.15),
                           Component.outer_disc_complement(0, 1)], 0.6j)
    with pytest.raises(GridTooCoarse):
        solve_density(dom, 0.02)
    with pytest.raises(ValueError):
        solve_density(dom, -1.0)


def test_lengths(disc_field, annulus_field):
    for r in (0.2, 0.5, 0.7):
        assert hyp_length(disc_field, circle(0, r)) == pytest.approx(4 * math.pi * r / (1 - r ** 2), rel=5e-3)
    assert hyp_length(annulus_field, circle(0, 0.5)) == pytest.approx(annulus_equator_length(0.25, 1.0), rel=5e-3)
    seg = np.array([0.0, 0.5])
    assert hyp_length(disc_field, seg) == pytest.approx(math.log(3), rel=5e-3)
    with pytest.raises(CurveTooCloseToBoundary):
        hyp_length(disc_field, circle(0, 0.995))


@pytest.mark.parametrize("r", [0.3, 0.6])
def test_distance_to_point(disc_field, r):
    assert hyp_dist_point_to_set(disc_field, 0.0, r) == pytest.approx(math.log((1 + r) / (1 - r)), rel=1e-2)


def test_distance_to_circle(disc_field):
    # distance from 0 to the circle |z| = 0.5 equals the radial distance
    d = hyp_dist_point_to_set(disc_field, 0.0, circle(0, 0.5, 200))
    assert d == pytest.approx(math.log(3), rel=1e-2)
    assert hyp_dist_point_to_set(disc_field, 0.5, circle(0, 0.5, 200)) == pytest.approx(0.0, abs=1e-3)
    with pytest.raises(PointNotInDomain):
        hyp_dist_point_to_set(disc_field, 1.5, 0.0)


def test_annulus_distance_to_equator(annulus_field):
    from scipy.integrate import quad

    oracle, _ = quad(lambda r: closed_form_density("annulus", {"r": 0.25, "R": 1.0}, r)[0], 0.4, 0.5)
    d = hyp_dist_point_to_set(annulus_field, 0.4, circle(0, 0.5, 200))
    assert d == pytest.approx(oracle, rel=2e-2)


def test_estimator():
    est = HyperbolicDensity(resolution=0.02)
    assert est.get_params()["resolution"] == 0.02
    assert clone(est).set_params(resolution=0.05).resolution == 0.05
    with pytest.raises(NotFittedError):
        est.predict([0.0])
    est.fit(annulus_domain(0.25, 1.0, basepoint=0.5))
    assert est.predict([0.5])[0] == pytest.approx(ANNULUS_CORE_DENSITY, rel=1e-2)
    assert est.transform([0.5])[0] == pytest.approx(math.log(ANNULUS_CORE_DENSITY), abs=1e-2)


def test_boundary_sandwich(disc_field, annulus_field, three_field):
    _, lower_ref, _ = boundary_sandwich(three_field)
    C = float(lower_ref.min())
    assert C > 0
    for f in (disc_field, annulus_field, three_field):
        d, lower, upper = boundary_sandwich(f)
        assert d.size > 1000 and d.max() < 0.05
        assert upper.max() <= 1.0
        assert lower.min() >= 0.5 * C
        assert lower[d < 0.01].mean() > lower[d > 0.04].mean()


def test_rotation_invariance(three, three_field):
    rot = np.exp(0.3j)
    comps = [Component.disc(c.params["center"] * rot, c.params["radius"]) for c in three.components[:-1]]
    turned = validate_domain(comps + [Component.outer_disc_complement(0, 1)], three.basepoint * rot)
    f = solve_density(turned, 0.01)
    z = np.array([0.5j, 0.1 + 0.2j, -0.7, 0.3 - 0.6j])
    np.testing.assert_allclose(f.density(z * rot), three_field.density(z), rtol=2e-2)


def test_refinement_bound(annulus):
    fine = solve_density(annulus, 0.01, estimate_error=True)
    coarse = solve_density(annulus, 0.02, estimate_error=True)
    assert 0 < fine.discretization_bound < coarse.discretization_bound
    for f in (fine, coarse):
        z = f.nodes()[f.interior]
        exact = closed_form_density("annulus", {"r": 0.25, "R": 1.0}, z)
        assert np.max(np.abs(f.density(z) / exact - 1)) <= f.discretization_bound
