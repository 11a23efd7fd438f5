import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypdomain.domain import ClosedCurve, Component, separation_for, validate_domain, winding_signature
from hypdomain.exceptions import PrincipalMeridianAbsent
from hypdomain.geodesic import (
    MeridianFinder,
    find_meridian,
    pairwise_gaps,
    principal_system,
    shorten_in_class,
    system_metrics,
    uniform_deviation,
)
from hypdomain.hypmetric import annulus_equator_length, hyp_length, solve_density


def circle(c, r, n=256, phase=0.0):
    return ClosedCurve(c + r * np.exp(1j * (phase + 2 * np.pi * np.arange(n) / n)))


@pytest.fixture(scope="module")
def annulus_meridian(annulus, annulus_field):
    return find_meridian(annulus, annulus_field, separation_for(annulus, [0]))


@pytest.fixture(scope="module")
def three_system(three, three_field):
    return principal_system(three, three_field)


def test_annulus_meridian_is_core_circle(annulus_meridian):
    m = annulus_meridian
    assert m.length == pytest.approx(annulus_equator_length(0.25, 1.0), rel=5e-3)
    assert uniform_deviation(m.curve, circle(0, 0.5)) < 1e-2
    assert m.dist == pytest.approx(0.0, abs=2e-2)


def test_shortening_decreases_length(annulus_field):
    start = ClosedCurve(0.4 * np.exp(2j * np.pi * np.arange(120) / 120) + 0.1)
    out, info = shorten_in_class(annulus_field, start, return_info=True)
    assert info.final_length <= info.initial_length
    assert all(b <= a + 1e-12 for a, b in zip(info.history, info.history[1:]))
    assert hyp_length(annulus_field, out) == pytest.approx(annulus_equator_length(0.25, 1.0), rel=1e-2)
    np.testing.assert_array_equal(np.abs(winding_signature(out, annulus_field.domain)), [1])


def test_symmetric_lengths(three, three_system):
    assert len(three_system) == 3
    l1, l2, l3 = (m.length for m in three_system)
    assert l1 == pytest.approx(l2, rel=1e-2)
    assert l3 > 0
    for m in three_system:
        np.testing.assert_array_equal(np.abs(winding_signature(m.curve, three)),
                                      [int(j in m.separation.e_side) for j in range(2)])


def test_system_metrics_and_gaps(three, three_field, three_system):
    rows = system_metrics(three, three_field, three_system)
    assert [r[0] for r in rows] == [1, 2, 3]
    G = pairwise_gaps(three_system[:2])
    assert G[0, 1] > 0


def test_point_component_has_no_meridian():
    dom = validate_domain([Component.point(0.0), Component.disc(0.5, 0.1),
                           Component.outer_disc_complement(0, 1)], -0.5)
    f = solve_density(dom, 0.01)
    with pytest.raises(PrincipalMeridianAbsent):
        find_meridian(dom, f, separation_for(dom, [0]))
    system = principal_system(dom, f)
    assert system[0].absent and not system[1].absent


def test_seed_reproducible(annulus, annulus_field, annulus_meridian):
    again = find_meridian(annulus, annulus_field, separation_for(annulus, [0]), seed=0)
    np.testing.assert_array_equal(again.curve.points, annulus_meridian.curve.points)


@given(st.floats(0.1, 2.0), st.floats(0, 2 * math.pi))
def test_deviation_ignores_parametrisation(r, phase):
    assert uniform_deviation(circle(0, r), circle(0, r, 300, phase)) < 1e-3 * r


@given(st.floats(-0.05, 0.05), st.floats(-0.05, 0.05))
def test_deviation_of_translate(dx, dy):
    c = circle(0, 0.5)
    assert uniform_deviation(c, circle(dx + 1j * dy, 0.5)) == pytest.approx(math.hypot(dx, dy), abs=1e-4)


def test_deviation_symmetric_and_orientation_free():
    a, b = circle(0, 0.5), circle(0, 0.53)
    assert uniform_deviation(a, b) == pytest.approx(0.03, abs=1e-4)
    assert uniform_deviation(a, b) == pytest.approx(uniform_deviation(b, a), abs=1e-6)
    assert uniform_deviation(a, b.reversed()) == pytest.approx(0.03, abs=1e-4)


def test_finder_estimator(annulus):
    est = MeridianFinder(resolution=0.02).fit(annulus)
    assert est.lengths_[0] == pytest.approx(annulus_equator_length(0.25, 1.0), rel=1e-2)
    np.testing.assert_array_equal(np.abs(est.predict([0.0, 0.9j])), [[1, 0]])
    assert est.get_params()["seed"] == 0
