import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypdomain.domain import (
    ClosedCurve,
    Component,
    annulus_domain,
    boundary_distance,
    disc_domain,
    domain_from_dict,
    enumerate_separations,
    expected_signature,
    load_domain,
    principal_count,
    save_domain,
    separation_count,
    separation_for,
    signature_separation,
    validate_domain,
    winding_numbers,
    winding_signature,
)
from hypdomain.exceptions import (
    BasepointInComplement,
    CurveTouchesComplement,
    EmptyComponent,
    NotMultiplyConnected,
    OverlappingComponents,
    PointNotInDomain,
)
from hypdomain.sphere import INF, is_inf


def n_connected(n):
    """Unit disc minus ``n - 1`` small discs on a circle of radius 1/2."""
    comps = [Component.disc(0.5 * np.exp(2j * np.pi * k / (n - 1)), 0.08) for k in range(n - 1)]
    return validate_domain(comps + [Component.outer_disc_complement(0, 1)], 0.0)


@pytest.mark.parametrize("n,count", [(2, 1), (3, 3), (4, 7), (5, 15)])
def test_separation_counts(n, count):
    dom = n_connected(n)
    seps = enumerate_separations(dom)
    assert len(seps) == count == separation_count(n)
    assert len({s.e_side for s in seps}) == count
    assert sum(s.principal for s in seps) == principal_count(n) == min(n, count)


@given(st.integers(2, 9))
def test_separation_count_formula(n):
    assert separation_count(n) == 2 ** (n - 1) - 1
    assert principal_count(n) == (1 if n == 2 else n)


def test_separations_need_multiple_connectivity():
    with pytest.raises(NotMultiplyConnected):
        enumerate_separations(disc_domain())


def test_principal_separations_come_first():
    seps = enumerate_separations(n_connected(4))
    assert [sorted(s.e_side) for s in seps[:4]] == [[0], [1], [2], [0, 1, 2]]
    assert str(seps[0]) == "E={1}"


def test_point_separation_is_trivial():
    dom = validate_domain([Component.point(0.3), Component.disc(-0.4, 0.1),
                           Component.outer_disc_complement(0, 1)], 0.0)
    sep = separation_for(dom, [0])
    assert not sep.nontrivial
    assert separation_for(dom, [1]).nontrivial


def test_validation_errors():
    with pytest.raises(BasepointInComplement):
        annulus_domain(0.25, 1.0, basepoint=0.1)
    with pytest.raises(BasepointInComplement):
        disc_domain(1.0, basepoint=2.0)
    with pytest.raises(OverlappingComponents):
        validate_domain([Component.disc(0, 0.3), Component.disc(0.2, 0.3), Component.outer_disc_complement(0, 1)], 0.7)
    with pytest.raises(EmptyComponent):
        Component.disc(0, 0.0)
    with pytest.raises(OverlappingComponents):
        validate_domain([Component.outer_disc_complement(0, 1), Component.outer_disc_complement(0, 2)], 0.0)


def test_infinity_in_domain_is_normalised():
    dom = validate_domain([Component.disc(0, 0.5), Component.disc(3, 0.5)], 1.5)
    assert dom.normalization is not None
    assert dom.outer.unbounded
    assert abs(dom.basepoint - 1.0) < 1e-12
    assert abs(dom.normalization(0.0)) < 1e-12
    assert dom.components[0].distance(np.array([0.0]))[0] == 0.0


def test_distances_and_containment(annulus):
    z = np.array([0.5, 0.1, 0.9j, 2.0])
    np.testing.assert_allclose(annulus.distance(z), [0.25, 0.0, 0.1, 0.0], atol=1e-12)
    np.testing.assert_array_equal(annulus.contains(z), [True, False, True, False])
    # spherical distance from 0.5 to the circle |z| = 0.25
    assert boundary_distance(annulus, 0.5) == pytest.approx(math.atan(0.5) - math.atan(0.25), abs=2e-4)
    with pytest.raises(PointNotInDomain):
        boundary_distance(annulus, 0.0)


def test_arc_distance():
    arc = Component.arc(0, 1.0, 0.0, math.pi)
    z = np.array([2j, -2j, 1.5, 0.0])
    np.testing.assert_allclose(arc.distance(z), [1.0, math.sqrt(5), 0.5, 1.0], atol=1e-12)


def test_polyline_polygon():
    sq = Component.polyline([0, 1, 1 + 1j, 1j, 0])
    assert sq.params["closed"]
    assert sq.distance(np.array([0.5 + 0.5j]))[0] == 0.0
    slit = Component.polyline([0, 1])
    assert slit.distance(np.array([0.5 + 0.5j]))[0] == pytest.approx(0.5)


def test_winding_signature(three):
    circle = ClosedCurve(-0.45 + 0.25 * np.exp(2j * np.pi * np.arange(200) / 200))
    sig = winding_signature(circle, three)
    np.testing.assert_array_equal(sig, [1, 0])
    sep = signature_separation(sig, three)
    assert sep.e_side == frozenset([0])
    np.testing.assert_array_equal(expected_signature(sep), [1, 0])
    big = ClosedCurve(0.8 * np.exp(2j * np.pi * np.arange(200) / 200))
    np.testing.assert_array_equal(winding_signature(big, three), [1, 1])
    touching = ClosedCurve(-0.45 + 0.15 * np.exp(2j * np.pi * np.arange(200) / 200))
    with pytest.raises(CurveTouchesComplement):
        winding_signature(touching, three, tol=1e-3)


@given(st.floats(0.1, 0.9), st.integers(3, 40))
def test_winding_of_polygon_about_centre(r, k):
    z = r * np.exp(2j * np.pi * np.arange(k) / k)
    assert winding_numbers(z, np.array([0.0]))[0] == 1
    assert winding_numbers(z[::-1], np.array([0.0]))[0] == -1
    assert winding_numbers(z, np.array([2.0]))[0] == 0


def test_closed_curve_operations():
    z = np.exp(2j * np.pi * np.arange(64) / 64)
    c = ClosedCurve(z)
    assert c.orientation == 1 and c.reversed().orientation == -1
    assert c.euclidean_length() == pytest.approx(2 * math.pi, rel=2e-3)
    assert abs(c.centroid()) < 1e-12
    assert c.is_simple()
    assert len(c.resampled(100)) == 100
    bow = ClosedCurve(np.array([0, 1 + 1j, 1, 1j]))
    assert not bow.is_simple()


def test_roundtrip_file(tmp_path, three):
    p = tmp_path / "dom.json"
    save_domain(three, p)
    back = load_domain(p)
    assert back.n == 3 and back.basepoint == three.basepoint
    assert [c.kind for c in back.components] == [c.kind for c in three.components]
    data = json.loads(p.read_text())
    data["components"][0]["radius"] = 0.2
    assert domain_from_dict(data).components[0].params["radius"] == 0.2


def test_yaml_domain(tmp_path):
    p = tmp_path / "dom.yaml"
    p.write_text("components:\n  - {kind: point, z: [0, 0]}\n  - {kind: point, z: inf}\nbasepoint: [1, 0]\n")
    dom = load_domain(p)
    assert dom.n == 2 and is_inf(dom.outer.params["z"]) and dom.components[0].is_point
