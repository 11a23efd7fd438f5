import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from hypdomain.canonical import (
    LambdaVector,
    SlitAnnulusMap,
    dump_map,
    eccentric_annulus_lambda,
    eval_forward,
    eval_inverse,
    in_slit_annulus,
    modulus_annulus,
    solve_canonical_map,
    standard_domain,
)
from hypdomain.domain import Component, annulus_domain, validate_domain
from hypdomain.exceptions import (
    DegenerateComponent,
    NotMultiplyConnected,
    PointNotInDomain,
    WOutsideRange,
)

# arccosh((1 + r^2 - c^2) / (2 r)) for c = r = 0.3, i.e. log 3
ECCENTRIC_LAMBDA = 1.0986122886681098


def eccentric(c=0.3, r=0.3, u=-0.65):
    return validate_domain([Component.disc(c, r), Component.outer_disc_complement(0, 1)], u)


@pytest.fixture(scope="module")
def three_map(three):
    return solve_canonical_map(three)


def test_concentric_annulus():
    assert modulus_annulus(annulus_domain(0.25, 1.0)) == pytest.approx(math.log(4), abs=1e-12)


def test_eccentric_matches_oracle():
    assert eccentric_annulus_lambda(0.3, 0.3) == pytest.approx(ECCENTRIC_LAMBDA, abs=1e-14)
    assert modulus_annulus(eccentric()) == pytest.approx(ECCENTRIC_LAMBDA, abs=1e-10)


@given(st.floats(0.0, 0.4), st.floats(0.1, 0.4))
def test_eccentric_oracle_agrees_with_arccosh(c, r):
    if c + r >= 0.95:
        return
    assert eccentric_annulus_lambda(c, r) == pytest.approx(math.acosh((1 + r * r - c * c) / (2 * r)), rel=1e-10)


def test_modulus_is_conformally_invariant():
    # scaling and translating the picture leaves lambda unchanged
    dom = validate_domain([Component.disc(1 + 0.6j, 0.6), Component.outer_disc_complement(0.4 + 0.6j, 2.0)], -0.9 + 0.6j)
    assert modulus_annulus(dom) == pytest.approx(eccentric_annulus_lambda(0.3, 0.3), abs=1e-9)


def test_roundtrip(three_map):
    z = np.array([0.5j, 0.1 + 0.6j, -0.7, 0.2 - 0.5j])
    w = eval_forward(three_map, z)
    assert np.all(in_slit_annulus(three_map, w))
    np.testing.assert_allclose(eval_inverse(three_map, w), z, atol=1e-9)


def test_normalisation(three, three_map):
    d = three_map.derivative(np.array([three.basepoint]))[0]
    assert abs(d.imag) < 1e-12 * abs(d) and d.real > 0
    assert three_map.residual < 1e-5
    with pytest.raises(PointNotInDomain):
        eval_forward(three_map, 0.45)
    with pytest.raises(WOutsideRange):
        eval_inverse(three_map, 0.5)


def test_symmetric_lambda(three_map):
    lam = three_map.Lambda
    assert lam.n == 3 and lam.dim == 4
    assert 0 < lam.lambdas[1] < lam.lambdas[0]


def test_truncation_stable(three, three_map):
    coarse = solve_canonical_map(three, truncation=12)
    assert coarse.Lambda.distance(three_map.Lambda) < 1e-4


def test_standard_domain_fixed_point():
    lam = LambdaVector((1.2, 0.6), (0.5, 1.7), 3)
    dom = standard_domain(lam)
    cm = solve_canonical_map(dom, truncation=20)
    assert cm.Lambda.lambdas[0] == pytest.approx(1.2, abs=1e-3)
    assert cm.Lambda.lambdas[1] == pytest.approx(0.6, abs=1e-3)
    span = np.angle(np.exp(1j * (cm.Lambda.thetas[1] - cm.Lambda.thetas[0]))) % (2 * np.pi)
    assert span == pytest.approx(1.2, abs=1e-2)


def test_lambda_vector_validation():
    with pytest.raises(NotMultiplyConnected):
        LambdaVector((), (), 1)
    with pytest.raises(ValueError):
        LambdaVector((1.0,), (0.1,), 2)
    with pytest.raises(ValueError):
        LambdaVector((-1.0,), (), 2)
    with pytest.raises(ValueError):
        LambdaVector((1.0, 1.5), (0.0, 1.0), 3)
    a = LambdaVector((1.0, 0.5), (0.1, 6.2), 3)
    b = LambdaVector((1.0, 0.5), (0.1 + 2 * math.pi, 6.2), 3)
    assert a.distance(b) == pytest.approx(0.0, abs=1e-12)
    assert a.modulus == pytest.approx(1 / (2 * math.pi))


def test_degenerate_domains():
    dom = validate_domain([Component.point(0.0), Component.outer_disc_complement(0, 1)], 0.5)
    with pytest.raises(DegenerateComponent):
        solve_canonical_map(dom)
    with pytest.raises(NotMultiplyConnected):
        solve_canonical_map(validate_domain([Component.outer_disc_complement(0, 1)], 0.0))


def test_estimator(tmp_path):
    est = SlitAnnulusMap(truncation=12)
    assert clone(est).get_params() == {"truncation": 12, "inner": 0, "samples": None}
    with pytest.raises(NotFittedError):
        est.transform([0.5])
    est.fit(annulus_domain(0.25, 1.0))
    w = est.transform([0.5, -0.5j])
    np.testing.assert_allclose(np.abs(w), [2.0, 2.0], rtol=1e-10)
    np.testing.assert_allclose(est.inverse_transform(w), [0.5, -0.5j], atol=1e-10)
    dump_map(est.map_, tmp_path / "map.json")
    data = json.loads((tmp_path / "map.json").read_text())
    assert data["lambdas"] == pytest.approx([math.log(4)])
