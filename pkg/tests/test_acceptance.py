"""Acceptance criteria, one test each, at their stated tolerances.

Each test prints a single ``criterion k PASS|FAIL`` line.  Scenario runs
are shared through a session cache, so the whole module takes several
minutes.
"""
import time

import numpy as np
import pytest

from hypdomain.canonical import eccentric_annulus_lambda, solve_canonical_map
from hypdomain.domain import Component, disc_domain, enumerate_separations, principal_count, separation_for, validate_domain
from hypdomain.geodesic import find_meridian
from hypdomain.hypmetric import annulus_equator_length, solve_density
from hypdomain.scenarios import modulus_ratio, run_scenario
from hypdomain.sphere import CompactSample, circle_sample, hausdorff_dist, sph_dist_array

_RUNS = {}


def scenario(name):
    if name not in _RUNS:
        _RUNS[name] = run_scenario(name)
    return _RUNS[name]


@pytest.fixture
def verdict(capsys):
    def report(k, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {k} {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return report


def criteria_detail(rep, names):
    return "; ".join(f"{n}={rep.criterion(n).status} ({rep.criterion(n).measured!r:.60} vs {rep.criterion(n).target})"
                     for n in names)


def test_criterion_01_disc_density(verdict):
    t0 = time.perf_counter()
    f = solve_density(disc_domain(), 0.01)
    seconds = time.perf_counter() - t0
    z = f.nodes()[f.interior]
    r = np.abs(z)
    nearest = np.where(r > 0, z / np.maximum(r, 1e-300), 1.0)
    keep = sph_dist_array(z, nearest) >= 0.1
    z = z[keep]
    err = float(np.max(np.abs(f.density(z) / (2 / (1 - np.abs(z) ** 2)) - 1)))
    verdict(1, err <= 0.01 and seconds <= 60,
            f"max relative error {err:.3e} <= 1e-2 on {z.size} nodes, solve {seconds:.1f}s <= 60s")


def test_criterion_02_annulus_meridian(verdict, annulus, annulus_field):
    m = find_meridian(annulus, annulus_field, separation_for(annulus, [0]))
    haus = hausdorff_dist(CompactSample(m.curve.points, closed=True), circle_sample(0, 0.5))
    exact = annulus_equator_length(0.25, 1.0)
    rel = abs(m.length - exact) / exact
    verdict(2, haus <= 1e-2 and rel <= 0.02, f"Hausdorff {haus:.3e} <= 1e-2, length error {rel:.2e} <= 2e-2")


def test_criterion_03_separation_counts(verdict):
    counts, principal = [], []
    for n in (2, 3, 4, 5):
        comps = [Component.disc(0.5 * np.exp(2j * np.pi * k / (n - 1)), 0.08) for k in range(n - 1)]
        dom = validate_domain(comps + [Component.outer_disc_complement(0, 1)], 0.0)
        seps = enumerate_separations(dom)
        counts.append(len(seps))
        principal.append((sum(s.principal for s in seps), principal_count(n), min(n, 2 ** (n - 1) - 1)))
    ok = counts == [1, 3, 7, 15] and all(a == b == c for a, b, c in principal)
    verdict(3, ok, f"classes {counts}, principal {[p[0] for p in principal]}")


def test_criterion_04_canonical_map(verdict):
    dom = validate_domain([Component.disc(0.3, 0.3), Component.outer_disc_complement(0, 1)], -0.65)
    oracle = eccentric_annulus_lambda(0.3, 0.3)
    cm16 = solve_canonical_map(dom, truncation=16)
    cm24 = solve_canonical_map(dom, truncation=24)
    gap = abs(cm16.Lambda.lambdas[0] - oracle)
    stab = cm16.Lambda.distance(cm24.Lambda)
    res = cm16.boundary_residual()
    verdict(4, gap <= 1e-3 and stab <= 1e-3 and res <= 1e-4,
            f"oracle gap {gap:.2e} <= 1e-3, truncation change {stab:.2e} <= 1e-3, residual {res:.2e} <= 1e-4")


def test_criterion_05_shrinking_annuli(verdict):
    rep = scenario("shrinking-annuli")
    ratios_exact = all(modulus_ratio(m) == 0.5 for m in range(2, 51))
    k = rep.convergence[0].kernel
    ok = rep.criterion("verdict").measured == "degenerate" and k.singleton and k.basepoint == 0 and ratios_exact
    verdict(5, ok, f"verdict {rep.criterion('verdict').measured}, kernel {{{k.basepoint}}}, "
                   f"ratio exactly 1/2 for m=2..50: {ratios_exact}")


def test_criterion_06_figure2(verdict):
    rep = scenario("figure2-pinch")
    names = ("kernel_is_half_disc", "pinching_decreasing", "merging_increasing")
    ok = rep.horizon == 40 and all(rep.criterion(n).status == "pass" for n in names)
    verdict(6, ok, f"M={rep.horizon}; " + criteria_detail(rep, names))


def test_criterion_07_figure3(verdict):
    rep = scenario("figure3-alternating")
    names = ("verdict", "subsequence_kernels_differ", "equator_U1", "equator_U2")
    ok = rep.criterion("verdict").measured == "diverges" and all(rep.criterion(n).status == "pass" for n in names)
    verdict(7, ok, criteria_detail(rep, names))


def test_criterion_08_geodesic_convergence(verdict):
    rep = scenario("converging-annuli")
    names = ("deviation_decreasing", "length_error_decreasing", "final_deviation", "final_length_error")
    ok = rep.horizon == 30 and all(rep.criterion(n).status == "pass" for n in names)
    verdict(8, ok, f"M={rep.horizon}; " + criteria_detail(rep, names))


def test_criterion_09_conformal_invariance(verdict):
    rep = scenario("symmetric-3-connected")
    c = rep.criterion("conformal_invariance")
    verdict(9, c.status == "pass", f"relative length gap {c.measured:.3%} <= 3% "
                                   f"({rep.values['length']:.4f} vs {rep.values['image_length']:.4f})")


CONVERGING = ("constant-annulus", "converging-annuli", "eccentric-annuli", "symmetric-3-connected", "figure2-pinch")


def test_criterion_10_basepoint_shift(verdict):
    status = {name: scenario(name).criterion("basepoint_shift").status for name in CONVERGING}
    verdict(10, all(s == "pass" for s in status.values()), ", ".join(f"{k}={v}" for k, v in status.items()))
