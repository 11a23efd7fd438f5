import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypdomain.canonical import LambdaVector, standard_domain
from hypdomain.caratheodory import (
    DomainSequence,
    Singleton,
    Tolerances,
    basepoint_shift_check,
    canonical_convergence_suite,
    check_convergence,
    connectivity_holds,
    hausdorff_kernel,
    kernel_distance,
    subsequence_gaps,
    thin,
)
from hypdomain.domain import annulus_domain, disc_domain
from hypdomain.exceptions import LabelingInconsistent, NoHausdorffLimit
from hypdomain.scenarios import figure3_domains, symmetric_three_connected
from hypdomain.sphere import sph_dist, to_sphere


def constant(M=8):
    dom = annulus_domain(0.25, 1.0, basepoint=0.5)
    return DomainSequence(lambda m: dom, M, "constant annulus")


def alternating(M=12):
    u1, u2 = figure3_domains()
    return DomainSequence(lambda m: u1 if m % 2 else u2, M, "alternating", limit_basepoint=1.0)


@pytest.fixture(scope="module")
def constant_report():
    seq = constant()
    return check_convergence(seq, seq[seq.last])


def test_sequence_indexing():
    calls = []
    seq = DomainSequence(lambda m: (calls.append(m), disc_domain(1.0, 0.1 / m))[1], 10)
    assert seq.indices == tuple(range(1, 11)) and seq.last == 10 and len(seq) == 10
    assert seq.tail() == (5, 6, 7, 8, 9, 10)
    seq[3], seq[3]
    even = seq.even()
    even[4], even[2]
    assert calls == [3, 4, 2]
    assert even.indices == (2, 4, 6, 8, 10) and seq.odd().indices[0] == 1
    with pytest.raises(ValueError):
        DomainSequence(lambda m: None, 0)


@given(st.integers(4, 60), st.complex_numbers(max_magnitude=0.5))
def test_richardson_limit_is_exact_for_one_over_m(M, c):
    seq = DomainSequence(lambda m: disc_domain(2.0, c + 0.5 / m), M)
    assert abs(seq.limit_point() - c) < 1e-12


def test_generator_may_return_pairs():
    seq = DomainSequence(lambda m: (disc_domain(), 0.5 / m), 4)
    assert seq.basepoint(2) == 0.25
    with pytest.raises(TypeError):
        DomainSequence(lambda m: 3, 2)[1]


@given(st.integers(0, 2 ** 32 - 1), st.floats(0.01, 0.2))
def test_thin_covers(seed, cell):
    z = np.random.default_rng(seed).normal(size=300) * (1 + 1j)
    t = thin(z, cell)
    assert 0 < t.size <= z.size
    assert set(t.tolist()) <= set(z.tolist())
    d = np.linalg.norm(to_sphere(z)[:, None, :] - to_sphere(t)[None, :, :], axis=2).min(axis=1)
    assert d.max() <= cell * math.sqrt(3) + 1e-12


def test_constant_sequence_converges(constant_report):
    r = constant_report
    assert r.verdict == "converges"
    assert r.condition_i.passed and r.condition_ii.passed and r.condition_iii.passed
    assert r.kernel.connectivity == 2 and not r.kernel.singleton
    assert r.kernel.lemma_gap <= 0.015 + 4 / 500
    assert "up to m=8" in r.wording and "verdict: converges" in r.summary()
    assert r.kernel.contains(np.array([0.5, 0.6j]))[0] and not r.kernel.contains(np.array([0.1]))[0]


def test_kernel_matches_candidate(constant_report):
    r = constant_report
    assert kernel_distance(r.kernel, r.candidate) <= 0.02
    assert connectivity_holds(r.kernel, constant())


def test_wrong_candidate_is_inconclusive():
    seq = constant()
    r = check_convergence(seq, annulus_domain(0.35, 1.0, basepoint=0.5))
    assert r.verdict == "inconclusive" and not r.condition_iii.passed


def shrinking(M):
    return DomainSequence(lambda m: annulus_domain(1 / m ** 3, m, basepoint=1 / m), M, indices=range(2, M + 1))


def test_short_horizon_is_inconclusive():
    # u_30 = 1/30 is still further than the basepoint tolerance from 0
    r = check_convergence(shrinking(30), Singleton(0.0))
    assert r.verdict == "inconclusive" and not r.condition_i.passed and r.condition_iii.passed


def test_shrinking_is_degenerate():
    seq = shrinking(60)
    r = check_convergence(seq, Singleton(0.0))
    assert r.verdict == "degenerate" and r.kernel.singleton
    assert r.condition_ii.status == "n/a"
    assert all(m is not None for _, m in r.degenerate_witness)
    assert kernel_distance(r.kernel, Singleton(0.0)) < 0.02
    assert kernel_distance(Singleton(0.0), disc_domain()) == math.inf


def test_alternating_diverges():
    seq = alternating()
    with pytest.raises(NoHausdorffLimit):
        hausdorff_kernel(seq)
    r = check_convergence(seq, figure3_domains()[0])
    assert r.verdict == "diverges" and r.subsequence_gap > 0.1
    assert "inconsistent" in r.wording


def test_subsequence_gaps(constant_report):
    gaps = subsequence_gaps(constant(), constant_report.kernel, strides=(2,))
    assert set(gaps) == {(2, 0), (2, 1)} and max(gaps.values()) < 1e-12


def test_basepoint_shift():
    seq = constant(6)
    before, after = basepoint_shift_check(seq, seq[6], lambda m: 0.55 + 0.05j / m, 0.55)
    assert before.verdict == after.verdict == "converges"
    assert sph_dist(after.kernel.basepoint, 0.55) < 1e-12


def test_tolerances_are_reported():
    tol = Tolerances(kernel=0.05)
    assert "kernel=0.05" in check_convergence(constant(4), constant(4)[4], tol).summary()


def test_canonical_suite_on_standard_domains():
    lam = math.log(4)
    seq = DomainSequence(lambda m: standard_domain(LambdaVector((lam + 1 / m,), (), 2)), 20)
    t = canonical_convergence_suite(seq, standard_domain(LambdaVector((lam,), (), 2)), ms=(5, 10, 20))
    np.testing.assert_allclose(t.column("lambda_gap"), [0.2, 0.1, 0.05], atol=1e-9)
    assert t.checks["lambda_gap_trend"]


def test_canonical_suite_rejects_mismatch():
    seq = DomainSequence(lambda m: annulus_domain(0.25, 1.0, basepoint=0.6j), 4)
    with pytest.raises(LabelingInconsistent):
        canonical_convergence_suite(seq, symmetric_three_connected(), ms=(4,))
