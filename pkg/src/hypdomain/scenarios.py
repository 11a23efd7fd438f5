"""Registry of reference scenarios and the runner that evaluates them.

Each scenario builds a :class:`DomainSequence`, runs the relevant suites
and resolves its criteria to ``pass``, ``fail`` or ``inconclusive``.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from .canonical import eval_forward, solve_canonical_map
from .caratheodory import (
    DomainSequence,
    SuiteTable,
    Singleton,
    Tolerances,
    basepoint_shift_check,
    canonical_convergence_suite,
    check_convergence,
    connectivity_holds,
    geodesic_convergence_suite,
    kernel_distance,
    meridian_trend,
    subsequence_gaps,
)
from .domain import ClosedCurve, Component, Domain, annulus_domain, disc_domain, separation_for, validate_domain
from .exceptions import UnknownScenario
from .geodesic import find_meridian, uniform_deviation
from .hypmetric import annulus_equator_length, hyp_length, solve_density


@dataclass
class Criterion:
    """One resolved check of a scenario run."""

    name: str
    status: str
    measured: object
    target: str
    provenance: str = ""


@dataclass
class Figure:
    """A domain with curves to draw (the first curve is highlighted)."""

    title: str
    domain: Domain
    curves: List[ClosedCurve] = field(default_factory=list)


@dataclass
class RunReport:
    """Outcome of :func:`run_scenario`."""

    scenario: str
    horizon: int
    seed: int
    criteria: List[Criterion] = field(default_factory=list)
    values: Dict[str, object] = field(default_factory=dict)
    runtimes: Dict[str, float] = field(default_factory=dict)
    tables: List[SuiteTable] = field(default_factory=list)
    convergence: list = field(default_factory=list, repr=False)
    figures: List[Figure] = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return all(c.status == "pass" for c in self.criteria)

    def add(self, name: str, ok, measured, target: str, provenance: str = ""):
        status = "inconclusive" if ok is None else ("pass" if ok else "fail")
        self.criteria.append(Criterion(name, status, measured, target, provenance))

    def criterion(self, name: str) -> Criterion:
        for c in self.criteria:
            if c.name == name:
                return c
        raise KeyError(name)


@dataclass
class Scenario:
    """A named sequence, its expected behaviour and the runner producing a :class:`RunReport`."""

    name: str
    description: str
    horizon: int
    sequence: Callable[[int], DomainSequence]
    expected: Dict[str, str]
    runner: Callable[..., RunReport] = field(repr=False)
    candidate: Optional[Callable[[], object]] = field(default=None, repr=False)
    tolerances: Tolerances = field(default_factory=Tolerances)


REGISTRY: Dict[str, Scenario] = {}


def register(s: Scenario) -> Scenario:
    REGISTRY[s.name] = s
    return s


def get_scenario(name: str) -> Scenario:
    try:
        return REGISTRY[name]
    except KeyError:
        raise UnknownScenario(f"unknown scenario {name!r}; known: {', '.join(sorted(REGISTRY))}") from None


def run_scenario(name: str, horizon: Optional[int] = None, overrides: Optional[dict] = None,
                 seed: int = 0) -> RunReport:
    """Run a registered scenario; ``overrides`` are passed to its runner as keywords."""
    s = get_scenario(name)
    M = horizon or s.horizon
    rep = RunReport(name, M, seed)
    t0 = time.perf_counter()
    s.runner(s, s.sequence(M), rep, seed=seed, **(overrides or {}))
    rep.runtimes["total"] = time.perf_counter() - t0
    return rep


def _timed(rep: RunReport, key: str, fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    rep.runtimes[key] = time.perf_counter() - t0
    return out


def _convergence_criteria(rep: RunReport, report, verdict: str, provenance: str):
    rep.convergence.append(report)
    rep.values["verdict"] = report.verdict
    rep.add("verdict", report.verdict == verdict, report.verdict, verdict, provenance)


def _shift_criterion(rep: RunReport, seq, cand, w, w_lim, tol):
    before, after = _timed(rep, "basepoint_shift", basepoint_shift_check, seq, cand, w, w_lim, tol)
    ok = before.verdict == "converges" and after.verdict == "converges"
    rep.add("basepoint_shift", ok, after.verdict, "converges after shifting basepoints", "PAPER: converges to (U,w)")


def _connectivity_criterion(rep: RunReport, report, seq):
    if report.kernel is not None:
        rep.add("connectivity_non_increase", connectivity_holds(report.kernel, seq), report.kernel.connectivity,
                "kernel connectivity <= tail connectivity", "PAPER: cannot split up into more components")


def _lemma_criterion(rep: RunReport, report):
    k = report.kernel
    if k is not None and not k.singleton:
        bound = k.tau + 4.0 / report.tolerances.grid
        rep.add("kernel_boundary_in_limit", k.lemma_gap <= bound, k.lemma_gap, f"<= {bound:.4g}",
                "PAPER: boundary of U is contained in K")


# ---------------------------------------------------------------------------
# shrinking annuli A(0, 1/m^3, m), u_m = 1/m


def _shrinking_seq(M: int) -> DomainSequence:
    return DomainSequence(lambda m: annulus_domain(1.0 / m ** 3, float(m), basepoint=1.0 / m), M,
                          "A(0, 1/m^3, m) with u_m = 1/m", indices=range(2, M + 1))


def annulus_modulus(r: float, R: float) -> float:
    """Modulus ``log(R / r) / 2 pi`` of a round annulus."""
    return (math.log(R) - math.log(r)) / (2 * math.pi)


def modulus_ratio(m: int) -> float:
    """Modulus of ``A(0, 1/m^2, 1)`` over that of ``A(0, 1/m^3, m)``; computed from ``log m``."""
    lm = math.log(m)
    return (2 * lm) / (4 * lm)


def _run_shrinking(s: Scenario, seq: DomainSequence, rep: RunReport, seed: int = 0, numeric_ms=(2, 3, 5, 8),
                   tol: Optional[Tolerances] = None):
    tol = tol or s.tolerances
    r = _timed(rep, "convergence", check_convergence, seq, Singleton(0.0), tol)
    _convergence_criteria(rep, r, "degenerate", "PAPER: clearly tends to ({0},0)")
    k = r.kernel
    at0 = k is not None and k.singleton and abs(k.basepoint) <= tol.basepoint
    rep.add("kernel_singleton", at0, None if k is None else k.basepoint, "{0}", "PAPER: clearly tends to ({0},0)")
    rep.add("shrinking_witness", all(m is not None for _, m in r.degenerate_witness), r.degenerate_witness,
            "every eps-disc about 0 meets the complement eventually", "PAPER: contained in at most finitely many")
    ratios = [modulus_ratio(m) for m in seq.indices]
    rep.values["modulus_ratios"] = ratios
    rep.add("modulus_ratio_half", all(q == 0.5 for q in ratios), max(abs(q - 0.5) for q in ratios),
            "exactly 1/2 for every m", "PAPER: same equator and half the modulus")
    num = []
    for m in numeric_ms:
        lam_small = solve_canonical_map(annulus_domain(1.0 / m ** 2, 1.0)).Lambda.lambdas[0]
        lam_big = solve_canonical_map(annulus_domain(1.0 / m ** 3, float(m))).Lambda.lambdas[0]
        num.append(lam_small / lam_big)
    rep.values["modulus_ratios_numeric"] = num
    rep.add("modulus_ratio_numeric", max(abs(q - 0.5) for q in num) <= 1e-6, num, "within 1e-6 of 1/2",
            "DERIVED: canonical-map moduli")
    for m in (seq.last,):
        rep.figures.append(Figure(f"U_{m}", seq[m]))


register(Scenario(
    "shrinking-annuli", "A(0, 1/m^3, m) shrinking to the degenerate limit ({0}, 0)", 50, _shrinking_seq,
    {"verdict": "degenerate [PAPER]", "kernel": "{0} [PAPER]", "modulus_ratio": "1/2 [PAPER]"},
    _run_shrinking, lambda: Singleton(0.0)))


# ---------------------------------------------------------------------------
# constant annulus


def _constant_seq(M: int) -> DomainSequence:
    dom = annulus_domain(0.25, 1.0, basepoint=0.5)
    return DomainSequence(lambda m: dom, M, "constant A(0.25, 1)")


def _run_constant(s: Scenario, seq: DomainSequence, rep: RunReport, seed: int = 0, resolution: float = 0.01,
                  tol: Optional[Tolerances] = None):
    tol = tol or s.tolerances
    lim = seq[seq.last]
    r = _timed(rep, "convergence", check_convergence, seq, lim, tol)
    _convergence_criteria(rep, r, "converges", "TRIVIAL")
    _connectivity_criterion(rep, r, seq)
    ms = seq.indices[-2:]
    g = _timed(rep, "geodesic_suite", geodesic_convergence_suite, seq, lim, [0], ms, resolution, seed)
    rep.tables.append(g)
    dev = float(np.max(g.column("deviation")))
    rep.add("zero_deviation", dev == 0.0 and float(np.max(g.column("length_error"))) == 0.0, dev, "0",
            "TRIVIAL")
    c = _timed(rep, "canonical_suite", canonical_convergence_suite, seq, lim, None, ms)
    rep.tables.append(c)
    rep.add("zero_canonical_gap", float(np.max(c.column("lambda_gap"))) == 0.0, float(np.max(c.column("lambda_gap"))),
            "0", "TRIVIAL")
    _shift_criterion(rep, seq, lim, lambda m: 0.55 + 0.05j / m, 0.55, tol)
    mer = find_meridian(lim, solve_density(lim, resolution), separation_for(lim, [0]), seed=seed)
    rep.figures.append(Figure("constant annulus", lim, [mer.curve]))


register(Scenario("constant-annulus", "constant sequence A(0.25, 1)", 10, _constant_seq,
                  {"verdict": "converges [TRIVIAL]", "deviations": "0 [TRIVIAL]"}, _run_constant,
                  lambda: annulus_domain(0.25, 1.0, basepoint=0.5)))


# ---------------------------------------------------------------------------
# converging annuli A(0.25 - 0.1/m, 1 + 1/m)


def _converging_seq(M: int) -> DomainSequence:
    return DomainSequence(lambda m: annulus_domain(0.25 - 0.1 / m, 1.0 + 1.0 / m, basepoint=0.5), M,
                          "A(0.25 - 0.1/m, 1 + 1/m) with u_m = 0.5", limit_basepoint=0.5)


def _run_converging(s: Scenario, seq: DomainSequence, rep: RunReport, seed: int = 0, resolution: float = 0.01,
                    ms=None, tol: Optional[Tolerances] = None):
    tol = tol or s.tolerances
    M = seq.last
    lim = annulus_domain(0.25, 1.0, basepoint=0.5)
    r = _timed(rep, "convergence", check_convergence, seq, lim, tol)
    _convergence_criteria(rep, r, "converges", "DERIVED: nested annuli")
    _connectivity_criterion(rep, r, seq)
    _lemma_criterion(rep, r)
    ms = tuple(ms or sorted({max(1, round(M * f)) for f in (1 / 3, 1 / 2, 2 / 3, 5 / 6, 1)}))
    ell = annulus_equator_length(0.25, 1.0)
    g = _timed(rep, "geodesic_suite", geodesic_convergence_suite, seq, lim, [0], ms, resolution, seed,
               reference_length=ell)
    rep.tables.append(g)
    dev, err = g.column("deviation"), g.column("length_error")
    rep.values.update(final_deviation=float(dev[-1]), final_length_error=float(err[-1]), limit_length=ell)
    rep.add("deviation_decreasing", g.checks["deviation_decreasing"], dev.tolist(), "non-increasing over the tail",
            "PAPER: converge uniformly to gamma")
    rep.add("length_error_decreasing", g.checks["length_error_decreasing"], err.tolist(),
            "non-increasing over the tail", "PAPER: lengths converge")
    rep.add("final_deviation", g.checks["final_deviation"], float(dev[-1]), "< 0.02", "DERIVED: closed form")
    rep.add("final_length_error", g.checks["final_length_error"], float(err[-1]), "< 0.02",
            "DERIVED: 2 pi^2 / log 4")
    lengths = g.column("length")
    rep.add("length_lower_bound", bool(lengths.min() >= 0.9 * ell), float(lengths.min()),
            f">= 0.9 * {ell:.6g}", "DERIVED: bounded below away from zero")
    _shift_criterion(rep, seq, lim, lambda m: 0.6 + 0.1 / m, 0.6, tol)
    U = seq[M]
    f = solve_density(U, resolution)
    mer = find_meridian(U, f, separation_for(U, [0]), seed=seed, with_dist=False)
    rep.figures.append(Figure(f"U_{M}", U, [mer.curve]))


register(Scenario("converging-annuli", "A(0.25 - 0.1/m, 1 + 1/m) converging to A(0.25, 1)", 30, _converging_seq,
                  {"verdict": "converges [DERIVED]", "length": "2 pi^2 / log 4 [DERIVED]"}, _run_converging,
                  lambda: annulus_domain(0.25, 1.0, basepoint=0.5)))


# ---------------------------------------------------------------------------
# eccentric annuli D minus closed D(0.3/m, 0.3)


def _eccentric_seq(M: int) -> DomainSequence:
    def gen(m):
        return validate_domain([Component.disc(0.3 / m, 0.3), Component.outer_disc_complement(0.0, 1.0)], -0.65)

    return DomainSequence(gen, M, "unit disc minus closed D(0.3/m, 0.3)", limit_basepoint=-0.65)


def _run_eccentric(s: Scenario, seq: DomainSequence, rep: RunReport, seed: int = 0, ms=None,
                   tol: Optional[Tolerances] = None):
    from .canonical import eccentric_annulus_lambda

    tol = tol or s.tolerances
    M = seq.last
    lim = annulus_domain(0.3, 1.0, basepoint=-0.65)
    r = _timed(rep, "convergence", check_convergence, seq, lim, tol)
    _convergence_criteria(rep, r, "converges", "DERIVED: eccentricity 0.3/m")
    _connectivity_criterion(rep, r, seq)
    ms = tuple(ms or sorted({max(1, round(M * f)) for f in (1 / 3, 1 / 2, 2 / 3, 1)}))
    c = _timed(rep, "canonical_suite", canonical_convergence_suite, seq, lim, None, ms)
    rep.tables.append(c)
    oracle = [eccentric_annulus_lambda(0.3 / m, 0.3) for m in ms]
    fitted = [solve_canonical_map(seq[m]).Lambda.lambdas[0] for m in ms]
    gap = max(abs(a - b) for a, b in zip(oracle, fitted))
    rep.add("lambda_matches_oracle", gap <= 1e-3, gap, "<= 1e-3", "DERIVED: Mobius oracle")
    rep.add("canonical_convergence", c.passed, c.rows[-1][1:3], "final gaps below tolerance",
            "PAPER: inverses psi_m converge")
    _shift_criterion(rep, seq, lim, lambda m: -0.6 + 0.05j / m, -0.6, tol)
    rep.figures.append(Figure(f"U_{M}", seq[M]))


register(Scenario("eccentric-annuli", "unit disc minus D(0.3/m, 0.3) converging to A(0.3, 1)", 30, _eccentric_seq,
                  {"verdict": "converges [DERIVED]", "Lambda": "Mobius oracle [DERIVED]"}, _run_eccentric,
                  lambda: annulus_domain(0.3, 1.0, basepoint=-0.65)))


# ---------------------------------------------------------------------------
# symmetric 3-connected domain


def symmetric_three_connected(basepoint=0.5j) -> Domain:
    """Unit disc minus two closed discs of radius 0.15 centred at +-0.45."""
    return validate_domain([Component.disc(-0.45, 0.15), Component.disc(0.45, 0.15),
                            Component.outer_disc_complement(0.0, 1.0)], basepoint)


def _symmetric_seq(M: int) -> DomainSequence:
    dom = symmetric_three_connected()
    return DomainSequence(lambda m: dom, M, "constant symmetric 3-connected domain")


def scaled_standard_domain(lam, basepoint) -> Domain:
    """The slit annulus of ``lam`` scaled by ``exp(-lambda^1)`` so that its outer radius is 1.

    Hyperbolic lengths are unchanged by the scaling, while the grid needed
    to resolve the domain shrinks by the same factor.
    """
    s = math.exp(-lam.lambdas[0])
    comps = [Component.disc(0.0, s)]
    for j, lj in enumerate(lam.lambdas[1:]):
        comps.append(Component.arc(0.0, math.exp(lj) * s, lam.thetas[2 * j], lam.thetas[2 * j + 1]))
    comps.append(Component.outer_disc_complement(0.0, 1.0))
    return validate_domain(comps, basepoint * s)


def conformal_invariance(domain: Domain, e_side=(0,), resolution: float = 0.01, seed: int = 0,
                         truncation: int = 16) -> dict:
    """Meridian length in ``domain`` against the meridian length in its slit-annulus image.

    Also reports the length of the image of the meridian in the image
    domain, which is at least the image meridian's length.
    """
    cm = solve_canonical_map(domain, truncation=truncation)
    f = solve_density(domain, resolution)
    mer = find_meridian(domain, f, separation_for(domain, list(e_side)), seed=seed, with_dist=False)
    image = scaled_standard_domain(cm.Lambda, cm.basepoint_image)
    labels = [cm.inner] + cm.slit_components + [cm.outer]
    image_side = [labels.index(j) for j in e_side]
    fi = solve_density(image, resolution)
    mer_img = find_meridian(image, fi, separation_for(image, image_side), seed=seed, with_dist=False)
    pushed = ClosedCurve(eval_forward(cm, mer.curve.refined(4).points) * math.exp(-cm.Lambda.lambdas[0]))
    return {"length": mer.length, "image_length": mer_img.length, "pushed_length": hyp_length(fi, pushed),
            "relative_gap": abs(mer_img.length - mer.length) / mer.length, "meridian": mer,
            "image_meridian": mer_img, "image": image, "map": cm}


def _run_symmetric(s: Scenario, seq: DomainSequence, rep: RunReport, seed: int = 0, resolution: float = 0.01,
                   tol: Optional[Tolerances] = None):
    tol = tol or s.tolerances
    lim = seq[seq.last]
    r = _timed(rep, "convergence", check_convergence, seq, lim, tol)
    _convergence_criteria(rep, r, "converges", "TRIVIAL")
    _connectivity_criterion(rep, r, seq)
    ci = _timed(rep, "conformal_invariance", conformal_invariance, lim, (0,), resolution, seed)
    rep.values.update(length=ci["length"], image_length=ci["image_length"], pushed_length=ci["pushed_length"])
    rep.add("conformal_invariance", ci["relative_gap"] <= 0.03, ci["relative_gap"], "<= 3%",
            "PAPER: phi(gamma) is a meridian")
    c = _timed(rep, "canonical_suite", canonical_convergence_suite, seq, lim, None, seq.indices[-2:])
    rep.tables.append(c)
    rep.add("zero_canonical_gap", float(np.max(c.column("lambda_gap"))) == 0.0,
            float(np.max(c.column("lambda_gap"))), "0", "TRIVIAL")
    _shift_criterion(rep, seq, lim, lambda m: 0.5j + 0.05 / m, 0.5j, tol)
    rep.figures.append(Figure("symmetric 3-connected", lim, [ci["meridian"].curve]))
    rep.figures.append(Figure("slit-annulus image", ci["image"], [ci["image_meridian"].curve]))


register(Scenario("symmetric-3-connected", "constant unit disc minus two symmetric discs", 6, _symmetric_seq,
                  {"verdict": "converges [TRIVIAL]", "conformal_invariance": "3% [PAPER]"}, _run_symmetric,
                  symmetric_three_connected))


# ---------------------------------------------------------------------------
# Figure 2: pinching and merging


def figure2_kernel_domain(m: int) -> Domain:
    """Unit disc minus the circle ``|z| = 1/2`` with a gap of half-angle ``1/(2m)`` about ``1/2``."""
    g = 1.0 / (2 * m)
    return validate_domain([Component.arc(0.0, 0.5, g, 2 * math.pi - g), Component.outer_disc_complement(0.0, 1.0)],
                           0.0)


def figure2_meridian_domain(m: int) -> Domain:
    """Unit disc minus a shrinking disc and two discs whose gap closes.

    Components: ``D(-0.45, 0.3/sqrt m)`` (pinching), discs of radius 0.2
    centred at ``0.4 +- i(0.2 + g/2)`` with gap ``g = 0.4/sqrt m``
    (merging), and the outside of the unit disc.
    """
    rho = 0.3 / math.sqrt(m)
    g = 0.4 / math.sqrt(m)
    off = 0.2 + g / 2
    return validate_domain([Component.disc(-0.45, rho), Component.disc(0.4 + 1j * off, 0.2),
                            Component.disc(0.4 - 1j * off, 0.2), Component.outer_disc_complement(0.0, 1.0)], -0.1)


def figure2_resolution(m: int) -> float:
    return min(0.4 / math.sqrt(m) / 10, 0.3 / math.sqrt(m) / 4, 0.01)


def _figure2_seq(M: int) -> DomainSequence:
    return DomainSequence(figure2_kernel_domain, M, "unit disc minus |z| = 1/2 with a closing gap")


def _run_figure2(s: Scenario, seq: DomainSequence, rep: RunReport, seed: int = 0, trend_ms=None,
                 tol: Optional[Tolerances] = None, meridians: bool = True):
    tol = tol or s.tolerances
    M = seq.last
    cand = disc_domain(0.5, 0.0)
    r = _timed(rep, "convergence", check_convergence, seq, cand, tol)
    _convergence_criteria(rep, r, "converges", "PAPER: converge to (D(0,1/2), 0)")
    gap = kernel_distance(r.kernel, cand) if r.kernel is not None else math.inf
    rep.values["kernel_gap"] = gap
    rep.add("kernel_is_half_disc", gap <= 0.02, gap, "<= 0.02", "PAPER: converge to (D(0,1/2), 0)")
    _connectivity_criterion(rep, r, seq)
    _lemma_criterion(rep, r)
    sub = subsequence_gaps(seq, r.kernel, tol=tol) if r.kernel is not None else {}
    rep.add("subsequence_consistency", all(v <= tol.kernel for v in sub.values()),
            max(sub.values()) if sub else None, f"<= {tol.kernel}", "PAPER: kernel U as does every subsequence")
    _shift_criterion(rep, seq, cand, lambda m: 0.1j + 0.1 / m, 0.1j, tol)
    rep.figures.append(Figure(f"U_{M}", seq[M]))
    if not meridians:
        return
    trend_ms = tuple(trend_ms or (10, 20, 30, 40))
    mseq = DomainSequence(figure2_meridian_domain, max(trend_ms), "pinching and merging discs")
    pinch = _timed(rep, "pinch_trend", meridian_trend, mseq, [0], trend_ms, figure2_resolution, seed)
    merge = _timed(rep, "merge_trend", meridian_trend, mseq, [1], trend_ms, figure2_resolution, seed)
    pinch.name, merge.name = "pinching-meridian", "merging-meridian"
    rep.tables += [pinch, merge]
    rep.add("pinching_decreasing", pinch.checks["strictly_decreasing"], pinch.column("length").tolist(),
            "strictly decreasing", "PAPER: length tending to zero")
    rep.add("merging_increasing", merge.checks["strictly_increasing"], merge.column("length").tolist(),
            "strictly increasing", "PAPER: lengths which must tend to infinity")
    low = pinch.column("length")
    rep.add("lower_bound_violated", bool(low.min() < 0.8 * low[0]), float(low.min() / low[0]),
            "min length < 0.8 x first (bounds fail without the hypotheses)", "PAPER: Figure 2 discussion")


register(Scenario("figure2-pinch", "circle with a closing gap; pinching and merging discs", 40, _figure2_seq,
                  {"kernel": "D(0,1/2) [PAPER]", "pinching": "decreasing [PAPER]", "merging": "increasing [PAPER]"},
                  _run_figure2, lambda: disc_domain(0.5, 0.0)))


# ---------------------------------------------------------------------------
# Figure 3: two domains sharing the equator |z| = 1


def figure3_domains(basepoint: complex = 1.0):
    """``A(1/2, 2)`` and ``{|z - 0.2| > 0.4} & {|z + 5/3| < 10/3}``, both symmetric under ``1/z``."""
    U1 = annulus_domain(0.5, 2.0, basepoint=basepoint)
    U2 = validate_domain([Component.disc(0.2, 0.4), Component.outer_disc_complement(-5.0 / 3.0, 10.0 / 3.0)],
                         basepoint)
    return U1, U2


def _figure3_seq(M: int) -> DomainSequence:
    U1, U2 = figure3_domains()
    return DomainSequence(lambda m: U1 if m % 2 else U2, M, "alternating U_1 (odd m), U_2 (even m)",
                          limit_basepoint=1.0)


def _run_figure3(s: Scenario, seq: DomainSequence, rep: RunReport, seed: int = 0, resolution=(0.01, 0.02),
                 tol: Optional[Tolerances] = None, meridians: bool = True):
    tol = tol or s.tolerances
    U1, U2 = figure3_domains()
    r = _timed(rep, "convergence", check_convergence, seq, U1, tol)
    _convergence_criteria(rep, r, "diverges", "PAPER: could not converge")
    rep.values["subsequence_gap"] = r.subsequence_gap
    rep.add("subsequence_kernels_differ", r.subsequence_gap > 0.1, r.subsequence_gap, "> 0.1",
            "PAPER: could not converge")
    if not meridians:
        return
    circle = ClosedCurve(np.exp(2j * np.pi * np.arange(512) / 512))
    for name, U, h in (("U1", U1, resolution[0]), ("U2", U2, resolution[1])):
        f = _timed(rep, f"density_{name}", solve_density, U, h)
        mer = _timed(rep, f"meridian_{name}", find_meridian, U, f, separation_for(U, [0]), seed=seed,
                     with_dist=False)
        dev = uniform_deviation(mer.curve, circle)
        rep.values[f"meridian_deviation_{name}"] = dev
        rep.add(f"equator_{name}", dev <= 1e-2, dev, "<= 1e-2", "PAPER: symmetric under 1/z")
        rep.figures.append(Figure(name, U, [mer.curve]))


register(Scenario("figure3-alternating", "alternation between two domains with the same equator", 20, _figure3_seq,
                  {"verdict": "diverges [PAPER]", "meridians": "unit circle [PAPER]"}, _run_figure3,
                  lambda: figure3_domains()[0]))
