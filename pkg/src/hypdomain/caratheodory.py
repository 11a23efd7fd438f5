"""Caratheodory convergence of sequences of pointed domains.

Kernels are computed from numerical Hausdorff limits of the complements.
Convergence is checked on a finite tail, so every verdict is qualified by
the horizon it was computed at and never asserts an actual limit.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np
from scipy import ndimage
from skimage.measure import find_contours

from .canonical import eval_inverse, in_slit_annulus, solve_canonical_map
from .domain import Domain, enumerate_separations, separation_for
from .exceptions import (
    LabelingInconsistent,
    NoHausdorffLimit,
    PrincipalMeridianAbsent,
)
from .geodesic import find_meridian, uniform_deviation
from .hypmetric import solve_density
from .sphere import (INF, CompactSample, as_point, circle_sample, hausdorff_dist, sph_dist, sph_dist_array,
                     to_sphere)

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# sequences


@dataclass
class DomainSequence:
    """Pointed domains ``(U_m, u_m)`` for ``m`` in ``indices`` (default ``1..horizon``).

    ``generator(m)`` returns a validated :class:`Domain` (whose basepoint
    is ``u_m``) or a ``(Domain, basepoint)`` pair.  ``limit_basepoint`` may
    declare ``lim u_m``; otherwise it is extrapolated from the tail.
    """

    generator: Callable[[int], object]
    horizon: int
    description: str = ""
    limit_basepoint: Optional[complex] = None
    indices: Optional[tuple] = None
    _cache: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if self.indices is None:
            self.indices = tuple(range(1, self.horizon + 1))
        self.indices = tuple(int(m) for m in self.indices if m <= self.horizon)
        if not self.indices:
            raise ValueError("sequence has no terms up to the horizon")

    def __getitem__(self, m: int) -> Domain:
        if m not in self._cache:
            out = self.generator(m)
            if isinstance(out, tuple):
                dom, u = out
                out = dom.with_basepoint(u)
            if not isinstance(out, Domain):
                raise TypeError("generator must return a Domain or a (Domain, basepoint) pair")
            self._cache[m] = out
        return self._cache[m]

    def __len__(self):
        return len(self.indices)

    @property
    def last(self) -> int:
        return self.indices[-1]

    def tail(self, fraction: float = 0.5) -> tuple:
        """Indices ``m >= (1 - fraction) * last``; never fewer than two terms."""
        cut = (1.0 - fraction) * self.last
        t = tuple(m for m in self.indices if m >= cut)
        return t if len(t) >= 2 else self.indices[-2:]

    def basepoint(self, m: int) -> complex:
        return self[m].basepoint

    def subsequence(self, stride: int, offset: int = 0) -> "DomainSequence":
        """Terms with ``m % stride == offset``, sharing the generator cache."""
        idx = tuple(m for m in self.indices if m % stride == offset % stride)
        sub = DomainSequence(self.generator, self.horizon, f"{self.description} [m = {offset} mod {stride}]",
                             self.limit_basepoint, idx)
        sub._cache = self._cache
        return sub

    def even(self) -> "DomainSequence":
        return self.subsequence(2, 0)

    def odd(self) -> "DomainSequence":
        return self.subsequence(2, 1)

    def limit_point(self) -> complex:
        """Declared limit basepoint, or a Richardson estimate assuming ``O(1/m)`` decay."""
        if self.limit_basepoint is not None:
            return complex(self.limit_basepoint)
        M = self.last
        half = min(self.indices, key=lambda m: abs(m - M / 2))
        uM, uh = self.basepoint(M), self.basepoint(half)
        if half == M or uM == uh:
            return uM
        return (M * uM - half * uh) / (M - half)

    def with_basepoints(self, w: Callable[[int], complex], limit: Optional[complex] = None) -> "DomainSequence":
        """Same domains with basepoints ``w(m)``."""
        return DomainSequence(lambda m: self[m].with_basepoint(w(m)), self.horizon,
                              f"{self.description} (shifted basepoints)", limit, self.indices)


@dataclass(frozen=True)
class Singleton:
    """Degenerate pointed domain ``({u}, u)``."""

    point: complex


Candidate = Union[Domain, Singleton]


# ---------------------------------------------------------------------------
# compact sets


def boundary_sample(domain: Domain) -> CompactSample:
    """Finite boundary samples of the complement (infinity only if it is a point component)."""
    pts = thin(np.concatenate([c.sample.points for c in domain.components]), 0.002)
    has_inf = any(c.is_point and c.params["z"] is INF for c in domain.components)
    return CompactSample(pts, "polyline-region", max(c.sample.density for c in domain.components),
                         includes_infinity=has_inf, closed=False)


def thin(points: np.ndarray, cell: float) -> np.ndarray:
    """Keep one point per cube of side ``cell`` in the sphere embedding (order preserved)."""
    if points.size == 0:
        return points
    keys = np.floor(to_sphere(points) / cell).astype(np.int64)
    _, idx = np.unique(keys, axis=0, return_index=True)
    return points[np.sort(idx)]


def filled_sample(domain: Domain, spacing: float = 0.01) -> CompactSample:
    """Sample of the whole complement, interiors included.

    Boundaries keep a fine sample; interiors are filled with concentric
    circles (or a raster for polygons) about ``spacing`` apart.
    """
    parts = []
    has_inf = False
    for c in domain.components:
        k, p = c.kind, c.params
        parts.append(thin(c.sample.points, 0.002))
        has_inf |= c.sample.includes_infinity
        if k == "disc":
            r = p["radius"]
            n = math.ceil(r / spacing)
            for rho in r * np.arange(1, n) / n:
                parts.append(thin(circle_sample(p["center"], rho, spacing).points, spacing))
            parts.append(np.array([p["center"]]))
        elif k == "outer_disc_complement":
            t = np.arange(math.atan(p["radius"]) + spacing, math.pi / 2 - spacing / 2, spacing)
            for rho in np.tan(t):
                parts.append(thin(circle_sample(p["center"], rho, spacing).points, spacing))
            has_inf = True
        elif k == "polyline" and p["closed"]:
            v = c.sample.points
            xs = np.arange(v.real.min(), v.real.max(), spacing)
            ys = np.arange(v.imag.min(), v.imag.max(), spacing)
            g = (xs[None, :] + 1j * ys[:, None]).ravel()
            parts.append(g[c.distance(g) <= 0.0])
    pts = np.concatenate(parts) if parts else np.array([], complex)
    return CompactSample(pts, "polyline-region", spacing, includes_infinity=has_inf, closed=False)


def _sphere_grid(n: int):
    """Cell centres of an ``n x n`` grid on ``|w| < 1`` and their points ``z = w / (1 - |w|)``.

    The chart compresses the whole sphere into the unit disc with roughly
    uniform spherical resolution ``2 / n``.
    """
    ws = -1.0 + (np.arange(n) + 0.5) * (2.0 / n)
    W = ws[None, :] + 1j * ws[:, None]
    inside = np.abs(W) < 1.0
    Z = np.full(W.shape, np.nan + 0j)
    Z[inside] = W[inside] / (1.0 - np.abs(W[inside]))
    return ws, W, Z, inside


def _to_chart(z: complex) -> complex:
    return z / (1.0 + abs(z))


# ---------------------------------------------------------------------------
# kernels


@dataclass
class Kernel:
    """Numerical Caratheodory kernel at a finite horizon.

    ``boundary`` samples the kernel boundary (points of the limit
    complement nearest to the flood-filled region), ``connectivity`` is the
    number of complement components seen on the grid (0 for a singleton)
    and ``lemma_gap`` is the largest spherical distance from the region's
    edge to the limit complement.
    """

    basepoint: complex
    singleton: bool
    horizon: int
    limit_complement: CompactSample = field(repr=False)
    cauchy_gaps: tuple
    boundary: Optional[CompactSample] = field(default=None, repr=False)
    connectivity: int = 0
    lemma_gap: float = 0.0
    tau: float = 0.015
    region: Optional[np.ndarray] = field(default=None, repr=False)

    def contains(self, z) -> np.ndarray:
        """Whether finite points lie in the flood-filled region (always false for a singleton)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if self.singleton:
            return np.zeros(z.shape, dtype=bool)
        n = self.region.shape[0]
        w = z / (1.0 + np.abs(z))
        j = np.clip(((w.real + 1.0) * n / 2).astype(int), 0, n - 1)
        i = np.clip(((w.imag + 1.0) * n / 2).astype(int), 0, n - 1)
        return self.region[i, j]


def hausdorff_kernel(seq: DomainSequence, tol: float = 0.02, tau: float = 0.015, grid: int = 500,
                     cauchy_terms: int = 3, spacing: float = 0.01) -> Kernel:
    """Kernel of ``seq`` at its horizon via the Hausdorff limit of the complements.

    The last ``cauchy_terms`` complements must be within ``tol`` of each
    other (else :class:`NoHausdorffLimit`).  The complement at the horizon
    stands in for the limit ``K``.  If the limit basepoint is within ``tau``
    of ``K`` the kernel is the singleton; otherwise it is the grid component
    of ``{d#(z, K) > tau}`` containing the basepoint.
    """
    idx = seq.indices[-cauchy_terms:]
    samples = [filled_sample(seq[m], spacing) for m in idx]
    gaps = tuple(hausdorff_dist(a, b) for a, b in zip(samples, samples[1:]))
    if gaps and max(gaps) > tol:
        raise NoHausdorffLimit(f"complements at m={idx} are {max(gaps):.3g} apart (> {tol})")
    dom = seq[idx[-1]]
    K = samples[-1]
    u = seq.limit_point()
    if not dom.contains(np.array([u]))[0] or float(K.distance_to(u)[0]) <= tau:
        return Kernel(complex(u), True, seq.last, K, gaps, tau=tau)

    ws, W, Z, inside = _sphere_grid(grid)
    ok = np.zeros(W.shape, dtype=bool)
    zi = Z[inside]
    bsample = boundary_sample(dom)
    good = dom.contains(zi) & (K.distance_to(zi) > tau)
    ok[inside] = good
    labels, _ = ndimage.label(ok)
    wu = _to_chart(u)
    iu = int(np.clip((wu.imag + 1.0) * grid / 2, 0, grid - 1))
    ju = int(np.clip((wu.real + 1.0) * grid / 2, 0, grid - 1))
    lab = labels[iu, ju]
    if lab == 0:
        r = 3
        win = labels[max(iu - r, 0):iu + r + 1, max(ju - r, 0):ju + r + 1]
        cand = np.argwhere(win > 0)
        if cand.size == 0:
            return Kernel(complex(u), True, seq.last, K, gaps, tau=tau)
        c = cand[np.argmin(np.sum((cand - r) ** 2, axis=1))]
        lab = win[c[0], c[1]]
    region = labels == lab

    _, ncomp = ndimage.label(~region, structure=np.ones((3, 3)))
    contours = find_contours(np.pad(region.astype(float), 1), 0.5)
    step = 2.0 / grid
    edge = np.concatenate([(c[:, 1] - 0.5) * step - 1.0 + 1j * ((c[:, 0] - 0.5) * step - 1.0) for c in contours])
    edge = edge[np.abs(edge) < 1.0]
    ez = edge / (1.0 - np.abs(edge))
    lemma_gap = float(np.max(K.distance_to(ez))) if ez.size else 0.0
    _, nearest = bsample.tree.query(to_sphere(ez))
    finite = nearest < bsample.points.size
    bpts = np.unique(bsample.points[nearest[finite]])
    boundary = CompactSample(bpts, "polyline-region", bsample.density,
                             includes_infinity=bool(np.any(~finite)), closed=False)
    return Kernel(complex(u), False, seq.last, K, gaps, boundary, int(ncomp), lemma_gap, tau, region)


def kernel_distance(a: Union[Kernel, Candidate], b: Union[Kernel, Candidate]) -> float:
    """Spherical distance between two kernels or candidates.

    Singletons compare by their points, a singleton and a domain are
    infinitely far apart, and two domains compare by the Hausdorff
    distance of their boundaries.
    """
    pa, pb = _as_compared(a), _as_compared(b)
    if isinstance(pa, complex) and isinstance(pb, complex):
        return sph_dist(pa, pb)
    if isinstance(pa, complex) or isinstance(pb, complex):
        return math.inf
    return hausdorff_dist(pa, pb)


def _as_compared(k):
    if isinstance(k, Kernel):
        return complex(k.basepoint) if k.singleton else k.boundary
    if isinstance(k, Singleton):
        return complex(k.point)
    return boundary_sample(k)


# ---------------------------------------------------------------------------
# convergence conditions


@dataclass(frozen=True)
class Tolerances:
    """Tolerances of the finite-horizon convergence check."""

    hausdorff: float = 0.02
    tau: float = 0.015
    basepoint: float = 0.02
    kernel: float = 0.02
    eps: tuple = (0.2, 0.1, 0.05)
    degenerate_eps: tuple = (0.2, 0.1, 0.05, 0.02, 0.01)
    tail_fraction: float = 0.5
    min_run: int = 3
    grid: int = 500
    exhaustion_grid: int = 200


@dataclass
class Condition:
    """Outcome of one convergence condition: ``status`` is ``pass``, ``fail`` or ``n/a``."""

    name: str
    status: str
    witnesses: dict = field(default_factory=dict)
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"


@dataclass
class ConvergenceReport:
    """Verdict of :func:`check_convergence` with the evidence behind it."""

    verdict: str
    kernel: Optional[Kernel]
    candidate: Candidate
    condition_i: Condition
    condition_ii: Condition
    condition_iii: Condition
    horizon: int
    tolerances: Tolerances
    subsequence_kernels: Dict[str, Optional[Kernel]] = field(default_factory=dict, repr=False)
    subsequence_gap: float = float("nan")
    degenerate_witness: List[tuple] = field(default_factory=list)
    description: str = ""

    @property
    def wording(self) -> str:
        M = self.horizon
        if self.verdict == "converges":
            return f"consistent with convergence to the candidate up to m={M}"
        if self.verdict == "degenerate":
            return f"consistent with convergence to the degenerate limit {{u}} up to m={M}"
        if self.verdict == "diverges":
            return f"subsequence kernels differ up to m={M}: inconsistent with convergence"
        return f"inconclusive up to m={M}"

    def summary(self) -> str:
        t = self.tolerances
        lines = [
            f"sequence: {self.description}",
            f"verdict: {self.verdict} ({self.wording})",
            f"tolerances: hausdorff={t.hausdorff} tau={t.tau} basepoint={t.basepoint} kernel={t.kernel}",
        ]
        for c in (self.condition_i, self.condition_ii, self.condition_iii):
            wit = ", ".join(f"{k}={_fmt(v)}" for k, v in sorted(c.witnesses.items()))
            lines.append(f"condition {c.name}: {c.status}" + (f" [{wit}]" if wit else "")
                         + (f" {c.note}" if c.note else ""))
        if self.kernel is not None:
            k = self.kernel
            kind = "singleton" if k.singleton else f"domain, connectivity {k.connectivity}"
            lines.append(f"kernel: {kind}, basepoint {_fmt(k.basepoint)}")
        if self.degenerate_witness:
            lines.append("shrinking neighbourhoods: " + ", ".join(f"eps={e} from m={m}" for e, m in self.degenerate_witness))
        return "\n".join(lines)


def _fmt(v) -> str:
    if isinstance(v, complex):
        return f"{v.real:.6g}{v.imag:+.6g}j"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _first_run(flags: Sequence[bool], idx: Sequence[int]) -> Optional[int]:
    """First index from which every flag is true."""
    start = None
    for m, f in zip(idx, flags):
        if f and start is None:
            start = m
        elif not f:
            start = None
    return start


def _condition_i(seq: DomainSequence, u: complex, tol: Tolerances) -> Condition:
    tail = seq.tail(tol.tail_fraction)
    d = [sph_dist(seq.basepoint(m), u) for m in tail]
    ok = d[-1] <= tol.basepoint and max(d) <= d[0] + 1e-12
    return Condition("i", "pass" if ok else "fail",
                     {"first_tail_dist": d[0], "final_dist": d[-1], "tail_start": tail[0]},
                     "" if ok else "basepoints do not approach the candidate basepoint")


def exhaustion_points(domain: Domain, eps: float, grid: int = 200) -> np.ndarray:
    """Grid sample of ``{z in U : d#(z, complement) >= eps}``."""
    _, _, Z, inside = _sphere_grid(grid)
    z = Z[inside]
    keep = domain.contains(z) & (boundary_sample(domain).distance_to(z) >= eps)
    return z[keep]


def _condition_ii(seq: DomainSequence, cand: Domain, tol: Tolerances) -> Condition:
    tail = seq.tail(tol.tail_fraction)
    need = min(tol.min_run, len(tail))
    wit, ok = {}, True
    for eps in tol.eps:
        pts = exhaustion_points(cand, eps, tol.exhaustion_grid)
        if pts.size == 0:
            wit[f"M({eps})"] = "empty"
            continue
        flags = [bool(np.all(seq[m].contains(pts))) for m in tail]
        start = _first_run(flags, tail)
        run = 0 if start is None else sum(1 for m in tail if m >= start)
        wit[f"M({eps})"] = "none" if start is None else start
        if run < need:
            ok = False
            bad = pts[~seq[tail[-1]].contains(pts)]
            if bad.size:
                wit[f"outside({eps})"] = complex(bad[0])
    return Condition("ii", "pass" if ok else "fail", wit,
                     "" if ok else "a compact subset of the candidate is not eventually contained")


def degenerate_witness(seq: DomainSequence, u: complex, tol: Tolerances) -> List[tuple]:
    """``(eps, M(eps))`` such that the ``eps``-disc about ``u`` meets the complement for ``m >= M(eps)``.

    ``M(eps)`` is ``None`` when no such tail run of length ``min_run`` exists.
    """
    tail = seq.tail(tol.tail_fraction)
    need = min(tol.min_run, len(tail))
    d = []
    for m in tail:
        U = seq[m]
        d.append(0.0 if not U.contains(np.array([u]))[0] else float(boundary_sample(U).distance_to(u)[0]))
    out = []
    for eps in tol.degenerate_eps:
        start = _first_run([x < eps for x in d], tail)
        if start is not None and sum(1 for m in tail if m >= start) < need:
            start = None
        out.append((eps, start))
    return out


def _try_kernel(seq: DomainSequence, tol: Tolerances):
    try:
        return hausdorff_kernel(seq, tol.hausdorff, tol.tau, tol.grid), ""
    except NoHausdorffLimit as exc:
        return None, str(exc)


def check_convergence(seq: DomainSequence, candidate: Union[Candidate, complex],
                      tol: Optional[Tolerances] = None) -> ConvergenceReport:
    """Check conditions i)-iii) for ``seq`` against ``candidate`` up to the horizon.

    Condition iii) is tested through kernels: the kernel of the whole
    sequence and those of its even and odd subsequences must all agree
    with the candidate.  The verdict is ``diverges`` when the two
    subsequence kernels differ, ``degenerate`` for a confirmed singleton
    candidate, ``converges`` when all three conditions pass and
    ``inconclusive`` otherwise.
    """
    tol = tol or Tolerances()
    if not isinstance(candidate, (Domain, Singleton)):
        candidate = Singleton(complex(as_point(candidate)))
    u = candidate.point if isinstance(candidate, Singleton) else candidate.basepoint
    seq = seq if seq.limit_basepoint is not None else replace(seq, limit_basepoint=u)

    ci = _condition_i(seq, u, tol)
    full, full_err = _try_kernel(seq, tol)
    subs = {"even": None, "odd": None}
    errs = {}
    for name, sub in (("even", seq.even()), ("odd", seq.odd())):
        if len(sub) >= 2:
            subs[name], errs[name] = _try_kernel(sub, tol)
    sub_gap = float("nan")
    if subs["even"] is not None and subs["odd"] is not None:
        sub_gap = kernel_distance(subs["even"], subs["odd"])

    witness = []
    wit3 = {"subsequence_gap": sub_gap}
    if full is not None:
        wit3["kernel_gap"] = kernel_distance(full, candidate)
    else:
        wit3["full_sequence"] = full_err
    for name, k in subs.items():
        if k is not None and full is not None:
            wit3[f"{name}_gap"] = kernel_distance(k, full)
    agree = (full is not None and wit3["kernel_gap"] <= tol.kernel
             and all(k is not None and wit3[f"{n}_gap"] <= tol.kernel for n, k in subs.items()))

    if isinstance(candidate, Singleton):
        cii = Condition("ii", "n/a", note="no interior to exhaust for a singleton candidate")
        witness = degenerate_witness(seq, u, tol)
        shrink = all(m is not None for _, m in witness)
        c3 = agree and shrink
        ciii = Condition("iii", "pass" if c3 else "fail", wit3,
                         "" if c3 else "kernels or shrinking neighbourhoods disagree with {u}")
    else:
        cii = _condition_ii(seq, candidate, tol)
        ciii = Condition("iii", "pass" if agree else "fail", wit3,
                         "" if agree else "kernels of the sequence and its subsequences disagree with the candidate")

    if sub_gap == sub_gap and sub_gap > tol.kernel:
        verdict = "diverges"
    elif isinstance(candidate, Singleton):
        verdict = "degenerate" if ci.passed and ciii.passed else "inconclusive"
    else:
        verdict = "converges" if ci.passed and cii.passed and ciii.passed else "inconclusive"
    return ConvergenceReport(verdict, full, candidate, ci, cii, ciii, seq.last, tol, subs, sub_gap,
                             witness, seq.description)


def basepoint_shift_check(seq: DomainSequence, candidate: Domain, w: Callable[[int], complex], w_limit: complex,
                          tol: Optional[Tolerances] = None):
    """Re-run :func:`check_convergence` with basepoints ``w(m) -> w_limit``.

    Returns ``(original, shifted)`` reports.  When the original converges,
    the shifted one should too at the same horizon.
    """
    before = check_convergence(seq, candidate, tol)
    shifted = seq.with_basepoints(w, w_limit)
    after = check_convergence(shifted, candidate.with_basepoint(w_limit), tol)
    return before, after


def subsequence_gaps(seq: DomainSequence, kernel: Kernel, strides=(2, 3), tol: Optional[Tolerances] = None) -> dict:
    """Kernel distance between ``kernel`` and the kernels of arithmetic subsequences."""
    tol = tol or Tolerances()
    out = {}
    for s in strides:
        for off in range(s):
            sub = seq.subsequence(s, off)
            if len(sub) < 2:
                continue
            k, _ = _try_kernel(sub, tol)
            out[(s, off)] = math.inf if k is None else kernel_distance(k, kernel)
    return out


def connectivity_holds(kernel: Kernel, seq: DomainSequence, fraction: float = 0.5) -> bool:
    """Kernel connectivity does not exceed the smallest connectivity over the tail."""
    return kernel.connectivity <= min(seq[m].n for m in seq.tail(fraction))


# ---------------------------------------------------------------------------
# theorem suites


def _resolution(resolution, m):
    return resolution(m) if callable(resolution) else resolution


@dataclass
class SuiteTable:
    """Per-``m`` rows of a suite plus named pass/fail checks."""

    name: str
    columns: tuple
    rows: List[tuple]
    checks: Dict[str, bool] = field(default_factory=dict)
    reference: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def column(self, name: str) -> np.ndarray:
        return np.array([r[self.columns.index(name)] for r in self.rows])


def _decreasing(v, strict: bool = False) -> bool:
    v = np.asarray(v, dtype=float)
    d = np.diff(v)
    return bool(np.all(d < 0) if strict else np.all(d <= 1e-12 * np.maximum(1.0, np.abs(v[:-1]))))


def geodesic_convergence_suite(seq: DomainSequence, limit: Domain, e_side, ms: Optional[Sequence[int]] = None,
                               resolution=0.01, seed: int = 0, tol_deviation: float = 0.02,
                               tol_length: float = 0.02, reference_length: Optional[float] = None) -> SuiteTable:
    """Meridians of ``U_m`` against the limit meridian of the class ``e_side``.

    Columns: ``m``, ``length``, ``dist`` (from ``u_m``), ``deviation``
    (uniform curve distance to the limit meridian), ``length_error``
    (relative) and ``seconds``.  Checks: deviation and length error
    non-increasing over ``ms`` and final values below their tolerances.
    """
    ms = tuple(ms or seq.tail())
    f_lim = solve_density(limit, _resolution(resolution, seq.last))
    ref = find_meridian(limit, f_lim, separation_for(limit, e_side), seed=seed)
    ell = reference_length if reference_length is not None else ref.length
    rows = []
    for m in ms:
        t0 = time.perf_counter()
        U = seq[m]
        f = solve_density(U, _resolution(resolution, m))
        mer = find_meridian(U, f, separation_for(U, e_side), seed=seed)
        dev = uniform_deviation(mer.curve, ref.curve)
        rows.append((m, mer.length, mer.dist, dev, abs(mer.length - ell) / ell, time.perf_counter() - t0))
    t = SuiteTable("geodesic", ("m", "length", "dist", "deviation", "length_error", "seconds"), rows,
                   reference={"length": ell, "numerical_length": ref.length, "dist": ref.dist})
    dev, err = t.column("deviation"), t.column("length_error")
    t.checks = {
        "deviation_decreasing": _decreasing(dev),
        "length_error_decreasing": _decreasing(err),
        "final_deviation": bool(dev[-1] < tol_deviation),
        "final_length_error": bool(err[-1] < tol_length),
    }
    return t


def meridian_trend(seq: DomainSequence, e_side, ms: Sequence[int], resolution=0.01, seed: int = 0,
                   with_dist: bool = False) -> SuiteTable:
    """Lengths of the meridian of class ``e_side`` along ``ms`` with monotonicity checks."""
    rows = []
    for m in ms:
        t0 = time.perf_counter()
        U = seq[m]
        f = solve_density(U, _resolution(resolution, m))
        mer = find_meridian(U, f, separation_for(U, e_side), seed=seed, with_dist=with_dist)
        rows.append((m, mer.length, mer.dist, time.perf_counter() - t0))
    t = SuiteTable("meridian-trend", ("m", "length", "dist", "seconds"), rows)
    ell = t.column("length")
    t.checks = {"strictly_decreasing": bool(np.all(np.diff(ell) < 0)),
                "strictly_increasing": bool(np.all(np.diff(ell) > 0))}
    return t


def meridian_bounds_suite(seq: DomainSequence, ms: Optional[Sequence[int]] = None, resolution=0.01,
                          seed: int = 0, stability: float = 0.2, floor: Optional[float] = None,
                          classes: Optional[Sequence] = None) -> SuiteTable:
    """Lengths and basepoint distances of the meridians over ``ms`` for every class.

    Each class is identified by its ``e_side`` (component indices are
    assumed to correspond across ``m``).  A class passes when its lengths
    over ``ms`` stay within ``1 -/+ stability`` of the first value and above
    ``floor`` (if given).  ``reference`` maps each class to its minimum and
    maximum length and maximum distance.
    """
    ms = tuple(ms or seq.tail())
    rows = []
    for m in ms:
        U = seq[m]
        f = solve_density(U, _resolution(resolution, m))
        seps = enumerate_separations(U) if classes is None else [separation_for(U, c) for c in classes]
        for s in seps:
            try:
                mer = find_meridian(U, f, s, seed=seed)
            except PrincipalMeridianAbsent:
                rows.append((m, str(s), 0.0, math.inf))
                continue
            rows.append((m, str(s), mer.length, mer.dist))
    t = SuiteTable("meridian-bounds", ("m", "class", "length", "dist"), rows)
    for cls in dict.fromkeys(r[1] for r in rows):
        ell = np.array([r[2] for r in rows if r[1] == cls])
        dist = np.array([r[3] for r in rows if r[1] == cls])
        t.reference[cls] = {"min_length": float(ell.min()), "max_length": float(ell.max()),
                            "max_dist": float(dist.max())}
        lower = bool(ell.min() >= (1 - stability) * ell[0] and ell.min() > 0 and (floor is None or ell.min() >= floor))
        upper = bool(np.all(np.isfinite(dist)) and ell.max() <= (1 + stability) * ell[0])
        t.checks[f"{cls} lower"] = lower
        t.checks[f"{cls} upper"] = upper
    return t


def annulus_probes(cm, n_radii: int = 5, n_angles: int = 24, margin: float = 0.15) -> np.ndarray:
    """Compact sample of the slit annulus of ``cm`` kept ``margin`` (in log-radius) from its boundary."""
    lam = cm.Lambda
    rr = np.exp(np.linspace(margin, lam.lambdas[0] - margin, n_radii))
    th = 2 * np.pi * np.arange(n_angles) / n_angles
    w = (rr[:, None] * np.exp(1j * th[None, :])).ravel()
    keep = np.ones(w.shape, dtype=bool)
    for j, lj in enumerate(lam.lambdas[1:]):
        t0, t1 = lam.thetas[2 * j], lam.thetas[2 * j + 1]
        near_r = np.abs(np.log(np.abs(w)) - lj) < margin
        rel = np.mod(np.angle(w) - t0 + margin, 2 * np.pi)
        near_t = rel <= np.mod(t1 - t0, 2 * np.pi) + 2 * margin
        keep &= ~(near_r & near_t)
    return w[keep]


def canonical_convergence_suite(seq: DomainSequence, limit: Domain, labeling: Optional[dict] = None,
                                ms: Optional[Sequence[int]] = None, truncation: int = 16,
                                tol_lambda: float = 1e-2, tol_inverse: float = 0.05) -> SuiteTable:
    """Slit-annulus parameters and inverse maps of ``U_m`` against those of the limit.

    Columns: ``m``, ``lambda_gap`` (sup norm of ``Lambda_m - Lambda``),
    ``inverse_gap`` (largest spherical distance between ``psi_m(w)`` and
    ``psi(w)`` over a compact sample of the limit slit annulus),
    ``probes`` and ``residual``.
    """
    ms = tuple(ms or seq.tail())
    ref = solve_canonical_map(limit, labeling, truncation)
    probes = annulus_probes(ref)
    z_ref = eval_inverse(ref, probes)
    rows = []
    for m in ms:
        U = seq[m]
        if U.n != limit.n:
            raise LabelingInconsistent(f"U_{m} is {U.n}-connected but the limit is {limit.n}-connected")
        for key, j in (labeling or {}).items():
            if not 0 <= j < U.n or U.components[j].kind != limit.components[j].kind:
                raise LabelingInconsistent(f"label {key}={j} does not match the same kind of component in U_{m}")
        cm = solve_canonical_map(U, labeling, truncation)
        inside = in_slit_annulus(cm, probes)
        gap = float(np.max(sph_dist_array(eval_inverse(cm, probes[inside]), z_ref[inside]))) if inside.any() else math.inf
        rows.append((m, cm.Lambda.distance(ref.Lambda), gap, int(inside.sum()), cm.residual))
    t = SuiteTable("canonical", ("m", "lambda_gap", "inverse_gap", "probes", "residual"), rows,
                   reference={"Lambda": ref.Lambda.as_array().tolist()})
    lg, ig = t.column("lambda_gap"), t.column("inverse_gap")
    t.checks = {"final_lambda_gap": bool(lg[-1] < tol_lambda), "final_inverse_gap": bool(ig[-1] < tol_inverse),
                "lambda_gap_trend": bool(lg[-1] <= lg[0] + 1e-12), "inverse_gap_trend": bool(ig[-1] <= ig[0] + 1e-12)}
    return t
