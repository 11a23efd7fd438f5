"""Shortest separating geodesics (meridians) of multiply connected domains.

Curves are closed polylines.  Shortening is a preconditioned descent on the
discrete hyperbolic length in which every accepted step is short compared
with the clearance to the complement, so a curve can never jump over a
complement component and keeps its separation class.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy import ndimage
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra
from skimage.measure import find_contours
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .domain import (
    ClosedCurve,
    Domain,
    Separation,
    curve_self_intersects,
    enumerate_separations,
    expected_signature,
    principal_count,
    winding_signature,
)
from .exceptions import (
    ClearanceLost,
    CurveTouchesComplement,
    NoSeparatingCurveFound,
    PrincipalMeridianAbsent,
    SelfIntersectionDetected,
)
from .hypmetric import MetricField, hyp_dist_point_to_set, hyp_length, solve_density

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-3
TIE_TOL = 0.005


# ---------------------------------------------------------------------------
# discrete length and its gradient


def _edges(z):
    e = np.roll(z, -1) - z
    s = np.abs(e)
    return e, s


def closed_length(field: MetricField, z: np.ndarray) -> float:
    """Trapezoid hyperbolic length of the closed polygon with vertices ``z``."""
    lam = field.density(z)
    _, s = _edges(z)
    return float(np.sum(0.5 * (lam + np.roll(lam, -1)) * s))


def length_gradient(field: MetricField, z: np.ndarray):
    """Length, and its gradient with respect to each vertex as ``d/dx + i d/dy``."""
    lam = field.density(z)
    du = field.grad_log_density(z)
    e, s = _edges(z)
    s_safe = np.where(s > 0, s, 1e-300)
    unit = e / s_safe
    avg = 0.5 * (lam + np.roll(lam, -1))
    L = float(np.sum(avg * s))
    grad = 0.5 * lam * du * (s + np.roll(s, 1)) - avg * unit + np.roll(avg * unit, 1)
    return L, grad, lam, du


def turning_angles(z: np.ndarray) -> np.ndarray:
    """Signed exterior angle at each vertex (left turns positive)."""
    e, _ = _edges(z)
    return np.angle(e / np.roll(e, 1))


def geodesic_residual(field: MetricField, z: np.ndarray) -> np.ndarray:
    """Per-vertex defect ``theta_i - d_n u * s_i`` of the discrete geodesic equation.

    ``theta_i`` is the turning angle, ``n`` the left unit normal and
    ``s_i`` the mean length of the two edges at the vertex.  A smooth
    hyperbolic geodesic has Euclidean curvature ``d_n u``.
    """
    e, s = _edges(z)
    tang = np.roll(z, -1) - np.roll(z, 1)
    nrm = 1j * tang / np.abs(tang)
    du = field.grad_log_density(z)
    dn = np.real(du * np.conj(nrm))
    return turning_angles(z) - dn * 0.5 * (s + np.roll(s, 1))


def _sobolev(v: np.ndarray) -> np.ndarray:
    """Apply ``(I - beta D2)^-1`` on the cycle with ``beta = (N / 2 pi)^2``."""
    n = v.size
    k = np.arange(n)
    eig = 4 * np.sin(np.pi * k / n) ** 2
    beta = (n / (2 * np.pi)) ** 2
    return np.real(np.fft.ifft(np.fft.fft(v) / (1 + beta * eig)))


def remesh(field: MetricField, z: np.ndarray, n: Optional[int] = None) -> np.ndarray:
    """Resample a closed polygon to ``n`` vertices equally spaced in hyperbolic arclength."""
    n = z.size if n is None else n
    lam = field.density(z)
    _, s = _edges(z)
    w = 0.5 * (lam + np.roll(lam, -1)) * s
    cum = np.concatenate([[0.0], np.cumsum(w)])
    ring = np.append(z, z[0])
    t = cum[-1] * np.arange(n) / n
    return np.interp(t, cum, ring.real) + 1j * np.interp(t, cum, ring.imag)


@dataclass
class ShorteningInfo:
    """Diagnostics from :func:`shorten_in_class`."""

    initial_length: float
    final_length: float
    residual: float
    iterations: int
    accepted: int
    converged: bool
    history: List[float] = field(default_factory=list)


def shorten_in_class(field: MetricField, start: ClosedCurve, tol: float = RESIDUAL_TOL,
                     max_iter: int = 3000, remesh_every: int = 10, n_vertices: Optional[int] = None,
                     return_info: bool = False):
    """Shorten a simple closed curve without leaving its separation class.

    Each step moves vertices along their normals by a Sobolev-smoothed
    gradient of the discrete length.  A step is accepted only if the
    length does not increase, the curve stays simple and it keeps positive
    clearance; the step moves no vertex by more than a quarter of its
    clearance or of the shortest edge.
    """
    dom = field.domain
    z = np.asarray(start.points, dtype=complex).copy()
    if n_vertices is not None and n_vertices != z.size:
        z = ClosedCurve(z).resampled(n_vertices).points
    if z.size < 4:
        raise ValueError("need at least four vertices")
    clearance = dom.distance(z)
    if np.min(clearance) <= 0:
        raise CurveTouchesComplement("start curve meets the complement")
    if curve_self_intersects(z):
        raise SelfIntersectionDetected("start curve is not simple")
    sig0 = winding_signature(ClosedCurve(z), dom)
    min_clear = min(field.h, 0.5 * float(np.min(clearance)))

    L, grad, lam, du = length_gradient(field, z)
    L0 = L
    history = [L]
    dt = math.inf
    accepted = 0
    residual = math.inf
    it = 0
    fails = {"length": 0, "simple": 0, "clearance": 0}
    converged = False
    last_remesh = 0
    for it in range(1, max_iter + 1):
        if accepted - last_remesh >= remesh_every:
            last_remesh = accepted
            zr = remesh(field, z)
            Lr = closed_length(field, zr)
            if Lr <= L and not curve_self_intersects(zr) and np.min(dom.distance(zr)) > min_clear:
                z = zr
                L, grad, lam, du = length_gradient(field, z)
        psi = geodesic_residual(field, z)
        residual = float(np.max(np.abs(psi)))
        if residual <= tol:
            converged = True
            break
        tang = np.roll(z, -1) - np.roll(z, 1)
        nrm = 1j * tang / np.abs(tang)
        gn = np.real(grad * np.conj(nrm))
        _, s = _edges(z)
        mass = lam * 0.5 * (s + np.roll(s, 1))
        d = -_sobolev(gn / mass)
        if np.dot(d, gn) >= 0:
            d = -gn / mass
        dmax = float(np.max(np.abs(d)))
        if dmax == 0:
            converged = True
            break
        clear = dom.distance(z)
        cap = min(float(np.min(0.25 * clear / np.maximum(np.abs(d), 1e-300))), 0.25 * float(np.min(s)) / dmax)
        alpha = min(dt, cap)
        zn = z + alpha * d * nrm
        reason = None
        if np.min(dom.distance(zn)) <= min_clear:
            reason = "clearance"
        elif curve_self_intersects(zn):
            reason = "simple"
        else:
            Ln, gradn, lamn, dun = length_gradient(field, zn)
            if not (Ln <= L):
                reason = "length"
        if reason is None:
            z, L, grad, lam, du = zn, Ln, gradn, lamn, dun
            history.append(L)
            accepted += 1
            dt = alpha * 1.2
            fails = dict.fromkeys(fails, 0)
        else:
            fails[reason] += 1
            dt = alpha * 0.5
            if alpha < 1e-14 * max(1.0, float(np.max(np.abs(z)))):
                if fails["simple"] > fails["length"] and fails["simple"] > fails["clearance"]:
                    raise SelfIntersectionDetected("descent cannot proceed without self-intersection")
                if fails["clearance"] > fails["length"]:
                    raise ClearanceLost("descent cannot proceed without losing clearance")
                break
    sig1 = winding_signature(ClosedCurve(z), dom)
    if not np.array_equal(sig0, sig1):
        raise SelfIntersectionDetected(f"signature changed from {sig0.tolist()} to {sig1.tolist()}")
    if not converged:
        log.info("shortening stopped at residual %.2e after %d iterations", residual, it)
    out = ClosedCurve(z)
    if return_info:
        return out, ShorteningInfo(L0, L, residual, it, accepted, converged, history)
    return out


# ---------------------------------------------------------------------------
# initial curves


def _side_distances(domain: Domain, Z: np.ndarray, sep: Separation):
    D = domain.component_distances(Z.ravel())
    e = sorted(sep.e_side)
    f = sorted(sep.f_side)
    return D[e].min(axis=0).reshape(Z.shape), D[f].min(axis=0).reshape(Z.shape)


def _node_of(field: MetricField, z: complex):
    i = int(round((z.real - field.xs[0]) / field.h))
    j = int(round((z.imag - field.ys[0]) / field.h))
    return min(max(i, 0), field.xs.size - 1), min(max(j, 0), field.ys.size - 1)


def _grid_path(cost: np.ndarray, sources: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Cheapest 8-connected path between two node sets; returns flat node indices."""
    shape = cost.shape
    n = cost.size
    ok = np.isfinite(cost.ravel())
    I, J = np.unravel_index(np.arange(n), shape)
    rows, cols, wts = [], [], []
    for di, dj in ((1, 0), (0, 1), (1, 1), (1, -1)):
        m = ok & (I + di < shape[0]) & (J + dj >= 0) & (J + dj < shape[1])
        a = np.flatnonzero(m)
        b = (I[a] + di) * shape[1] + (J[a] + dj)
        good = ok[b]
        a, b = a[good], b[good]
        rows.append(a)
        cols.append(b)
        wts.append(0.5 * (cost.ravel()[a] + cost.ravel()[b]) * math.hypot(di, dj))
    # a virtual node joined to every source at negligible cost
    rows.append(np.full(sources.size, n))
    cols.append(sources)
    wts.append(np.full(sources.size, 1e-12))
    G = csr_matrix((np.concatenate(wts), (np.concatenate(rows), np.concatenate(cols))), shape=(n + 1, n + 1))
    dist, pred = dijkstra(G, directed=False, indices=n, return_predecessors=True)
    tgt = targets[np.isfinite(dist[targets])]
    if tgt.size == 0:
        return np.zeros(0, dtype=int)
    k = int(tgt[np.argmin(dist[tgt])])
    path = []
    while k != n and k >= 0:
        path.append(k)
        k = pred[k]
    return np.array(path[::-1], dtype=int)


def _separating_mask(field: MetricField, sep: Separation, t: float) -> np.ndarray:
    """Grid region around the E side whose boundary separates E from F."""
    dom = field.domain
    Z = field.nodes()
    dE, dF = _side_distances(dom, Z, sep)
    mask = (dE < t * dF) & (dF > 0)
    e_nodes = dE <= 0
    f_nodes = dF <= 0
    witnesses_e = [_node_of(field, complex(dom.components[i].witness)) for i in sorted(sep.e_side)]
    witnesses_f = [_node_of(field, complex(dom.components[i].witness))
                   for i in sorted(sep.f_side) if i < dom.n - 1]
    for ij in witnesses_e:
        mask[ij] = True
    # bridges may cross E freely and follow cheap hyperbolic routes, but keep clear of F
    node_lam = field.density(Z.ravel()).reshape(Z.shape)
    free = (dF > 2 * field.h) & np.isfinite(node_lam)
    cost = np.where(e_nodes, 1e-3, np.where(free, node_lam * field.h, np.inf))
    for _ in range(len(sep.e_side) + 1):
        lab, nlab = ndimage.label(mask)
        e_labels = sorted({int(lab[ij]) for ij in witnesses_e})
        if len(e_labels) <= 1:
            break
        src = np.flatnonzero((lab == e_labels[0]).ravel())
        dst = np.flatnonzero(np.isin(lab, e_labels[1:]).ravel())
        path = _grid_path(cost, src, dst)
        if path.size == 0:
            raise NoSeparatingCurveFound("cannot connect the components of the E side")
        tube = np.zeros(mask.shape, dtype=bool)
        tube.ravel()[path] = True
        mask |= ndimage.binary_dilation(tube, iterations=2) & ~f_nodes & (dF > 2 * field.h)
        mask |= tube
    lab, _ = ndimage.label(mask)
    keep = {int(lab[ij]) for ij in witnesses_e}
    mask = np.isin(lab, list(keep)) & (lab > 0)
    # holes: fill those holding no F component, cut a channel out of the others
    for _ in range(len(sep.f_side) + 2):
        outside, nout = ndimage.label(~mask)
        border = set(np.unique(np.concatenate([outside[0], outside[-1], outside[:, 0], outside[:, -1]]))) - {0}
        holes = [k for k in range(1, nout + 1) if k not in border]
        if not holes:
            break
        f_holes = {int(outside[ij]) for ij in witnesses_f} & set(holes)
        for k in holes:
            if k not in f_holes:
                mask |= outside == k
        for k in sorted(f_holes):
            src = np.flatnonzero((outside == k).ravel())
            dst = np.flatnonzero(np.isin(outside, list(border)).ravel())
            ccost = np.where(mask & ~e_nodes & (dE > 2 * field.h), 1.0, np.inf)
            ccost.ravel()[src] = 1.0
            ccost.ravel()[dst] = 1.0
            path = _grid_path(ccost, src, dst)
            if path.size == 0:
                raise NoSeparatingCurveFound("cannot open a channel around an F component")
            tube = np.zeros(mask.shape, dtype=bool)
            tube.ravel()[path] = True
            mask &= ~ndimage.binary_dilation(tube, iterations=1)
        lab, _ = ndimage.label(mask)
        keep = {int(lab[ij]) for ij in witnesses_e}
        mask = np.isin(lab, list(keep)) & (lab > 0)
    return mask


def _mask_contour(field: MetricField, mask: np.ndarray) -> Optional[np.ndarray]:
    padded = np.pad(mask.astype(float), 1)
    contours = [c for c in find_contours(padded, 0.5) if np.allclose(c[0], c[-1])]
    if not contours:
        return None
    c = max(contours, key=len) - 1.0
    z = field.xs[0] + c[:, 0] * field.h + 1j * (field.ys[0] + c[:, 1] * field.h)
    return z[:-1]


def _vertex_count(field: MetricField, z: np.ndarray, n_vertices: Optional[int]) -> int:
    if n_vertices is not None:
        return int(n_vertices)
    per = float(np.sum(np.abs(np.diff(np.append(z, z[0])))))
    return int(np.clip(round(per / (1.5 * field.h)), 64, 360))


def initial_curves(field: MetricField, sep: Separation, seed: int = 0, n_vertices: Optional[int] = None,
                   thresholds=(0.5, 1.0, 2.0)) -> List[ClosedCurve]:
    """Separating starting curves: offset boundaries of the E side plus one random perturbation."""
    dom = field.domain
    want = expected_signature(sep)
    out = []
    for t in thresholds:
        try:
            mask = _separating_mask(field, sep, t)
        except NoSeparatingCurveFound as exc:
            log.debug("threshold %s: %s", t, exc)
            continue
        z = _mask_contour(field, mask)
        if z is None or z.size < 8:
            continue
        z = ClosedCurve(z).resampled(_vertex_count(field, z, n_vertices)).points
        curve = _oriented(ClosedCurve(z))
        if _valid_start(dom, curve, want, field.h):
            out.append(curve)
    if out:
        rng = np.random.default_rng(seed)
        base = out[len(out) // 2].points
        clear = dom.distance(base)
        tang = np.roll(base, -1) - np.roll(base, 1)
        nrm = 1j * tang / np.abs(tang)
        theta = 2 * np.pi * np.arange(base.size) / base.size
        bump = np.zeros(base.size)
        for k in range(1, 5):
            bump += rng.normal() * np.cos(k * theta) + rng.normal() * np.sin(k * theta)
        bump /= max(np.max(np.abs(bump)), 1e-12)
        for scale in (0.4, 0.2, 0.1):
            cand = ClosedCurve(base + scale * clear * bump * nrm)
            if _valid_start(dom, cand, want, field.h):
                out.append(_oriented(cand))
                break
    if not out:
        raise NoSeparatingCurveFound(f"no separating start curve for {sep}")
    return out


def _oriented(curve: ClosedCurve) -> ClosedCurve:
    return curve if curve.orientation > 0 else curve.reversed()


def _valid_start(domain: Domain, curve: ClosedCurve, want: np.ndarray, h: float) -> bool:
    z = curve.points
    if np.min(domain.distance(z)) <= 0.5 * h or curve_self_intersects(z):
        return False
    try:
        sig = winding_signature(curve, domain)
    except CurveTouchesComplement:
        return False
    return np.array_equal(np.abs(sig), want) and len(set(sig[sig != 0].tolist())) <= 1


# ---------------------------------------------------------------------------
# meridians


@dataclass
class Meridian:
    """Shortest simple closed geodesic found for one separation."""

    curve: ClosedCurve
    separation: Separation
    length: float
    dist: float
    local_minima: List[float] = field(default_factory=list)
    residual: float = float("nan")
    alternatives: List[ClosedCurve] = field(default_factory=list, repr=False)

    @property
    def absent(self) -> bool:
        return False


@dataclass
class AbsentMeridian:
    """Placeholder for a separation with a single point on one side."""

    separation: Separation
    reason: str

    @property
    def absent(self) -> bool:
        return True


def _check_nontrivial(domain: Domain, sep: Separation):
    for side in (sep.e_side, sep.f_side):
        if len(side) == 1 and domain.components[next(iter(side))].is_point:
            raise PrincipalMeridianAbsent(f"{sep}: one side is the single point component "
                                          f"{next(iter(side)) + 1}")


def find_meridian(domain: Domain, field: MetricField, sep: Separation, seed: int = 0,
                  n_vertices: Optional[int] = None, tol: float = RESIDUAL_TOL,
                  max_iter: int = 3000, with_dist: bool = True) -> Meridian:
    """Shortest simple closed geodesic separating ``sep.e_side`` from the rest."""
    _check_nontrivial(domain, sep)
    starts = initial_curves(field, sep, seed=seed, n_vertices=n_vertices)
    want = expected_signature(sep)
    results = []
    for c in starts:
        try:
            out, info = shorten_in_class(field, c, tol=tol, max_iter=max_iter, return_info=True)
        except (SelfIntersectionDetected, ClearanceLost) as exc:
            log.info("start curve dropped: %s", exc)
            continue
        sig = winding_signature(out, domain)
        if not np.array_equal(np.abs(sig), want):
            continue
        results.append((hyp_length(field, out), out, info))
    if not results:
        raise NoSeparatingCurveFound(f"every start curve failed for {sep}")
    best_len = min(r[0] for r in results)
    tied = [r for r in results if r[0] <= best_len * (1 + TIE_TOL)]
    winner = min(tied, key=lambda r: (round(r[1].centroid().real, 9), round(r[1].centroid().imag, 9)))
    others = [r for r in results if r is not winner]
    dist = hyp_dist_point_to_set(field, domain.basepoint, winner[1]) if with_dist else float("nan")
    return Meridian(winner[1], sep, winner[0], dist, [r[0] for r in others], winner[2].residual,
                    [r[1] for r in others])


def principal_system(domain: Domain, field: MetricField, seed: int = 0, **kw) -> list:
    """Principal meridians in the order of the complement components.

    Entries for separations with a single point on one side are
    :class:`AbsentMeridian` placeholders.
    """
    seps = [s for s in enumerate_separations(domain) if s.principal][: principal_count(domain.n)]
    return [_meridian_or_absent(domain, field, s, seed, **kw) for s in seps]


def extended_system(domain: Domain, field: MetricField, seed: int = 0, **kw) -> list:
    """One meridian per separation class (these may intersect one another)."""
    return [_meridian_or_absent(domain, field, s, seed, **kw) for s in enumerate_separations(domain)]


def _meridian_or_absent(domain, field, sep, seed, **kw):
    try:
        return find_meridian(domain, field, sep, seed=seed, **kw)
    except PrincipalMeridianAbsent as exc:
        return AbsentMeridian(sep, str(exc))


def system_metrics(domain: Domain, field: MetricField, system: list) -> List[tuple]:
    """Rows ``(i, sep_mask, length, dist)`` for the present meridians (1-based ``i``)."""
    if not system:
        raise ValueError("empty system")
    rows = []
    for i, m in enumerate(system, start=1):
        if m.absent:
            continue
        rows.append((i, m.separation.mask, m.length, m.dist))
    return rows


def _segments_cross(a: np.ndarray, b: np.ndarray) -> bool:
    a0, a1 = a, np.roll(a, -1)
    b0, b1 = b, np.roll(b, -1)
    p, r = a0[:, None], (a1 - a0)[:, None]
    q, s = b0[None, :], (b1 - b0)[None, :]

    def cross(u, v):
        return u.real * v.imag - u.imag * v.real

    rxs = cross(r, s)
    qp = q - p
    with np.errstate(divide="ignore", invalid="ignore"):
        t = cross(qp, s) / rxs
        u = cross(qp, r) / rxs
    return bool(np.any((rxs != 0) & (t >= 0) & (t <= 1) & (u >= 0) & (u <= 1)))


def curve_gap(c1: ClosedCurve, c2: ClosedCurve) -> float:
    """Euclidean gap between two closed polylines (0 if they cross)."""
    a, b = c1.points, c2.points
    if _segments_cross(a, b):
        return 0.0
    from .domain import _segment_distance

    d1 = _segment_distance(a, b, np.roll(b, -1))
    d2 = _segment_distance(b, a, np.roll(a, -1))
    return float(min(d1.min(), d2.min()))


def pairwise_gaps(system: list) -> np.ndarray:
    """Matrix of gaps between the present meridians of a system."""
    present = [m for m in system if not m.absent]
    k = len(present)
    G = np.full((k, k), np.inf)
    for i in range(k):
        for j in range(i + 1, k):
            G[i, j] = G[j, i] = curve_gap(present[i].curve, present[j].curve)
    return G


def _at_arclength(z: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Points of the closed polyline ``z`` at fractions ``t`` of its Euclidean length."""
    ring = np.append(z, z[0])
    s = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(ring)))])
    u = np.mod(t, 1.0) * s[-1]
    return np.interp(u, s, ring.real) + 1j * np.interp(u, s, ring.imag)


def uniform_deviation(c1: ClosedCurve, c2: ClosedCurve, n: int = 256) -> float:
    """Uniform distance between two closed curves.

    Both curves are parametrised proportionally to Euclidean arclength
    (same orientation); the result is the smallest, over shifts of the
    parameter, of the largest pointwise distance.  The shift is located
    on ``n`` samples and then refined continuously.
    """
    za, zb = _oriented(c1).points, _oriented(c2).points
    t = np.arange(n) / n
    a = _at_arclength(za, t)
    b = _at_arclength(zb, t)
    coarse = [float(np.max(np.abs(a - np.roll(b, -k)))) for k in range(n)]
    k = int(np.argmin(coarse))
    tf = np.arange(8 * n) / (8 * n)
    af = _at_arclength(za, tf)
    shifts = (k + np.linspace(-1.0, 1.0, 161)) / n
    return float(min(np.max(np.abs(af - _at_arclength(zb, tf + s))) for s in shifts))


class MeridianFinder(BaseEstimator):
    """Estimator computing the density and the principal system of a domain."""

    def __init__(self, resolution: float = 0.01, seed: int = 0, n_vertices: Optional[int] = None,
                 tol: float = RESIDUAL_TOL, extended: bool = False):
        self.resolution = resolution
        self.seed = seed
        self.n_vertices = n_vertices
        self.tol = tol
        self.extended = extended

    def fit(self, domain: Domain, y=None):
        self.field_ = solve_density(domain, self.resolution)
        build = extended_system if self.extended else principal_system
        self.meridians_ = build(domain, self.field_, seed=self.seed, n_vertices=self.n_vertices, tol=self.tol)
        self.lengths_ = np.array([np.nan if m.absent else m.length for m in self.meridians_])
        return self

    def predict(self, z) -> np.ndarray:
        """Winding signature of each present meridian about the points ``z``."""
        check_is_fitted(self, "meridians_")
        from .domain import winding_numbers

        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return np.array([winding_numbers(m.curve.vertices, z) if not m.absent else np.zeros(z.size, int)
                         for m in self.meridians_])
