"""Hyperbolic density of planar domains (curvature -1, ``lambda_D(0) = 2``).

The density is written ``lambda = exp(u)`` with ``u`` solving the Liouville
equation ``Laplace(u) = exp(2u)``.  We split ``u = g + W`` where ``g`` is the
logarithm of the largest single-component model density (exact for the
complement of one disc, slit or point) and ``W`` is a correction that
vanishes on the boundary like ``delta**2``.  Newton's method solves for
``u`` on grid nodes at distance at least ``offset`` from the complement;
Dirichlet data on the band inside the offset is ``g`` plus ``W``
extrapolated along the normal, iterated to a fixed point.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.interpolate import RectBivariateSpline, RegularGridInterpolator
from scipy.ndimage import distance_transform_edt
from scipy.optimize import minimize
from scipy.sparse.csgraph import dijkstra
from scipy.sparse.linalg import spsolve
from scipy.spatial import cKDTree
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_points
from .domain import INF, ClosedCurve, Domain
from .exceptions import (
    CurveTooCloseToBoundary,
    GridTooCoarse,
    NonConvergence,
    PointNotInDomain,
)

log = logging.getLogger(__name__)

MIN_NODES_PER_GAP = 8


# ---------------------------------------------------------------------------
# closed forms


def closed_form_density(kind: str, params: Optional[dict], z) -> np.ndarray:
    """Hyperbolic density of a round disc or round annulus.

    ``kind='disc'`` takes ``center`` and ``radius`` (default unit disc);
    ``kind='annulus'`` takes ``r``, ``R`` and ``center``.
    """
    params = params or {}
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    c = complex(params.get("center", 0.0))
    rho = np.abs(z - c)
    if kind == "disc":
        R = float(params.get("radius", 1.0))
        if np.any(rho >= R):
            raise PointNotInDomain("point outside the disc")
        return 2 * R / (R ** 2 - rho ** 2)
    if kind == "annulus":
        r, R = float(params["r"]), float(params["R"])
        if np.any((rho <= r) | (rho >= R)):
            raise PointNotInDomain("point outside the annulus")
        L = math.log(R / r)
        return (math.pi / L) / (rho * np.sin(math.pi * np.log(rho / r) / L))
    raise ValueError(f"no closed form for kind {kind!r}")


def annulus_equator_length(r: float, R: float) -> float:
    """Hyperbolic length of the core circle of ``A(r, R)``: ``2 pi^2 / log(R/r)``."""
    return 2 * math.pi ** 2 / math.log(R / r)


# ---------------------------------------------------------------------------
# the field


@dataclass(frozen=True)
class MetricField:
    """Sampled hyperbolic density on a rectangular grid.

    ``logdensity`` holds ``u`` at solver nodes (``nan`` elsewhere);
    ``correction`` holds ``W = u - g`` on every node of the grid, extended by
    zero into the complement, and is what gets interpolated.
    """

    domain: Domain
    xs: np.ndarray
    ys: np.ndarray
    h: float
    offset: float
    logdensity: np.ndarray
    correction: np.ndarray
    residual_norm: float
    newton_iterations: int
    outer_iterations: int
    discretization_bound: Optional[float] = None
    _spline: object = field(default=None, init=False, repr=False, compare=False)
    _graph: object = field(default=None, init=False, repr=False, compare=False)

    @property
    def spline(self):
        if self._spline is None:
            object.__setattr__(self, "_spline", RectBivariateSpline(self.xs, self.ys, self.correction, kx=3, ky=3))
        return self._spline

    @property
    def interior(self) -> np.ndarray:
        return np.isfinite(self.logdensity)

    def nodes(self) -> np.ndarray:
        X, Y = np.meshgrid(self.xs, self.ys, indexing="ij")
        return X + 1j * Y

    def model_log(self, z) -> np.ndarray:
        return np.log(self.domain.boundary_model(z))

    def log_density(self, z) -> np.ndarray:
        """``u = log lambda`` at finite points; ``nan`` outside the domain."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.full(z.shape, np.nan)
        inside = self.domain.distance(z.ravel()).reshape(z.shape) > 0
        if np.any(inside):
            zi = z[inside]
            w = self.spline.ev(zi.real, zi.imag)
            out[inside] = self.model_log(zi) + w
        return out

    def density(self, z) -> np.ndarray:
        return np.exp(self.log_density(z))

    def spherical_density(self, z) -> np.ndarray:
        """Density with respect to the spherical length element."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return self.density(z) * (1 + np.abs(z) ** 2)

    def grad_log_density(self, z) -> np.ndarray:
        """Gradient of ``u`` as a complex number ``u_x + i u_y``."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        d = self.domain.distance(z)
        eps = np.clip(d * 1e-3, 1e-9, 1e-5)
        gx = (self.model_log(z + eps) - self.model_log(z - eps)) / (2 * eps)
        gy = (self.model_log(z + 1j * eps) - self.model_log(z - 1j * eps)) / (2 * eps)
        wx = self.spline.ev(z.real, z.imag, dx=1)
        wy = self.spline.ev(z.real, z.imag, dy=1)
        return (gx + wx) + 1j * (gy + wy)

    def node_table(self) -> np.ndarray:
        """Rows ``(x, y, logdensity)`` for solver nodes in row-major order."""
        Z = self.nodes()
        m = self.interior
        return np.column_stack([Z.real[m], Z.imag[m], self.logdensity[m]])


def _grid(domain: Domain, h: float):
    x0, x1, y0, y1 = domain.bbox(pad=2 * h)
    nx = int(math.ceil((x1 - x0) / h)) + 1
    ny = int(math.ceil((y1 - y0) / h)) + 1
    return x0 + h * np.arange(nx), y0 + h * np.arange(ny)


def component_gaps(domain: Domain) -> float:
    """Smallest Euclidean distance between two distinct complement components."""
    comps = domain.components
    best = math.inf
    for i in range(len(comps)):
        for j in range(i + 1, len(comps)):
            pi, pj = comps[i].sample.points, comps[j].sample.points
            if pi.size == 0 or pj.size == 0:
                continue
            tree = cKDTree(np.column_stack([pj.real, pj.imag]))
            d, _ = tree.query(np.column_stack([pi.real, pi.imag]))
            best = min(best, float(np.min(d)))
    return best


def default_offset(domain: Domain, h: float) -> float:
    """``5h``, reduced to a quarter of the narrowest gap but never below ``2h``."""
    return max(2 * h, min(5 * h, component_gaps(domain) / 4))


def _extrapolation_weights(domain: Domain, z, offset: float):
    """Probe points and factors carrying ``W`` from the probe back to ``z``.

    ``W`` behaves like ``c delta^2`` near smooth boundary arcs and like
    ``c / log(R/delta)`` near a puncture.
    """
    dist = domain.component_distances(z)
    near = np.argmin(dist, axis=0)
    db = dist[near, np.arange(z.size)]
    eps = 1e-7
    nx = (domain.distance(z + eps) - domain.distance(z - eps)) / (2 * eps)
    ny = (domain.distance(z + 1j * eps) - domain.distance(z - 1j * eps)) / (2 * eps)
    nrm = nx + 1j * ny
    mag = np.abs(nrm)
    nrm = np.where(mag > 1e-12, nrm / np.where(mag > 0, mag, 1), 1.0)
    q = z + nrm * offset
    dq_all = domain.component_distances(q)
    dq = dq_all[near, np.arange(z.size)]
    dq = np.maximum(dq, db + 1e-12)
    factor = (db / dq) ** 2
    for k, comp in enumerate(domain.components):
        if comp.is_point and comp.params["z"] is not INF:
            sel = near == k
            if not np.any(sel):
                continue
            reach = _point_reach(domain, k)
            a = np.log(reach / np.maximum(dq[sel], 1e-300))
            b = np.log(reach / np.maximum(db[sel], 1e-300))
            factor[sel] = np.clip(a / b, 0.0, 1.0)
    return q, factor


def _point_reach(domain: Domain, k: int) -> float:
    p = np.array([domain.components[k].params["z"]])
    return min(float(c.distance(p)[0]) for j, c in enumerate(domain.components) if j != k)


def _laplacian(inner: np.ndarray, h: float):
    """Five-point Laplacian on ``inner`` nodes plus the map of Dirichlet neighbours."""
    idx = -np.ones(inner.shape, dtype=np.int64)
    n = int(inner.sum())
    idx[inner] = np.arange(n)
    I, J = np.nonzero(inner)
    rows, cols = [], []
    brow, bflat = [], []
    band = np.zeros(inner.shape, dtype=bool)
    for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        In, Jn = I + di, J + dj
        nb = idx[In, Jn]
        m = nb >= 0
        rows.append(np.flatnonzero(m))
        cols.append(nb[m])
        brow.append(np.flatnonzero(~m))
        bflat.append(np.ravel_multi_index((In[~m], Jn[~m]), inner.shape))
        band[In[~m], Jn[~m]] = True
    r, c = np.concatenate(rows), np.concatenate(cols)
    L = sp.csr_matrix((np.ones(r.size), (r, c)), shape=(n, n)) - 4 * sp.identity(n, format="csr")
    B = sp.csr_matrix((np.ones(sum(b.size for b in brow)), (np.concatenate(brow), np.concatenate(bflat))),
                      shape=(n, inner.size))
    return L / h ** 2, B / h ** 2, band


def _newton(L, B, u, bvals_flat, tol, max_iter):
    """Damped Newton for ``L u + B b - exp(2u) = 0``."""
    rb = B @ bvals_flat

    def resid(v):
        return L @ v + rb - np.exp(2 * v)

    F = resid(u)
    r = float(np.max(np.abs(F)))
    for it in range(1, max_iter + 1):
        if r <= tol:
            return u, r, it - 1
        J = (L - sp.diags(2 * np.exp(2 * u))).tocsc()
        v = spsolve(J, -F)
        s = 1.0
        while True:
            un = u + s * v
            Fn = resid(un)
            rn = float(np.max(np.abs(Fn)))
            if rn < r or s < 1e-6:
                break
            s *= 0.5
        u, F, r = un, Fn, rn
    if r > tol:
        raise NonConvergence(f"Newton residual {r:.3g} after {max_iter} iterations")
    return u, r, max_iter


def solve_density(domain: Domain, resolution: float = 0.01, offset: Optional[float] = None,
                  tol: float = 1e-6, max_iter: int = 50, correct: bool = True,
                  max_outer: int = 30, outer_tol: float = 1e-7,
                  estimate_error: bool = False) -> MetricField:
    """Solve for the hyperbolic density of ``domain`` on a grid of spacing ``resolution``.

    Raises :class:`GridTooCoarse` if a gap between components spans fewer
    than eight grid spacings.
    """
    h = float(resolution)
    if not h > 0:
        raise ValueError("resolution must be positive")
    gap = component_gaps(domain)
    if gap / h < MIN_NODES_PER_GAP:
        raise GridTooCoarse(f"narrowest gap {gap:.3g} spans only {gap / h:.1f} grid spacings")
    if offset is None:
        offset = default_offset(domain, h)
    if offset < 2 * h:
        raise ValueError("offset must be at least 2h")
    t0 = time.perf_counter()
    xs, ys = _grid(domain, h)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    Z = X + 1j * Y
    delta = domain.distance(Z.ravel()).reshape(Z.shape)
    inner = delta >= offset
    if not inner.any():
        raise GridTooCoarse("no grid node lies at the offset distance from the complement")
    band_all = (delta > 0) & ~inner
    g = np.full(Z.shape, np.nan)
    g[delta > 0] = np.log(domain.boundary_model(Z[delta > 0]))
    L, B, _ = _laplacian(inner, h)

    bz = Z[band_all]
    q, factor = _extrapolation_weights(domain, bz, offset)
    bvals = np.zeros(Z.shape)
    bvals[band_all] = g[band_all]
    u = g[inner].copy()
    W = np.zeros(Z.shape)
    total_newton = 0
    outer = 0
    for outer in range(1, (max_outer if correct else 1) + 1):
        u, res, its = _newton(L, B, u, bvals.ravel(), tol, max_iter)
        total_newton += its
        W[inner] = u - g[inner]
        if not correct:
            break
        Wf = _fill_nearest(W, inner)
        wq = RegularGridInterpolator((xs, ys), Wf, method="linear", bounds_error=False, fill_value=0.0)(
            np.column_stack([q.real, q.imag]))
        new = factor * wq
        change = float(np.max(np.abs(new - W[band_all]))) if new.size else 0.0
        W[band_all] = new
        bvals[band_all] = g[band_all] + new
        if change < outer_tol:
            u, res, its = _newton(L, B, u, bvals.ravel(), tol, max_iter)
            total_newton += its
            W[inner] = u - g[inner]
            break
    U = np.full(Z.shape, np.nan)
    U[inner] = u
    log.info("density solve: %d nodes, %d Newton steps, %d outer passes, residual %.2e, %.2fs",
             inner.sum(), total_newton, outer, res, time.perf_counter() - t0)
    bound = None
    if estimate_error:
        bound = _refinement_bound(domain, h, U, xs, ys, tol, max_iter, correct)
    return MetricField(domain, xs, ys, h, float(offset), U, W, res, total_newton, outer, bound)


def _fill_nearest(W: np.ndarray, valid: np.ndarray) -> np.ndarray:
    _, (ii, jj) = distance_transform_edt(~valid, return_indices=True)
    return W[ii, jj]


def _refinement_bound(domain, h, U, xs, ys, tol, max_iter, correct) -> float:
    """Relative density change against a solve at ``2h`` on shared nodes."""
    try:
        coarse = solve_density(domain, 2 * h, tol=tol, max_iter=max_iter, correct=correct)
    except (GridTooCoarse, NonConvergence):
        return float("nan")
    ix = np.searchsorted(xs, coarse.xs - 1e-9 * h)
    iy = np.searchsorted(ys, coarse.ys - 1e-9 * h)
    ok_x = (ix < xs.size) & (np.abs(xs[np.minimum(ix, xs.size - 1)] - coarse.xs) < 1e-6 * h)
    ok_y = (iy < ys.size) & (np.abs(ys[np.minimum(iy, ys.size - 1)] - coarse.ys) < 1e-6 * h)
    fine = U[np.ix_(ix[ok_x], iy[ok_y])]
    crs = coarse.logdensity[np.ix_(ok_x, ok_y)]
    both = np.isfinite(fine) & np.isfinite(crs)
    if not both.any():
        return float("nan")
    return float(np.max(np.abs(np.expm1(fine[both] - crs[both]))))


class HyperbolicDensity(BaseEstimator):
    """Estimator wrapper around :func:`solve_density`.

    >>> est = HyperbolicDensity(resolution=0.02).fit(disc_domain())   # doctest: +SKIP
    >>> est.predict([0.0])                                             # doctest: +SKIP
    array([2.])
    """

    def __init__(self, resolution: float = 0.01, offset: Optional[float] = None, tol: float = 1e-6,
                 max_iter: int = 50, correct: bool = True):
        self.resolution = resolution
        self.offset = offset
        self.tol = tol
        self.max_iter = max_iter
        self.correct = correct

    def fit(self, domain: Domain, y=None):
        self.field_ = solve_density(domain, self.resolution, self.offset, self.tol, self.max_iter, self.correct)
        self.residual_norm_ = self.field_.residual_norm
        return self

    def predict(self, z) -> np.ndarray:
        """Density at the given points (``nan`` outside the domain)."""
        check_is_fitted(self, "field_")
        return self.field_.density(check_points(z))

    def transform(self, z) -> np.ndarray:
        """Log-density at the given points."""
        check_is_fitted(self, "field_")
        return self.field_.log_density(check_points(z))


# ---------------------------------------------------------------------------
# lengths and distances


def _refine_polyline(z: np.ndarray, max_step: float) -> np.ndarray:
    seg = np.abs(np.diff(z))
    k = np.maximum(1, np.ceil(seg / max_step).astype(int))
    parts = [z[i] + (z[i + 1] - z[i]) * np.arange(k[i]) / k[i] for i in range(z.size - 1)]
    return np.concatenate(parts + [z[-1:]])


def discrete_length(field: MetricField, z: np.ndarray) -> float:
    """Trapezoid length of the polyline through ``z`` (no refinement)."""
    lam = field.density(z)
    return float(np.sum(0.5 * (lam[:-1] + lam[1:]) * np.abs(np.diff(z))))


def hyp_length(field: MetricField, curve, closed: Optional[bool] = None, refine: bool = True) -> float:
    """Hyperbolic length of a polyline by the trapezoid rule.

    ``curve`` is a :class:`ClosedCurve` or an array of vertices (an open
    polyline unless ``closed=True``).  With ``refine`` each edge is split
    into pieces no longer than the grid spacing.
    """
    if isinstance(curve, ClosedCurve):
        z = curve.vertices
    else:
        z = np.atleast_1d(np.asarray(curve, dtype=complex))
        if closed and z[0] != z[-1]:
            z = np.append(z, z[0])
    if z.size < 2 or np.all(z == z[0]):
        return 0.0
    clearance = float(np.min(field.domain.distance(z)))
    if clearance < 2 * field.h:
        raise CurveTooCloseToBoundary(f"curve clearance {clearance:.3g} below 2h = {2 * field.h:.3g}")
    if refine:
        z = _refine_polyline(z, field.h)
    return discrete_length(field, z)


_STENCIL = [(1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (2, 1), (1, -2), (2, -1)]


def _grid_graph(field: MetricField):
    """Undirected 16-neighbour graph over grid nodes inside the domain.

    An edge is kept when the disc on it as diameter avoids the complement.
    """
    Z = field.nodes()
    nx, ny = Z.shape
    flat = Z.ravel()
    delta = field.domain.distance(flat)
    I, J = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    I, J = I.ravel(), J.ravel()
    rows, cols, wts = [], [], []
    for di, dj in _STENCIL:
        ok = (I + di >= 0) & (I + di < nx) & (J + dj >= 0) & (J + dj < ny)
        ia = np.flatnonzero(ok)
        ib = (I[ok] + di) * ny + (J[ok] + dj)
        both = (delta[ia] > 0) & (delta[ib] > 0)
        ia, ib = ia[both], ib[both]
        elen = math.hypot(di, dj) * field.h
        mid = 0.5 * (flat[ia] + flat[ib])
        keep = field.domain.distance(mid) > 0.5 * elen
        rows.append(ia[keep])
        cols.append(ib[keep])
        wts.append(field.density(mid[keep]) * elen)
    tree = cKDTree(np.column_stack([flat.real, flat.imag]))
    return Z, delta.reshape(Z.shape), np.concatenate(rows), np.concatenate(cols), np.concatenate(wts), tree


def _nearest_on_polyline(p: complex, z: np.ndarray):
    """Closest point to ``p`` on the polyline ``z`` and its fractional index."""
    a, b = z[:-1], z[1:]
    ab = b - a
    den = np.where(np.abs(ab) > 0, np.abs(ab) ** 2, 1.0)
    t = np.clip(np.real((p - a) * np.conj(ab)) / den, 0, 1)
    foot = a + t * ab
    k = int(np.argmin(np.abs(p - foot)))
    return foot[k], k + t[k]


def hyp_dist_point_to_set(field: MetricField, z, target, refine: bool = True, n_path: int = 40) -> float:
    """Hyperbolic distance from ``z`` to a closed curve or a point.

    A Dijkstra search over a 16-neighbour grid graph gives an upper bound;
    the extracted path is then shortened with L-BFGS while its far end
    slides along the target.  The smaller of the two values is returned.
    """
    z = complex(z)
    dom = field.domain
    if dom.distance(np.array([z]))[0] <= 0:
        raise PointNotInDomain(f"{z} is not in the domain")
    if isinstance(target, ClosedCurve):
        tz = _refine_polyline(target.vertices, field.h / 2)
    else:
        tz = np.atleast_1d(np.asarray(target, dtype=complex))
    if np.any(dom.distance(tz) <= 0):
        raise PointNotInDomain("target leaves the domain")
    foot, _ = _nearest_on_polyline(z, tz) if tz.size > 1 else (tz[0], 0.0)
    if abs(foot - z) < 1e-12:
        return 0.0

    if field._graph is None:
        object.__setattr__(field, "_graph", _grid_graph(field))
    Z, delta, r, c, w, tree = field._graph
    nn = Z.size
    src, snk = nn, nn + 1
    radius = 1.5 * field.h
    flat = Z.ravel()
    dflat = delta.ravel()

    def links(pts, node_id):
        """Edges from each of ``pts`` to nearby grid nodes, all tagged ``node_id``."""
        hits = tree.query_ball_point(np.column_stack([pts.real, pts.imag]), radius)
        p = np.concatenate([np.full(len(hh), pts[k]) for k, hh in enumerate(hits)] + [np.zeros(0, complex)])
        j = np.concatenate([np.asarray(hh, dtype=np.int64) for hh in hits] + [np.zeros(0, np.int64)])
        ok = dflat[j] > 0
        p, j = p[ok], j[ok]
        q = flat[j]
        ok = dom.distance(0.5 * (p + q)) > 0.5 * np.abs(q - p)
        p, j, q = p[ok], j[ok], q[ok]
        return np.full(j.size, node_id), j, _segment_lengths(field, p, q)

    er1, ec1, ew1 = links(np.array([z]), src)
    er2, ec2, ew2 = links(tz, snk)
    extra_r = [er1, er2]
    extra_c = [ec1, ec2]
    extra_w = [ew1, ew2]
    if abs(foot - z) <= radius:
        extra_r.append(np.array([src]))
        extra_c.append(np.array([snk]))
        extra_w.append(_segment_lengths(field, np.array([z]), np.array([foot])))
    extra_r, extra_c, extra_w = (np.concatenate(v) for v in (extra_r, extra_c, extra_w))
    rows = np.concatenate([r, extra_r]).astype(np.int64)
    cols = np.concatenate([c, extra_c]).astype(np.int64)
    wts = np.concatenate([w, extra_w])
    # csr construction sums duplicates; keep the cheapest parallel edge instead
    a, b = np.minimum(rows, cols), np.maximum(rows, cols)
    order = np.lexsort((wts, b, a))
    a, b, wts = a[order], b[order], wts[order]
    first = np.ones(a.size, dtype=bool)
    first[1:] = (a[1:] != a[:-1]) | (b[1:] != b[:-1])
    G = sp.csr_matrix((wts[first], (a[first], b[first])), shape=(nn + 2, nn + 2))
    dist, pred = dijkstra(G, directed=False, indices=src, return_predecessors=True)
    best = float(dist[snk])
    if not np.isfinite(best):
        raise GridTooCoarse("the grid graph does not connect the point to the target")
    if not refine:
        return best
    path = []
    k = pred[snk]
    while k != src and k >= 0:
        path.append(flat[k])
        k = pred[k]
    path = np.array([z] + path[::-1], dtype=complex)
    refined = _shorten_path(field, path, tz, n_path)
    return min(best, refined) if np.isfinite(refined) else best


def _segment_lengths(field: MetricField, a: np.ndarray, b: np.ndarray, n: int = 5) -> np.ndarray:
    """Trapezoid lengths of many short segments ``a -> b`` with ``n`` nodes each."""
    t = np.linspace(0.0, 1.0, n)
    pts = a[:, None] + (b - a)[:, None] * t[None, :]
    lam = field.density(pts.ravel()).reshape(pts.shape)
    return np.sum(0.5 * (lam[:, :-1] + lam[:, 1:]), axis=1) * np.abs(b - a) / (n - 1)


def _shorten_path(field: MetricField, path: np.ndarray, tz: np.ndarray, n_path: int) -> float:
    """Minimise the discrete length of a path from ``path[0]`` to the polyline ``tz``."""
    if path.size < 2:
        return math.inf
    foot, t_end = _nearest_on_polyline(path[-1], tz) if tz.size > 1 else (tz[0], 0.0)
    pts = np.append(path, foot)
    s = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(pts)))])
    if s[-1] == 0:
        return 0.0
    tt = np.linspace(0, s[-1], n_path + 1)
    init = np.interp(tt, s, pts.real) + 1j * np.interp(tt, s, pts.imag)
    z0 = init[0]
    seg = np.diff(tz) if tz.size > 1 else np.array([0j])
    nseg = max(tz.size - 1, 1)

    def end_point(t):
        if tz.size == 1:
            return tz[0], 0j
        t = float(np.clip(t, 0, nseg - 1e-12))
        k = int(t)
        return tz[k] + (t - k) * seg[k], seg[k]

    def unpack(x):
        mid = x[:-1].reshape(-1, 2)
        e, tang = end_point(x[-1])
        return np.concatenate([[z0], mid[:, 0] + 1j * mid[:, 1], [e]]), tang

    def fun(x):
        zz, tang = unpack(x)
        lam = field.density(zz)
        if not np.all(np.isfinite(lam)) or np.min(field.domain.distance(zz)) < field.h:
            return 1e6, np.zeros_like(x)
        ds = np.diff(zz)
        sl = np.abs(ds)
        sl = np.where(sl > 0, sl, 1e-300)
        L = float(np.sum(0.5 * (lam[:-1] + lam[1:]) * sl))
        glam = lam * field.grad_log_density(zz)
        unit = ds / sl
        grad = np.zeros(zz.size, dtype=complex)
        avg = 0.5 * (lam[:-1] + lam[1:])
        grad[:-1] -= avg * unit
        grad[1:] += avg * unit
        grad[:-1] += 0.5 * glam[:-1] * sl
        grad[1:] += 0.5 * glam[1:] * sl
        g_mid = grad[1:-1]
        g_t = float(np.real(grad[-1] * np.conj(tang)))
        return L, np.concatenate([np.column_stack([g_mid.real, g_mid.imag]).ravel(), [g_t]])

    x0 = np.concatenate([np.column_stack([init[1:-1].real, init[1:-1].imag]).ravel(), [t_end]])
    bounds = [(None, None)] * (x0.size - 1) + [(0.0, max(nseg - 1e-9, 0.0))]
    res = minimize(fun, x0, jac=True, method="L-BFGS-B", bounds=bounds, options={"maxiter": 500})
    zz, _ = unpack(res.x)
    if np.min(field.domain.distance(zz)) < field.h:
        return math.inf
    return hyp_length(field, zz, closed=False) if np.min(field.domain.distance(zz)) >= 2 * field.h \
        else discrete_length(field, _refine_polyline(zz, field.h))


def write_field_csv(field: MetricField, path) -> None:
    """Dump ``x,y,logdensity`` for solver nodes."""
    rows = field.node_table()
    with open(path, "w", newline="\n") as fh:
        fh.write("x,y,logdensity\n")
        for x, y, u in rows:
            fh.write(f"{x:.10g},{y:.10g},{u:.12g}\n")



def boundary_sandwich(field: MetricField, delta_max: float = 0.05):
    """Near-boundary ratios of the spherical density at solver grid nodes.

    For nodes with spherical boundary distance ``d < delta_max`` returns
    ``(d, lower, upper)`` where ``lower = lam# d log(1/d)`` and
    ``upper = lam# d / 4``.  The density lies between ``C / (d log(1/d))``
    and ``4 / d`` exactly when ``lower >= C`` and ``upper <= 1``; the
    smallest ``lower`` is the measured constant ``C``.  ``d`` is the
    first-order value ``delta / (1 + |z|^2)`` from the exact Euclidean
    distance ``delta``.
    """
    Z = field.nodes().ravel()
    delta = field.domain.distance(Z)
    z, delta = Z[delta > 1e-9], delta[delta > 1e-9]
    d = delta / (1 + np.abs(z) ** 2)
    keep = d < delta_max
    z, d = z[keep], d[keep]
    lam = field.spherical_density(z)
    return d, lam * d * np.log(1 / d), lam * d / 4
