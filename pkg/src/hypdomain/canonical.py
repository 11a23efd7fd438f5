"""Conformal maps onto circular-slit annuli.

An ``n``-connected non-degenerate domain is mapped onto
``{1 < |w| < exp(lambda^1)}`` minus ``n - 2`` arcs of the circles
``|w| = exp(lambda^j)``.  We write

    phi(z) = e^{i alpha} (z - c_1) exp(g(z))

with ``c_1`` a point of the inner component and ``g`` analytic and
single valued in the domain, expanded in decaying powers attached to every
bounded component and growing powers attached to the outer one.  The real
part of ``log phi`` must be constant on every boundary component; those
constants are unknowns of a linear least-squares problem, the inner one
pinned to zero.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_points
from .domain import Component, Domain, arc_mobius, arc_uniformizer, validate_domain
from .exceptions import (
    DegenerateComponent,
    IllConditioned,
    NewtonDiverged,
    NotMultiplyConnected,
    PointNotInDomain,
    WOutsideRange,
)

log = logging.getLogger(__name__)

COND_LIMIT = 1e13


@dataclass(frozen=True)
class LambdaVector:
    """Parameters of a standard slit annulus: ``n - 1`` radii logs and ``2n - 4`` angles."""

    lambdas: tuple
    thetas: tuple
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise NotMultiplyConnected("standard domains need n >= 2")
        if len(self.lambdas) != self.n - 1 or len(self.thetas) != 2 * self.n - 4:
            raise ValueError(f"expected {self.n - 1} lambdas and {2 * self.n - 4} thetas")
        if not self.lambdas[0] > 0:
            raise ValueError("lambda^1 must be positive")
        for lam in self.lambdas[1:]:
            if not 0 < lam < self.lambdas[0]:
                raise ValueError("slit radii must lie strictly inside the annulus")

    @property
    def dim(self) -> int:
        return len(self.lambdas) + len(self.thetas)

    def as_array(self) -> np.ndarray:
        return np.array(list(self.lambdas) + list(self.thetas), dtype=float)

    def distance(self, other: "LambdaVector") -> float:
        """Sup-norm difference; angle differences are taken modulo ``2 pi``."""
        dl = np.abs(np.subtract(self.lambdas, other.lambdas))
        dt = np.abs(np.angle(np.exp(1j * np.subtract(self.thetas, other.thetas))))
        return float(np.max(np.concatenate([dl, dt])))

    @property
    def modulus(self) -> float:
        return self.lambdas[0] / (2 * math.pi)


def standard_domain(lam: LambdaVector, basepoint=None, density: float = 2e-3) -> Domain:
    """The slit annulus described by ``lam`` (inner unit disc first, outer last)."""
    R = math.exp(lam.lambdas[0])
    comps = [Component.disc(0.0, 1.0, density)]
    for j, lj in enumerate(lam.lambdas[1:]):
        t0, t1 = lam.thetas[2 * j], lam.thetas[2 * j + 1]
        comps.append(Component.arc(0.0, math.exp(lj), t0, t1, density))
    comps.append(Component.outer_disc_complement(0.0, R, density))
    if basepoint is None:
        basepoint = math.exp(0.5 * lam.lambdas[0]) * np.exp(1j * _free_angle(lam))
    return validate_domain(comps, basepoint)


def _free_angle(lam: LambdaVector) -> float:
    """An argument on the middle circle far from every slit endpoint."""
    ends = np.asarray(lam.thetas, dtype=float)
    if ends.size == 0:
        return 0.0
    cand = np.linspace(0, 2 * np.pi, 360, endpoint=False)
    gap = np.min(np.abs(np.angle(np.exp(1j * (cand[:, None] - ends[None, :])))), axis=1)
    return float(cand[np.argmax(gap)])


# ---------------------------------------------------------------------------
# basis functions


@dataclass(frozen=True)
class _Block:
    """Terms of ``g`` attached to one component."""

    comp_index: int
    kind: str
    center: complex
    scale: float
    comp: Component


def _blocks(domain: Domain) -> list:
    out = []
    for j, c in enumerate(domain.components):
        if c.kind == "disc":
            out.append(_Block(j, "laurent", c.params["center"], c.params["radius"], c))
        elif c.kind == "circle_arc_slit":
            out.append(_Block(j, "arc", c.params["center"], c.params["radius"], c))
        elif c.kind == "polyline" and c.params["closed"]:
            cen = complex(np.mean(c.sample.points))
            out.append(_Block(j, "laurent", cen, float(np.max(np.abs(c.sample.points - cen))), c))
        elif c.kind == "outer_disc_complement":
            out.append(_Block(j, "taylor", c.params["center"], c.params["radius"], c))
        elif c.is_point:
            raise DegenerateComponent(f"component {j + 1} is a point")
        else:
            raise NotImplementedError(f"no expansion for component kind {c.kind!r}")
    return out


def _block_variable(block: _Block, z: np.ndarray):
    """Expansion variable ``t`` (with ``|t| >= 1`` near the component) and ``dt/dz``."""
    if block.kind == "arc":
        return arc_uniformizer(block.comp, z)
    t = (z - block.center) / block.scale
    return t, np.full(z.shape, 1.0 / block.scale, dtype=complex)


def _basis(blocks, N: int, z: np.ndarray, own: Optional[tuple] = None):
    """Columns of the analytic basis of ``g`` and of ``g'`` at ``z``.

    ``own = (block_position, t_values)`` overrides the expansion variable of
    one block, used on a slit where the variable is two-valued.
    """
    cols, dcols = [], []
    k = np.arange(1, N + 1)
    for b_pos, b in enumerate(blocks):
        if own is not None and own[0] == b_pos:
            t, dt = own[1], np.full(z.shape, np.nan, dtype=complex)
        else:
            t, dt = _block_variable(b, z)
        t = t[:, None]
        dt = dt[:, None]
        if b.kind == "taylor":
            cols.append(t ** k)
            dcols.append(k * t ** (k - 1) * dt)
        else:
            cols.append(t ** (-k))
            dcols.append(-k * t ** (-k - 1) * dt)
    return np.hstack(cols), np.hstack(dcols)


def _boundary_samples(block: _Block, m: int, shift: float = 0.0):
    """``m`` boundary points of a component and the override for its own variable."""
    th = 2 * np.pi * (np.arange(m) + shift) / m
    c = block.comp
    if block.kind == "arc":
        zeta = np.exp(1j * th)
        w = np.cos(th).astype(complex)
        z = arc_mobius(c).inverse().apply_array(w)
        return z, zeta
    if c.kind in ("disc", "outer_disc_complement"):
        return block.center + block.scale * np.exp(1j * th), None
    pts = c.sample.points
    ring = np.append(pts, pts[0])
    s = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(ring)))])
    t = s[-1] * (np.arange(m) + shift) / m
    return np.interp(t, s, ring.real) + 1j * np.interp(t, s, ring.imag), None


# ---------------------------------------------------------------------------
# the map


@dataclass
class CanonicalMap:
    """Fitted circular-slit annulus map of a pointed domain."""

    domain: Domain
    inner: int
    outer: int
    truncation: int
    blocks: list = field(repr=False)
    inner_point: complex
    coef: np.ndarray = field(repr=False)
    const: complex
    rotation: complex
    constants: np.ndarray
    Lambda: LambdaVector
    residual: float
    condition: float
    basepoint_image: complex
    _seed: object = field(default=None, repr=False)

    @property
    def labeling(self) -> dict:
        return {"inner": self.inner, "outer": self.outer}

    @property
    def slit_components(self) -> list:
        return [j for j in range(self.domain.n) if j not in (self.inner, self.outer)]

    def _g(self, z: np.ndarray):
        B, dB = _basis(self.blocks, self.truncation, z)
        return B @ self.coef + self.const, dB @ self.coef

    def forward(self, z, check: bool = True) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if check and np.any(self.domain.distance(z) <= 0):
            raise PointNotInDomain("point outside the domain")
        g, _ = self._g(z)
        return self.rotation * (z - self.inner_point) * np.exp(g)

    def derivative(self, z) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        g, dg = self._g(z)
        return self.rotation * np.exp(g) * (1 + (z - self.inner_point) * dg)

    def boundary_residual(self, m: Optional[int] = None, shift: float = 0.5) -> float:
        """Max deviation of ``log|phi|`` from its boundary constant on fresh samples."""
        m = m or _samples_per_component(self.truncation)
        worst = 0.0
        for pos, b in enumerate(self.blocks):
            z, own = _boundary_samples(b, m, shift)
            B, _ = _basis(self.blocks, self.truncation, z, None if own is None else (pos, own))
            val = np.log(np.abs(z - self.inner_point)) + np.real(B @ self.coef + self.const)
            worst = max(worst, float(np.max(np.abs(val - self.constants[b.comp_index]))))
        return worst


def _samples_per_component(N: int) -> int:
    return max(16 * N, 64)


def solve_canonical_map(domain: Domain, labeling: Optional[dict] = None, truncation: int = 16,
                        samples: Optional[int] = None) -> CanonicalMap:
    """Fit the circular-slit annulus map.

    ``labeling`` names the component sent to the closed unit disc
    (``inner``, default the first) and the one sent to the outside of the
    annulus (``outer``, default the last).
    """
    n = domain.n
    if n < 2:
        raise NotMultiplyConnected("the slit-annulus map needs n >= 2")
    for j, c in enumerate(domain.components):
        if c.is_point:
            raise DegenerateComponent(f"component {j + 1} is a point; the domain is degenerate")
    labeling = dict(labeling or {})
    inner = int(labeling.get("inner", 0))
    outer = int(labeling.get("outer", n - 1))
    if inner == outer or not (0 <= inner < n and 0 <= outer < n):
        raise ValueError("inner and outer labels must be distinct component indices")
    if outer != n - 1:
        raise NotImplementedError("the outer label must be the unbounded component")
    blocks = _blocks(domain)
    N = int(truncation)
    m = samples or _samples_per_component(N)
    c1 = _inner_point(domain.components[inner])

    rows_B, rhs, comp_of_row = [], [], []
    for pos, b in enumerate(blocks):
        z, own = _boundary_samples(b, m)
        B, _ = _basis(blocks, N, z, None if own is None else (pos, own))
        rows_B.append(B)
        rhs.append(-np.log(np.abs(z - c1)))
        comp_of_row.append(np.full(z.size, b.comp_index))
    B = np.vstack(rows_B)
    rhs = np.concatenate(rhs)
    comp_of_row = np.concatenate(comp_of_row)
    free = [j for j in range(n) if j != inner]
    K = np.zeros((B.shape[0], len(free)))
    for col, j in enumerate(free):
        K[comp_of_row == j, col] = -1.0
    A = np.hstack([B.real, -B.imag, np.ones((B.shape[0], 1)), K])
    scale = np.linalg.norm(A, axis=0)
    scale[scale == 0] = 1.0
    As = A / scale
    sv = np.linalg.svd(As, compute_uv=False)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
    if cond > COND_LIMIT:
        raise IllConditioned(f"condition number {cond:.3g} exceeds {COND_LIMIT:.0e}; lower the truncation")
    x, *_ = np.linalg.lstsq(As, rhs, rcond=None)
    x = x / scale
    nb = B.shape[1]
    coef = x[:nb] + 1j * x[nb:2 * nb]
    c0 = complex(x[2 * nb])
    kappa = np.zeros(n)
    kappa[free] = x[2 * nb + 1:]

    u = domain.basepoint
    tmp = CanonicalMap(domain, inner, outer, N, blocks, c1, coef, c0, 1.0 + 0j, kappa, None, 0.0, cond, 0j)
    d = tmp.derivative(np.array([u]))[0]
    rot = np.exp(-1j * np.angle(d))
    tmp.rotation = rot
    tmp.basepoint_image = complex(tmp.forward(np.array([u]), check=False)[0])
    tmp.Lambda = _lambda_vector(tmp)
    tmp.residual = max(_fit_residual(A, x, rhs), tmp.boundary_residual())
    if tmp.Lambda.lambdas[0] <= 0:
        raise IllConditioned("fitted outer constant is not positive; check the labeling")
    return tmp


def _inner_point(c: Component) -> complex:
    if c.kind == "disc":
        return c.params["center"]
    if c.kind == "polyline" and c.params["closed"]:
        cen = complex(np.mean(c.sample.points))
        if c.distance(np.array([cen]))[0] == 0:
            return cen
    return complex(c.witness)


def _fit_residual(A, x, rhs) -> float:
    return float(np.max(np.abs(A @ x - rhs)))


def _lambda_vector(cm: CanonicalMap) -> LambdaVector:
    n = cm.domain.n
    lambdas = [float(cm.constants[cm.outer])]
    thetas = []
    for j in cm.slit_components:
        lambdas.append(float(cm.constants[j]))
        pos = next(p for p, b in enumerate(cm.blocks) if b.comp_index == j)
        z, own = _boundary_samples(cm.blocks[pos], 4 * _samples_per_component(cm.truncation))
        if own is not None:
            B, _ = _basis(cm.blocks, cm.truncation, z, (pos, own))
            w = cm.rotation * (z - cm.inner_point) * np.exp(B @ cm.coef + cm.const)
        else:
            w = cm.forward(z, check=False)
        arg = np.angle(w)
        # the image is an arc; open the circle at the largest angular gap
        srt = np.sort(np.mod(arg, 2 * np.pi))
        gaps = np.diff(np.append(srt, srt[0] + 2 * np.pi))
        k = int(np.argmax(gaps))
        start = srt[(k + 1) % srt.size]
        span = float(np.max(np.mod(arg - start, 2 * np.pi)))
        t0 = float(np.angle(np.exp(1j * start)))
        thetas.extend([t0, t0 + span])
    return LambdaVector(tuple(lambdas), tuple(thetas), n)


def eval_forward(cm: CanonicalMap, z) -> np.ndarray:
    """``phi(z)`` for points of the domain."""
    return cm.forward(check_points(z))


def in_slit_annulus(cm: CanonicalMap, w, tol: float = 1e-9) -> np.ndarray:
    """Whether ``w`` lies in the open image domain, at least ``tol`` from its boundary."""
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    r = np.abs(w)
    ok = (r > 1 + tol) & (r < math.exp(cm.Lambda.lambdas[0]) - tol)
    for j, lam in enumerate(cm.Lambda.lambdas[1:]):
        t0, t1 = cm.Lambda.thetas[2 * j], cm.Lambda.thetas[2 * j + 1]
        rel = np.mod(np.angle(w) - t0, 2 * np.pi)
        on_arc = rel <= (t1 - t0)
        rs = math.exp(lam)
        near = np.abs(r - rs) <= tol
        ends = np.minimum(np.abs(w - rs * np.exp(1j * t0)), np.abs(w - rs * np.exp(1j * t1))) <= tol
        ok &= ~((on_arc & near) | ends)
    return ok


def _seed_table(cm: CanonicalMap, per_axis: int = 80):
    if cm._seed is None:
        x0, x1, y0, y1 = cm.domain.bbox()
        X, Y = np.meshgrid(np.linspace(x0, x1, per_axis), np.linspace(y0, y1, per_axis), indexing="ij")
        Z = (X + 1j * Y).ravel()
        gap = min((x1 - x0), (y1 - y0)) / per_axis
        Z = Z[cm.domain.distance(Z) > 0.5 * gap]
        cm._seed = (Z, cm.forward(Z, check=False))
    return cm._seed


def eval_inverse(cm: CanonicalMap, w, tol: float = 1e-13, max_iter: int = 60) -> np.ndarray:
    """``psi(w)``: Newton's method on ``phi(z) = w`` seeded from a forward-image table."""
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    if not np.all(in_slit_annulus(cm, w)):
        raise WOutsideRange("w must lie strictly inside the slit annulus")
    Zs, Ws = _seed_table(cm)
    out = np.empty(w.shape, dtype=complex)
    for i, wi in enumerate(w):
        order = np.argsort(np.abs(Ws - wi))[:5]
        for k in order:
            try:
                out[i] = _newton_inverse(cm, wi, Zs[k], tol, max_iter)
                break
            except NewtonDiverged:
                continue
        else:
            raise NewtonDiverged(f"Newton failed to invert w={wi}")
    return out


def _newton_inverse(cm: CanonicalMap, w: complex, z: complex, tol: float, max_iter: int) -> complex:
    scale = max(1.0, abs(z))
    f = cm.forward(np.array([z]), check=False)[0] - w
    for _ in range(max_iter):
        dz = -f / cm.derivative(np.array([z]))[0]
        s = 1.0
        while s > 1e-6:
            zn = z + s * dz
            if cm.domain.distance(np.array([zn]))[0] > 0:
                fn = cm.forward(np.array([zn]), check=False)[0] - w
                if abs(fn) < abs(f) or abs(fn) <= tol * max(1.0, abs(w)):
                    break
            s *= 0.5
        else:
            raise NewtonDiverged("no decrease along the Newton direction")
        z, f = zn, fn
        if abs(s * dz) <= tol * scale and abs(f) <= 1e3 * tol * max(1.0, abs(w)):
            return z
        if abs(f) <= tol * max(1.0, abs(w)):
            return z
    raise NewtonDiverged("Newton iteration did not converge")


def modulus_annulus(domain: Domain, truncation: int = 16) -> float:
    """``lambda^1`` of a doubly connected domain (its modulus is ``lambda^1 / 2 pi``)."""
    if domain.n != 2:
        raise ValueError("modulus_annulus needs a doubly connected domain")
    if any(c.is_point for c in domain.components):
        raise DegenerateComponent("a point component makes the modulus infinite")
    return solve_canonical_map(domain, truncation=truncation).Lambda.lambdas[0]


def eccentric_annulus_lambda(c: complex, r: float, C: complex = 0.0, R: float = 1.0, exact: bool = True) -> float:
    """``log`` of the ratio of radii after Mobius-normalising ``D(C,R)`` minus ``closed D(c,r)``.

    The disc automorphism ``T(z) = (z - a) / (1 - a z)`` that makes both
    circles concentric uses the real root ``a`` of
    ``a^2 c - a (1 + c^2 - r^2) + c = 0`` inside the unit disc.
    """
    # scale to the unit disc and rotate the inner centre onto the positive axis
    c = (complex(c) - complex(C)) / R
    r = r / R
    d = abs(c)
    if d + r >= 1:
        raise ValueError("inner disc must lie inside the outer one")
    if d < 1e-15:
        return math.log(1 / r)
    b = 1 + d * d - r * r
    a = 2 * d / (b + math.sqrt(b * b - 4 * d * d))
    rho = abs((d + r - a) / (1 - a * (d + r)))
    return math.log(1 / rho)


class SlitAnnulusMap(BaseEstimator):
    """Estimator for the circular-slit annulus map.

    ``fit`` takes a :class:`Domain`; ``transform`` applies ``phi`` and
    ``inverse_transform`` applies its inverse.
    """

    def __init__(self, truncation: int = 16, inner: int = 0, samples: Optional[int] = None):
        self.truncation = truncation
        self.inner = inner
        self.samples = samples

    def fit(self, domain: Domain, y=None):
        self.map_ = solve_canonical_map(domain, {"inner": self.inner}, self.truncation, self.samples)
        self.lambda_ = self.map_.Lambda
        self.coef_ = self.map_.coef
        self.residual_ = self.map_.residual
        return self

    def transform(self, z) -> np.ndarray:
        check_is_fitted(self, "map_")
        return eval_forward(self.map_, z)

    def inverse_transform(self, w) -> np.ndarray:
        check_is_fitted(self, "map_")
        return eval_inverse(self.map_, check_points(w))


def map_to_dict(cm: CanonicalMap) -> dict:
    """Plain-data description of a fitted map."""
    def c2(z):
        return [float(np.real(z)), float(np.imag(z))]

    return {
        "labeling": cm.labeling,
        "n": cm.domain.n,
        "lambdas": [float(v) for v in cm.Lambda.lambdas],
        "thetas": [float(v) for v in cm.Lambda.thetas],
        "truncation": cm.truncation,
        "inner_point": c2(cm.inner_point),
        "rotation": c2(cm.rotation),
        "const": c2(cm.const),
        "basepoint_image": c2(cm.basepoint_image),
        "residual": cm.residual,
        "condition": cm.condition,
        "blocks": [{"component": b.comp_index, "kind": b.kind, "center": c2(b.center), "scale": b.scale,
                    "coefficients": [c2(v) for v in cm.coef[i * cm.truncation:(i + 1) * cm.truncation]]}
                   for i, b in enumerate(cm.blocks)],
    }


def dump_map(cm: CanonicalMap, path) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(map_to_dict(cm), fh, indent=2, sort_keys=True)
        fh.write("\n")
