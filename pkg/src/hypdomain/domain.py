"""Finitely connected pointed domains described by their complement components.

A domain is a basepoint together with an ordered list of closed complement
components ``K^1 .. K^n``; the last one is the unbounded component.  Each
component carries exact geometry (for distances, containment and
single-component hyperbolic models) and a boundary :class:`CompactSample`.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .exceptions import (
    BasepointInComplement,
    CurveTouchesComplement,
    EmptyComponent,
    NotMultiplyConnected,
    OverlappingComponents,
    PointNotInDomain,
)
from .sphere import (
    INF,
    CompactSample,
    MobiusMap,
    arc_sample,
    as_point,
    circle_sample,
    mobius_from_triples,
    mobius_to_standard_triple,
    polyline_sample,
    singleton_sample,
    sph_dist,
    sph_dist_array,
)

log = logging.getLogger(__name__)

KINDS = ("disc", "circle_arc_slit", "point", "polyline", "outer_disc_complement")
DEFAULT_DENSITY = 2e-3


def _wrap(theta):
    return np.mod(theta, 2 * np.pi)


def _segment_distance(z, a, b):
    """Distance from points ``z`` (shape (m,)) to segments ``a->b`` (shape (k,))."""
    z = z[:, None]
    ab = b - a
    denom = np.abs(ab) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.real((z - a) * np.conj(ab)) / np.where(denom == 0, 1.0, denom)
    t = np.clip(t, 0.0, 1.0)
    return np.min(np.abs(z - (a + t * ab)), axis=1)


def _point_in_polygon(z, ring):
    """Even-odd rule; ``ring`` closed (first == last)."""
    x, y = z.real[:, None], z.imag[:, None]
    xa, ya = ring.real[:-1], ring.imag[:-1]
    xb, yb = ring.real[1:], ring.imag[1:]
    cond = (ya > y) != (yb > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = xa + (y - ya) * (xb - xa) / (yb - ya)
    return np.sum(cond & (x < xint), axis=1) % 2 == 1


@dataclass(frozen=True)
class Component:
    """One closed complement component.

    ``kind`` is one of ``disc``, ``circle_arc_slit``, ``point``,
    ``polyline`` (a closed vertex list is a filled polygon, an open one a
    polygonal slit) or ``outer_disc_complement``.
    """

    kind: str
    params: dict
    sample: CompactSample = field(repr=False)

    # --- construction -------------------------------------------------
    @classmethod
    def disc(cls, center, radius, density=DEFAULT_DENSITY):
        if not radius > 0:
            raise EmptyComponent("disc radius must be positive; use a point component")
        return cls("disc", {"center": complex(center), "radius": float(radius)},
                   circle_sample(center, radius, density, kind="disc"))

    @classmethod
    def outer_disc_complement(cls, center, radius, density=DEFAULT_DENSITY):
        if not radius > 0:
            raise EmptyComponent("outer radius must be positive")
        s = circle_sample(center, radius, density, kind="polyline-region")
        s = CompactSample(s.points, s.kind, s.density, includes_infinity=True)
        return cls("outer_disc_complement", {"center": complex(center), "radius": float(radius)}, s)

    @classmethod
    def arc(cls, center, radius, theta0, theta1, density=DEFAULT_DENSITY):
        span = (theta1 - theta0) % (2 * np.pi)
        if not radius > 0 or span < 1e-9 or abs(span - 2 * np.pi) < 1e-12:
            raise EmptyComponent("slit arc must have positive radius and a proper angular span")
        p = {"center": complex(center), "radius": float(radius), "theta0": float(theta0),
             "theta1": float(theta0 + span)}
        return cls("circle_arc_slit", p, arc_sample(center, radius, theta0, theta0 + span, density))

    @classmethod
    def point(cls, z):
        z = as_point(z)
        return cls("point", {"z": z}, singleton_sample(z))

    @classmethod
    def polyline(cls, vertices, density=DEFAULT_DENSITY):
        v = np.asarray([as_point(p) for p in vertices], dtype=complex)
        if v.size < 2:
            raise EmptyComponent("polyline needs at least two vertices")
        closed = v.size > 3 and v[0] == v[-1]
        ring = v if closed else v
        return cls("polyline", {"vertices": ring, "closed": bool(closed)},
                   polyline_sample(ring, closed=closed, density=density))

    # --- basic properties ---------------------------------------------
    @property
    def unbounded(self) -> bool:
        return self.kind == "outer_disc_complement" or (self.kind == "point" and self.params["z"] is INF)

    @property
    def is_point(self) -> bool:
        return self.kind == "point"

    @property
    def witness(self):
        """A point of the component, used for winding numbers."""
        k, p = self.kind, self.params
        if k == "disc":
            return p["center"]
        if k == "point":
            return p["z"]
        if k == "circle_arc_slit":
            mid = 0.5 * (p["theta0"] + p["theta1"])
            return p["center"] + p["radius"] * np.exp(1j * mid)
        if k == "polyline":
            return complex(p["vertices"][0])
        return INF

    @property
    def center(self) -> complex:
        """Expansion centre for Laurent bases (centroid for polygons)."""
        k, p = self.kind, self.params
        if k in ("disc", "outer_disc_complement", "circle_arc_slit"):
            return p["center"]
        if k == "point":
            return p["z"]
        return complex(np.mean(self.sample.points))

    # --- geometry -----------------------------------------------------
    def distance(self, z) -> np.ndarray:
        """Euclidean distance from finite points to the component (0 inside)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        k, p = self.kind, self.params
        if k == "disc":
            return np.maximum(np.abs(z - p["center"]) - p["radius"], 0.0)
        if k == "outer_disc_complement":
            return np.maximum(p["radius"] - np.abs(z - p["center"]), 0.0)
        if k == "point":
            if p["z"] is INF:
                return np.full(z.shape, np.inf)
            return np.abs(z - p["z"])
        if k == "circle_arc_slit":
            c, r, t0, t1 = p["center"], p["radius"], p["theta0"], p["theta1"]
            rel = _wrap(np.angle(z - c) - t0)
            inside = rel <= (t1 - t0)
            d_circle = np.abs(np.abs(z - c) - r)
            e0 = c + r * np.exp(1j * t0)
            e1 = c + r * np.exp(1j * t1)
            d_end = np.minimum(np.abs(z - e0), np.abs(z - e1))
            return np.where(inside, np.minimum(d_circle, d_end), d_end)
        v = p["vertices"]
        ring = np.append(v, v[0]) if p["closed"] and v[0] != v[-1] else v
        d = _segment_distance(z, ring[:-1], ring[1:])
        if p["closed"]:
            d = np.where(_point_in_polygon(z, ring), 0.0, d)
        return d

    def contains(self, z, tol: float = 0.0) -> np.ndarray:
        return self.distance(z) <= tol

    def model_density(self, z) -> np.ndarray:
        """Hyperbolic density of the complement of this component alone.

        A point uses ``1 / (r log(1 + R/r))`` with ``R = params['reach']``,
        which matches the punctured disc of radius ``R`` as ``r -> 0`` and
        stays smooth and bounded far away.  Values outside the model's
        domain are ``nan``.
        """
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        k, p = self.kind, self.params
        with np.errstate(divide="ignore", invalid="ignore"):
            if k == "disc":
                out = 2 * p["radius"] / (np.abs(z - p["center"]) ** 2 - p["radius"] ** 2)
            elif k == "outer_disc_complement":
                out = 2 * p["radius"] / (p["radius"] ** 2 - np.abs(z - p["center"]) ** 2)
            elif k == "circle_arc_slit":
                zeta, dzeta = arc_uniformizer(self, z)
                out = 2 * np.abs(dzeta) / (np.abs(zeta) ** 2 - 1.0)
            elif k == "point":
                if p["z"] is INF:
                    return np.full(z.shape, np.nan)
                reach = p.get("reach", 1.0)
                r = np.abs(z - p["z"])
                out = 1.0 / (r * np.log1p(reach / r))
            else:
                out = 1.0 / self.distance(z)
        out = np.where(np.isfinite(out) & (out > 0), out, np.nan)
        return out

    def mobius_image(self, T: MobiusMap) -> "Component":
        """Image of the component under ``T`` (polylines are mapped vertex-wise)."""
        k, p = self.kind, self.params
        dens = self.sample.density
        if k == "point":
            return Component.point(T(p["z"]))
        if k == "polyline":
            return Component.polyline(T.apply_array(p["vertices"]), density=dens)
        c, r = p["center"], p["radius"]
        pole = T.pole()
        if k == "circle_arc_slit":
            ts = np.linspace(p["theta0"], p["theta1"], 3)
            a, m, b = (T(c + r * np.exp(1j * t)) for t in ts)
            if INF in (a, m, b):
                raise NotImplementedError("arc through the pole of the normalising map")
            cc, rr = _circumcircle(a, m, b)
            t0 = np.angle(a - cc)
            tm = _wrap(np.angle(m - cc) - t0)
            t1 = _wrap(np.angle(b - cc) - t0)
            if tm <= t1:
                return Component.arc(cc, rr, t0, t0 + t1, density=dens)
            return Component.arc(cc, rr, np.angle(b - cc), np.angle(b - cc) + (2 * np.pi - t1), density=dens)
        pts = [T(c + r * np.exp(2j * np.pi * t / 3)) for t in range(3)]
        if INF in pts:
            raise NotImplementedError("circle through the pole of the normalising map")
        cc, rr = _circumcircle(*pts)
        pole_inside = pole is not INF and abs(pole - c) < r
        if k == "disc":
            if pole_inside:
                return Component.outer_disc_complement(cc, rr, density=dens)
            return Component.disc(cc, rr, density=dens)
        # outer complement: the pole lies in U or inside the outer component
        if pole is INF or abs(pole - c) < r:
            return Component.outer_disc_complement(cc, rr, density=dens)
        return Component.disc(cc, rr, density=dens)

    # --- serialisation ------------------------------------------------
    def to_dict(self) -> dict:
        k, p = self.kind, self.params

        def c2(z):
            return "inf" if z is INF else [float(np.real(z)), float(np.imag(z))]

        if k in ("disc", "outer_disc_complement"):
            return {"kind": k, "center": c2(p["center"]), "radius": p["radius"]}
        if k == "circle_arc_slit":
            return {"kind": k, "center": c2(p["center"]), "radius": p["radius"],
                    "theta0": p["theta0"], "theta1": p["theta1"]}
        if k == "point":
            return {"kind": k, "z": c2(p["z"])}
        v = list(p["vertices"])
        return {"kind": k, "vertices": [c2(z) for z in v]}

    @classmethod
    def from_dict(cls, d: dict, density=DEFAULT_DENSITY) -> "Component":
        kind = d["kind"]
        if kind == "disc":
            return cls.disc(as_point(d["center"]), d["radius"], density)
        if kind == "outer_disc_complement":
            return cls.outer_disc_complement(as_point(d["center"]), d["radius"], density)
        if kind == "circle_arc_slit":
            return cls.arc(as_point(d["center"]), d["radius"], d["theta0"], d["theta1"], density)
        if kind == "point":
            return cls.point(as_point(d["z"]))
        if kind == "polyline":
            return cls.polyline([as_point(v) for v in d["vertices"]], density)
        raise ValueError(f"unknown component kind {kind!r}; expected one of {KINDS}")


def _circumcircle(a, b, c):
    d = 2 * (a.real * (b.imag - c.imag) + b.real * (c.imag - a.imag) + c.real * (a.imag - b.imag))
    if abs(d) < 1e-300:
        raise NotImplementedError("collinear image points: circle mapped to a line")
    aa, bb, cc = abs(a) ** 2, abs(b) ** 2, abs(c) ** 2
    ux = (aa * (b.imag - c.imag) + bb * (c.imag - a.imag) + cc * (a.imag - b.imag)) / d
    uy = (aa * (c.real - b.real) + bb * (a.real - c.real) + cc * (b.real - a.real)) / d
    center = complex(ux, uy)
    return center, abs(a - center)


def arc_mobius(comp: Component) -> MobiusMap:
    """Mobius map sending a slit arc onto ``[-1, 1]``."""
    p = comp.params
    c, r, t0, t1 = p["center"], p["radius"], p["theta0"], p["theta1"]
    far = c + r * np.exp(1j * (0.5 * (t0 + t1) + np.pi))
    return mobius_from_triples(
        (c + r * np.exp(1j * t0), c + r * np.exp(1j * t1), far), (-1.0, 1.0, INF)
    )


def arc_uniformizer(comp: Component, z):
    """Conformal map of the arc's complement onto ``|zeta| > 1`` and its derivative."""
    M = arc_mobius(comp)
    z = np.asarray(z, dtype=complex)
    w = M.apply_array(z)
    s = np.sqrt(w - 1.0) * np.sqrt(w + 1.0)
    zeta = w + s
    with np.errstate(divide="ignore", invalid="ignore"):
        dzeta = (1.0 + w / s) * M.derivative(z)
    return zeta, dzeta


@dataclass(frozen=True)
class Separation:
    """Bipartition of the complement; ``e_side`` holds bounded-side indices (0-based)."""

    e_side: frozenset
    n: int
    nontrivial: bool = True
    principal_index: Optional[int] = None

    @property
    def f_side(self) -> frozenset:
        return frozenset(range(self.n)) - self.e_side

    @property
    def mask(self) -> int:
        return sum(1 << i for i in self.e_side)

    @property
    def principal(self) -> bool:
        return self.principal_index is not None

    def __str__(self):
        e = ",".join(str(i + 1) for i in sorted(self.e_side))
        return f"E={{{e}}}"


@dataclass(frozen=True)
class ClosedCurve:
    """Closed polyline; ``vertices`` repeats the first vertex at the end."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.atleast_1d(np.asarray(self.vertices, dtype=complex)).ravel()
        if v.size == 0:
            raise ValueError("empty curve")
        if v.size == 1 or v[0] != v[-1]:
            v = np.append(v, v[0])
        object.__setattr__(self, "vertices", v)

    @property
    def points(self) -> np.ndarray:
        """Distinct vertices (without the closing repeat)."""
        return self.vertices[:-1] if self.vertices.size > 1 else self.vertices

    def __len__(self):
        return self.points.size

    @property
    def signed_area(self) -> float:
        z = self.vertices
        return 0.5 * float(np.sum(z.real[:-1] * z.imag[1:] - z.real[1:] * z.imag[:-1]))

    @property
    def orientation(self) -> int:
        return 1 if self.signed_area >= 0 else -1

    def reversed(self) -> "ClosedCurve":
        return ClosedCurve(self.vertices[::-1])

    def roll(self, k: int) -> "ClosedCurve":
        return ClosedCurve(np.roll(self.points, k))

    def refined(self, factor: int = 2) -> "ClosedCurve":
        """Insert ``factor - 1`` evenly spaced points on every edge."""
        z = self.vertices
        t = np.arange(factor) / factor
        pts = (z[:-1, None] + t[None, :] * (z[1:] - z[:-1])[:, None]).ravel()
        return ClosedCurve(pts)

    def euclidean_length(self) -> float:
        return float(np.sum(np.abs(np.diff(self.vertices))))

    def centroid(self) -> complex:
        return complex(np.mean(self.points))

    def resampled(self, n: int) -> "ClosedCurve":
        """``n`` points evenly spaced in Euclidean arclength."""
        z = self.vertices
        s = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(z)))])
        t = np.linspace(0.0, s[-1], n, endpoint=False)
        return ClosedCurve(np.interp(t, s, z.real) + 1j * np.interp(t, s, z.imag))

    def is_simple(self) -> bool:
        return not curve_self_intersects(self.points)

    def mapped(self, f) -> "ClosedCurve":
        return ClosedCurve(f(self.points))


def curve_self_intersects(z: np.ndarray) -> bool:
    """Proper intersection test among non-adjacent edges of a closed polyline."""
    n = z.size
    if n < 4:
        return False
    a = z
    b = np.roll(z, -1)
    i, j = np.triu_indices(n, k=2)
    keep = ~((i == 0) & (j == n - 1))
    i, j = i[keep], j[keep]
    p, r = a[i], b[i] - a[i]
    q, s = a[j], b[j] - a[j]

    def cross(u, v):
        return u.real * v.imag - u.imag * v.real

    rxs = cross(r, s)
    qp = q - p
    with np.errstate(divide="ignore", invalid="ignore"):
        t = cross(qp, s) / rxs
        u = cross(qp, r) / rxs
    hit = (rxs != 0) & (t >= 0) & (t <= 1) & (u >= 0) & (u <= 1)
    return bool(np.any(hit))


@dataclass(frozen=True)
class Domain:
    """Pointed domain: complement components (unbounded last) and a basepoint.

    ``normalization`` records the Mobius map applied at validation time when
    the point at infinity was in the domain (``None`` otherwise).
    """

    components: tuple
    basepoint: complex
    normalization: Optional[MobiusMap] = None

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def bounded(self) -> tuple:
        return self.components[:-1]

    @property
    def outer(self) -> Component:
        return self.components[-1]

    @property
    def nondegenerate(self) -> bool:
        return not any(c.is_point for c in self.components)

    def distance(self, z) -> np.ndarray:
        """Euclidean distance from finite points to the complement."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return np.min(np.vstack([c.distance(z) for c in self.components]), axis=0)

    def component_distances(self, z) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return np.vstack([c.distance(z) for c in self.components])

    def contains(self, z, tol: float = 0.0) -> np.ndarray:
        return self.distance(z) > tol

    def complement_sample(self) -> CompactSample:
        s = self.components[0].sample
        for c in self.components[1:]:
            s = s.union(c.sample)
        return s

    def bbox(self, pad: float = 0.0):
        """Bounding box of the finite chart; requires a disc-complement outer component."""
        o = self.outer
        if o.kind != "outer_disc_complement":
            raise ValueError("working chart is unbounded: the last component must be an outer disc complement")
        c, r = o.params["center"], o.params["radius"]
        return (c.real - r - pad, c.real + r + pad, c.imag - r - pad, c.imag + r + pad)

    def boundary_model(self, z, power: float = 4.0) -> np.ndarray:
        """Smooth maximum of the single-component model densities at ``z``.

        Each component contributes the density of the sphere minus that
        component alone (for a point, a punctured-disc model reaching to
        the nearest other component).  The contributions are combined as
        ``(sum lambda_j**p)**(1/p)``, which equals the dominant term up to a
        relative ``O(delta**p)`` near each component and is smooth where two
        models cross.
        """
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        vals = []
        for i, c in enumerate(self.components):
            if c.is_point and c.params["z"] is not INF:
                others = [o for j, o in enumerate(self.components) if j != i]
                reach = min(float(o.distance(np.array([c.params["z"]]))[0]) for o in others) if others else 1.0
                c = Component("point", {"z": c.params["z"], "reach": reach}, c.sample)
            vals.append(c.model_density(z))
        V = np.vstack(vals)
        top = np.nanmax(V, axis=0)
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = np.nan_to_num(V / top, nan=0.0)
        return top * np.sum(ratio ** power, axis=0) ** (1.0 / power)

    def with_basepoint(self, u) -> "Domain":
        return validate_domain(self.components, u)

    def to_dict(self) -> dict:
        u = self.basepoint
        return {"components": [c.to_dict() for c in self.components],
                "basepoint": [float(u.real), float(u.imag)]}


def validate_domain(components: Sequence, basepoint, density: float = DEFAULT_DENSITY) -> Domain:
    """Build a :class:`Domain`, reporting the first violated invariant."""
    comps = [c if isinstance(c, Component) else Component.from_dict(c, density) for c in components]
    if not comps:
        raise EmptyComponent("a domain needs at least one complement component")
    for c in comps:
        if len(c.sample) == 0:
            raise EmptyComponent(f"{c.kind} component has no samples")
    u = as_point(basepoint)
    if u is INF:
        raise BasepointInComplement("basepoint at infinity; normalise the domain first")
    unb = [i for i, c in enumerate(comps) if c.unbounded]
    if len(unb) > 1:
        raise OverlappingComponents("more than one component contains infinity")
    T = None
    if not unb:
        comps, u, T = _normalize_infinity(comps, u)
    elif unb[0] != len(comps) - 1:
        raise ValueError("the unbounded component must be listed last")
    for c in comps:
        d = c.distance(np.array([u]))[0]
        if d <= 0.0:
            raise BasepointInComplement(f"basepoint {u} lies in a {c.kind} component")
    for (i, a), (j, b) in combinations(enumerate(comps), 2):
        if _components_overlap(a, b):
            raise OverlappingComponents(f"components {i + 1} and {j + 1} intersect")
    return Domain(tuple(comps), complex(u), T)


def _finite_pts(c: Component) -> np.ndarray:
    return c.sample.points


def _components_overlap(a: Component, b: Component) -> bool:
    pa, pb = _finite_pts(a), _finite_pts(b)
    if a.unbounded and b.unbounded:
        return True
    if pa.size and np.any(b.distance(pa) <= 0.0):
        return True
    if pb.size and np.any(a.distance(pb) <= 0.0):
        return True
    if pa.size and pb.size:
        gap = np.min(b.sample.distance_to(pa))
        if gap <= 0.0:
            return True
    return False


def _normalize_infinity(comps, u):
    """Send a point of the last component to infinity (the point at infinity lies in U).

    The witness of ``K^1`` goes to 0, the basepoint to 1 and the witness of
    ``K^n`` to infinity.
    """
    z1 = comps[0].witness if len(comps) > 1 else comps[0].sample.points[0]
    T = mobius_to_standard_triple(z1, u, comps[-1].witness)
    new = [c.mobius_image(T) for c in comps]
    log.info("point at infinity lies in the domain; applied normalising Mobius map %s", T)
    return new, T(u), T


def load_domain(path) -> Domain:
    """Read a domain specification file (JSON or YAML)."""
    import yaml

    text = Path(path).read_text()
    data = yaml.safe_load(text)
    return domain_from_dict(data)


def domain_from_dict(data: dict) -> Domain:
    comps = []
    for d in data["components"]:
        d = dict(d)
        if "params" in d:
            d.update(d.pop("params"))
        comps.append(Component.from_dict(d, data.get("density", DEFAULT_DENSITY)))
    return validate_domain(comps, as_point(data["basepoint"]))


def save_domain(domain: Domain, path) -> None:
    Path(path).write_text(json.dumps(domain.to_dict(), indent=2) + "\n")


# ---------------------------------------------------------------------------
# separations and winding numbers


def separation_count(n: int) -> int:
    return 2 ** (n - 1) - 1


def principal_count(n: int) -> int:
    return min(n, separation_count(n))


def _make_sep(domain: Domain, e_side: frozenset, principal_index=None) -> Separation:
    n = domain.n
    f_side = frozenset(range(n)) - e_side

    def single_point(side):
        return len(side) == 1 and domain.components[next(iter(side))].is_point

    return Separation(e_side, n, not (single_point(e_side) or single_point(f_side)), principal_index)


def enumerate_separations(domain: Domain) -> list:
    """All ``2^(n-1) - 1`` separations, principal candidates first.

    The ``i``-th principal candidate isolates ``K^i``; for the unbounded
    component this is the separation with every bounded component on the
    bounded side.
    """
    n = domain.n
    if n < 2:
        raise NotMultiplyConnected("separations need connectivity n >= 2")
    bounded = range(n - 1)
    principal = []
    seen = set()
    for i in range(n):
        e = frozenset([i]) if i < n - 1 else frozenset(bounded)
        if e in seen:
            continue
        seen.add(e)
        principal.append(_make_sep(domain, e, principal_index=i))
    rest = []
    for mask in range(1, 2 ** (n - 1)):
        e = frozenset(i for i in bounded if mask >> i & 1)
        if e not in seen:
            rest.append(_make_sep(domain, e))
    return principal + rest


def separation_for(domain: Domain, e_side) -> Separation:
    e = frozenset(e_side)
    for s in enumerate_separations(domain):
        if s.e_side == e:
            return s
    raise ValueError(f"{sorted(e)} is not a separation of a {domain.n}-connected domain")


def winding_numbers(vertices, points) -> np.ndarray:
    """Discrete argument sum of a closed polyline about each point."""
    z = np.asarray(vertices, dtype=complex)
    if z[0] != z[-1]:
        z = np.append(z, z[0])
    w = np.atleast_1d(np.asarray(points, dtype=complex))
    d = z[None, :] - w[:, None]
    ang = np.angle(d[:, 1:] / d[:, :-1])
    return np.rint(np.sum(ang, axis=1) / (2 * np.pi)).astype(int)


def winding_signature(curve: ClosedCurve, domain: Domain, tol: float = 0.0) -> np.ndarray:
    """Winding numbers of ``curve`` about each bounded component."""
    z = curve.vertices
    mids = 0.5 * (z[:-1] + z[1:])
    clearance = float(np.min(domain.distance(np.concatenate([z, mids]))))
    if clearance <= tol:
        raise CurveTouchesComplement(f"curve comes within {clearance:.3g} of the complement")
    wit = np.array([c.witness for c in domain.bounded], dtype=complex)
    if wit.size == 0:
        return np.zeros(0, dtype=int)
    return winding_numbers(z, wit)


def signature_separation(signature, domain: Domain) -> Optional[Separation]:
    """Separation realised by a simple curve's signature; ``None`` if trivial."""
    sig = np.asarray(signature)
    if np.all(sig == 0):
        return None
    if np.all(sig <= 0):
        sig = -sig
    if not np.all((sig == 0) | (sig == 1)):
        raise ValueError(f"signature {sig.tolist()} is not that of a simple closed curve")
    return separation_for(domain, np.flatnonzero(sig == 1).tolist())


def expected_signature(sep: Separation) -> np.ndarray:
    sig = np.zeros(sep.n - 1, dtype=int)
    sig[list(sep.e_side)] = 1
    return sig


def boundary_distance(domain: Domain, z) -> float:
    """Spherical distance from ``z`` to the complement samples."""
    z = as_point(z)
    if z is INF:
        raise PointNotInDomain("infinity is in the complement after normalisation")
    if domain.distance(np.array([z]))[0] <= 0.0:
        raise PointNotInDomain(f"{z} is not in the domain")
    best = math.inf
    for c in domain.components:
        if c.sample.includes_infinity:
            best = min(best, sph_dist(z, INF))
        if c.sample.points.size:
            best = min(best, float(np.min(sph_dist_array(z, c.sample.points))))
    return best


def boundary_distance_array(domain: Domain, z) -> np.ndarray:
    """Vectorised spherical distance to complement samples (no domain check)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    return domain.complement_sample().distance_to(z)


# ---------------------------------------------------------------------------
# convenience constructors used across the package


def disc_domain(radius: float = 1.0, basepoint=0.0, center=0.0) -> Domain:
    return validate_domain([Component.outer_disc_complement(center, radius)], basepoint)


def annulus_domain(r: float, R: float, basepoint=None, center=0.0) -> Domain:
    if basepoint is None:
        basepoint = center + math.sqrt(r * R)
    inner = Component.point(center) if r == 0 else Component.disc(center, r)
    return validate_domain([inner, Component.outer_disc_complement(center, R)], basepoint)
