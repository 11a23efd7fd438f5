"""Spherical geometry on the Riemann sphere.

The metric throughout is ``|dz| / (1 + |z|^2)``, i.e. the round sphere of
diameter ``pi/2`` seen through stereographic projection.  The point at
infinity is the singleton :data:`INF`; it is never encoded as a large float.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.spatial import cKDTree

from .exceptions import DegenerateTriple


class _Infinity:
    """The point at infinity of the extended complex plane."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()

SpherePoint = Union[complex, _Infinity]


def is_inf(p) -> bool:
    return p is INF


def as_point(p) -> SpherePoint:
    """Coerce ``p`` to a sphere point (complex or :data:`INF`)."""
    if p is INF:
        return INF
    if isinstance(p, str) and p.strip().lower() in ("inf", "infinity", "oo"):
        return INF
    if isinstance(p, (list, tuple)) and len(p) == 2:
        return complex(float(p[0]), float(p[1]))
    z = complex(p)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError("non-finite complex value; use INF for the point at infinity")
    return z


def sph_dist(p: SpherePoint, q: SpherePoint) -> float:
    """Geodesic distance for the density ``1/(1+|z|^2)``.

    Uses ``arctan(|p - q| / |1 + conj(p) q|)``, which is invariant under
    ``z -> 1/z`` and therefore accurate in both charts.
    """
    p, q = as_point(p), as_point(q)
    if p is INF and q is INF:
        return 0.0
    if p is INF or q is INF:
        z = q if p is INF else p
        return math.atan2(1.0, abs(z))
    return math.atan2(abs(p - q), abs(1.0 + p.conjugate() * q))


def sph_dist_array(z, w) -> np.ndarray:
    """Vectorised :func:`sph_dist` for finite complex arrays (broadcasting)."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return np.arctan2(np.abs(z - w), np.abs(1.0 + np.conj(z) * w))


def to_sphere(z, include_inf: bool = False) -> np.ndarray:
    """Stereographic embedding into the unit sphere of R^3.

    Chordal distance ``c`` between embedded points relates to
    :func:`sph_dist` by ``d = arcsin(c / 2)``.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    r2 = np.abs(z) ** 2
    pts = np.column_stack([2 * z.real, 2 * z.imag, r2 - 1.0]) / (1.0 + r2)[:, None]
    if include_inf:
        pts = np.vstack([pts, [0.0, 0.0, 1.0]])
    return pts


def chord_to_sph(c):
    return np.arcsin(np.clip(np.asarray(c) / 2.0, 0.0, 1.0))


def sph_to_chord(d):
    return 2.0 * np.sin(np.asarray(d))


@dataclass(frozen=True)
class MobiusMap:
    """``z -> (a z + b) / (c z + d)`` normalised to ``ad - bc = 1``."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if abs(det) == 0.0:
            raise ValueError("singular Mobius coefficients (ad - bc = 0)")
        s = np.sqrt(complex(det))
        object.__setattr__(self, "a", complex(self.a) / s)
        object.__setattr__(self, "b", complex(self.b) / s)
        object.__setattr__(self, "c", complex(self.c) / s)
        object.__setattr__(self, "d", complex(self.d) / s)

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(1, 0, 0, 1)

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def __call__(self, p):
        return apply_mobius(self, p)

    def __matmul__(self, other: "MobiusMap") -> "MobiusMap":
        """Composition ``self o other``."""
        return MobiusMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    def pole(self) -> SpherePoint:
        """The point sent to infinity."""
        if self.c == 0:
            return INF
        return -self.d / self.c

    def derivative(self, z):
        """Complex derivative ``1 / (c z + d)^2`` (finite, non-pole ``z``)."""
        z = np.asarray(z, dtype=complex)
        return 1.0 / (self.c * z + self.d) ** 2

    def apply_array(self, z) -> np.ndarray:
        """Vectorised evaluation on finite points.

        Images of the pole come back as ``complex(inf, nan)``; callers
        that can meet the pole must handle it explicitly.
        """
        z = np.asarray(z, dtype=complex)
        out = np.empty_like(z)
        big = np.abs(z) > 1.0
        with np.errstate(divide="ignore", invalid="ignore"):
            zs = z[~big]
            out[~big] = (self.a * zs + self.b) / (self.c * zs + self.d)
            zi = 1.0 / z[big]
            out[big] = (self.a + self.b * zi) / (self.c + self.d * zi)
        bad = ~np.isfinite(out)
        if np.any(bad):
            out[bad] = complex(np.inf, np.nan)
        return out


def apply_mobius(T: MobiusMap, p: SpherePoint) -> SpherePoint:
    """Evaluate ``T`` at a sphere point, switching charts at ``|z| = 1``."""
    p = as_point(p)
    if p is INF:
        if T.c == 0:
            return INF
        return T.a / T.c
    if abs(p) <= 1.0:
        den = T.c * p + T.d
        if den == 0:
            return INF
        return (T.a * p + T.b) / den
    w = 1.0 / p
    den = T.c + T.d * w
    if den == 0:
        return INF
    return (T.a + T.b * w) / den


def mobius_to_standard_triple(z1: SpherePoint, z2: SpherePoint, z3: SpherePoint) -> MobiusMap:
    """The Mobius map with ``z1 -> 0``, ``z2 -> 1``, ``z3 -> INF``."""
    z1, z2, z3 = as_point(z1), as_point(z2), as_point(z3)
    pts = [z1, z2, z3]
    for i in range(3):
        for j in range(i + 1, 3):
            pi, pj = pts[i], pts[j]
            if (pi is INF and pj is INF) or (
                pi is not INF and pj is not INF and abs(pi - pj) <= 1e-14 * max(1.0, abs(pi))
            ):
                raise DegenerateTriple(f"coincident points {pi!r}, {pj!r}")
    # cross ratio (z - z1)(z2 - z3) / ((z - z3)(z2 - z1)), with the factors
    # involving an infinite point dropped
    if z1 is INF:
        return MobiusMap(0, z2 - z3, 1, -z3)
    if z2 is INF:
        return MobiusMap(1, -z1, 1, -z3)
    if z3 is INF:
        return MobiusMap(1, -z1, 0, z2 - z1)
    return MobiusMap(z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1))


def mobius_from_triples(src, dst) -> MobiusMap:
    """Map sending ``src[k] -> dst[k]`` for three distinct pairs."""
    S = mobius_to_standard_triple(*src)
    D = mobius_to_standard_triple(*dst)
    return D.inverse() @ S


@dataclass(frozen=True)
class CompactSample:
    """Finite sample of a compact subset of the sphere.

    ``points`` holds the finite samples; ``includes_infinity`` marks that
    the point at infinity belongs to the sample as well.  ``density`` is
    the declared bound on the spherical gap between consecutive samples.
    """

    points: np.ndarray
    kind: str = "polyline-region"
    density: float = 0.01
    includes_infinity: bool = False
    closed: bool = True
    _tree: object = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        pts = np.atleast_1d(np.asarray(self.points, dtype=complex)).ravel()
        object.__setattr__(self, "points", pts)
        if pts.size == 0 and not self.includes_infinity:
            raise ValueError("compact sample must be nonempty")
        if self.kind == "singleton" and pts.size + int(self.includes_infinity) != 1:
            raise ValueError("singleton sample must hold exactly one point")
        if self.density <= 0:
            raise ValueError("density must be positive")

    def __len__(self):
        return self.points.size + int(self.includes_infinity)

    def embedded(self) -> np.ndarray:
        return to_sphere(self.points, include_inf=self.includes_infinity)

    @property
    def tree(self) -> cKDTree:
        if self._tree is None:
            object.__setattr__(self, "_tree", cKDTree(self.embedded()))
        return self._tree

    def max_gap(self) -> float:
        """Largest spherical gap between consecutive samples."""
        if self.points.size < 2:
            return 0.0
        p = self.points
        if self.closed:
            p = np.append(p, p[0])
        return float(np.max(sph_dist_array(p[:-1], p[1:])))

    def distance_to(self, z) -> np.ndarray:
        """Spherical distance from finite points ``z`` to the sample."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        c, _ = self.tree.query(to_sphere(z))
        return chord_to_sph(c)

    def mapped(self, T: MobiusMap) -> "CompactSample":
        """Image under a Mobius map (the density is not re-certified)."""
        pts = T.apply_array(self.points)
        finite = np.isfinite(pts)
        extra = np.array([T.a / T.c]) if (self.includes_infinity and T.c != 0) else np.array([], complex)
        has_inf = bool(np.any(~finite)) or (self.includes_infinity and T.c == 0)
        return CompactSample(np.concatenate([pts[finite], extra]), self.kind, self.density,
                             includes_infinity=has_inf, closed=self.closed)

    def union(self, other: "CompactSample") -> "CompactSample":
        return CompactSample(
            np.concatenate([self.points, other.points]),
            "polyline-region",
            max(self.density, other.density),
            includes_infinity=self.includes_infinity or other.includes_infinity,
            closed=False,
        )


def _refine_until(fn, length_guess: int, density: float, closed: bool) -> np.ndarray:
    n = max(8, int(length_guess))
    for _ in range(30):
        pts = fn(n)
        p = np.append(pts, pts[0]) if closed else pts
        gap = float(np.max(sph_dist_array(p[:-1], p[1:]))) if p.size > 1 else 0.0
        if gap <= density:
            return pts
        n = int(math.ceil(n * gap / density * 1.05)) + 1
    return pts


def circle_sample(center: complex, radius: float, density: float = 0.005, kind: str = "disc") -> CompactSample:
    """Samples of the circle ``|z - center| = radius``."""
    center = complex(center)

    def fn(n):
        t = 2 * np.pi * np.arange(n) / n
        return center + radius * np.exp(1j * t)

    guess = 2 * np.pi * radius / density
    return CompactSample(_refine_until(fn, guess, density, True), kind, density)


def arc_sample(center: complex, radius: float, theta0: float, theta1: float,
               density: float = 0.005) -> CompactSample:
    """Samples of the arc from ``theta0`` counter-clockwise to ``theta1``."""
    center = complex(center)
    span = (theta1 - theta0) % (2 * np.pi)

    def fn(n):
        t = theta0 + span * np.arange(n) / max(n - 1, 1)
        return center + radius * np.exp(1j * t)

    guess = span * radius / density + 2
    return CompactSample(_refine_until(fn, guess, density, False), "slit-arc", density, closed=False)


def polyline_sample(vertices, closed: bool = True, density: float = 0.005) -> CompactSample:
    v = np.asarray(vertices, dtype=complex)
    if closed and v.size > 1 and v[0] == v[-1]:
        v = v[:-1]
    ring = np.append(v, v[0]) if closed else v

    def fn(n):
        seg = np.abs(np.diff(ring))
        s = np.concatenate([[0.0], np.cumsum(seg)])
        total = s[-1]
        if total == 0:
            return v[:1]
        t = np.linspace(0.0, total, n, endpoint=not closed)
        t = np.unique(np.concatenate([t, s[:-1] if closed else s]))
        return np.interp(t, s, ring.real) + 1j * np.interp(t, s, ring.imag)

    guess = np.sum(np.abs(np.diff(ring))) / density + 2
    return CompactSample(_refine_until(fn, guess, density, closed), "polyline-region", density, closed=closed)


def singleton_sample(p: SpherePoint) -> CompactSample:
    p = as_point(p)
    if p is INF:
        return CompactSample(np.array([], dtype=complex), "singleton", 1e-12, includes_infinity=True)
    return CompactSample(np.array([p]), "singleton", 1e-12)


def directed_hausdorff(A: CompactSample, B: CompactSample) -> float:
    """``sup_{a in A} inf_{b in B} d#(a, b)`` on the samples."""
    c, _ = B.tree.query(A.embedded())
    return float(chord_to_sph(np.max(c)))


def hausdorff_dist(A: CompactSample, B: CompactSample) -> float:
    """Spherical Hausdorff distance between two sampled compact sets."""
    if len(A) == 0 or len(B) == 0:
        raise ValueError("Hausdorff distance needs nonempty samples")
    return max(directed_hausdorff(A, B), directed_hausdorff(B, A))
