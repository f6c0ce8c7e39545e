"""Polytopal convex bodies in V-representation.

A :class:`ConvexBody` stores exactly the extreme points of its convex hull,
sorted lexicographically.  All other operations in the package (metrics,
selectors, group actions) are written against this canonical form.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Literal, Sequence

import numpy as np
from scipy.spatial import ConvexHull
from scipy.spatial.distance import pdist

from .config import TOL
from .errors import (
    DimensionMismatch,
    EmptyInput,
    NonpositiveScale,
    ParameterOutOfRange,
    ZeroDirection,
)

__all__ = [
    "ConvexBody",
    "BodyFamilyTag",
    "canonicalize",
    "dimension",
    "support",
    "point_distance",
    "hausdorff",
    "minkowski_combination",
    "diameter",
    "negate",
    "scale",
    "affine_frame",
    "polygon_distances",
]


def _as_points(points) -> np.ndarray:
    try:
        arr = np.array([np.asarray(p, dtype=float).ravel() for p in points], dtype=float)
    except ValueError as exc:  # ragged input
        raise DimensionMismatch("points do not share an ambient dimension") from exc
    if arr.size == 0 or arr.shape[0] == 0:
        raise EmptyInput("a convex body needs at least one point")
    if arr.ndim != 2 or arr.shape[1] == 0:
        raise DimensionMismatch("points must be vectors of a common positive length")
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite coordinates")
    return arr


def _scale_of(points: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(points))))


def affine_frame(points: np.ndarray, tol: float | None = None):
    """Base point and orthonormal basis (columns) of the affine hull of ``points``.

    Full-dimensional sets get the trivial frame (origin, identity) so that
    intrinsic coordinates coincide with ambient ones bit for bit.
    """
    tol = TOL.geom if tol is None else tol
    n = points.shape[1]
    base = points.mean(axis=0)
    centered = points - base
    if len(points) == 1:
        return points[0].copy(), np.zeros((n, 0))
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    k = int(np.sum(s > tol * _scale_of(points)))
    if k == n:
        return np.zeros(n), np.eye(n)
    return base, vt[:k].T.copy()


def _monotone_chain(y: np.ndarray, tol: float) -> list[int]:
    """Indices of the strict convex hull of planar points, counter-clockwise.

    The chain itself uses exact orientation signs; near-collinear vertices
    are pruned afterwards against their hull neighbours.  Applying the
    tolerance inside the chain is unsafe: points whose x-coordinates tie up
    to round-off can arrive out of order along a vertical edge.
    """
    order = np.lexsort((y[:, 1], y[:, 0]))
    pts = y[order]

    def cross(o, a, b):
        ox, oy = pts[o]
        return (pts[a][0] - ox) * (pts[b][1] - oy) - (pts[a][1] - oy) * (pts[b][0] - ox)

    lower: list[int] = []
    for i in range(len(pts)):
        while len(lower) >= 2 and cross(lower[-2], lower[-1], i) <= 0:
            lower.pop()
        lower.append(i)
    upper: list[int] = []
    for i in range(len(pts) - 1, -1, -1):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], i) <= 0:
            upper.pop()
        upper.append(i)
    hull = lower[:-1] + upper[:-1]

    pruned = True
    while pruned and len(hull) > 2:
        pruned = False
        for k in range(len(hull)):
            o, a, b = hull[k - 1], hull[k], hull[(k + 1) % len(hull)]
            span = np.hypot(pts[b][0] - pts[o][0], pts[b][1] - pts[o][1])
            # distance of a outside the chord o-b, so the cutoff is a length
            if cross(o, a, b) <= tol * max(span, 1e-300):
                del hull[k]
                pruned = True
                break
    return [int(order[i]) for i in hull]


def _dedup(points: np.ndarray, tol: float) -> np.ndarray:
    keep: list[int] = []
    for i, p in enumerate(points):
        if all(np.linalg.norm(p - points[j]) > tol for j in keep):
            keep.append(i)
    return points[keep]


def _lexsorted(points: np.ndarray) -> np.ndarray:
    order = np.lexsort(points.T[::-1])
    return points[order]


def _extreme_points(points: np.ndarray) -> np.ndarray:
    tol = TOL.geom * _scale_of(points)
    base, basis = affine_frame(points)
    k = basis.shape[1]
    if k == 0:
        return _lexsorted(points)[:1]
    y = (points - base) @ basis
    if k == 1:
        t = y[:, 0]
        lo, hi = np.argmin(t), np.argmax(t)
        if t[hi] - t[lo] <= tol:
            return _lexsorted(points)[:1]
        return points[[lo, hi]]
    if k == 2:
        cand = np.arange(len(points))
        if len(points) > 200:
            try:
                cand = ConvexHull(y).vertices
            except Exception:  # qhull precision trouble: fall back to the full set
                cand = np.arange(len(points))
        idx = _monotone_chain(y[cand], tol)
        return _dedup(points[cand][idx], tol)
    hull = ConvexHull(y)
    return _dedup(points[np.sort(hull.vertices)], tol)


class ConvexBody:
    """Compact convex polytope given by its extreme points.

    Construct with :func:`canonicalize` (or ``ConvexBody(points)``, which
    does the same); the stored vertex array is read-only and in
    lexicographic order.
    """

    def __init__(self, points: Iterable[Sequence[float]]):
        arr = _as_points(points)
        verts = _lexsorted(_extreme_points(arr))
        verts.setflags(write=False)
        self._vertices = verts

    @classmethod
    def _trusted(cls, vertices: np.ndarray) -> "ConvexBody":
        obj = cls.__new__(cls)
        v = np.array(vertices, dtype=float)
        v.setflags(write=False)
        obj._vertices = v
        return obj

    @property
    def vertices(self) -> np.ndarray:
        return self._vertices

    @property
    def dim_ambient(self) -> int:
        return self._vertices.shape[1]

    def __len__(self) -> int:
        return len(self._vertices)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConvexBody):
            return NotImplemented
        return self._vertices.shape == other._vertices.shape and bool(
            np.array_equal(self._vertices, other._vertices)
        )

    def __hash__(self) -> int:
        return hash(self._vertices.tobytes())

    def __repr__(self) -> str:
        return f"ConvexBody(n={self.dim_ambient}, vertices={self._vertices.tolist()!r})"

    @cached_property
    def frame(self):
        return affine_frame(self._vertices)

    @cached_property
    def dim(self) -> int:
        return self.frame[1].shape[1]

    @cached_property
    def intrinsic(self) -> np.ndarray:
        base, basis = self.frame
        return (self._vertices - base) @ basis

    @cached_property
    def scale(self) -> float:
        return _scale_of(self._vertices)

    @cached_property
    def loop(self) -> np.ndarray:
        """Vertices of a planar body as a closed counter-clockwise loop.

        Segments become a two-vertex loop and points a one-vertex loop, so
        the edge-projection distance kernel handles every planar body.
        """
        if self.dim_ambient != 2:
            raise DimensionMismatch("loop is defined for planar bodies only")
        v = self._vertices
        if len(v) <= 2:
            return v
        c = v.mean(axis=0)
        ang = np.arctan2(v[:, 1] - c[1], v[:, 0] - c[0])
        return v[np.argsort(ang, kind="stable")]

    @cached_property
    def solid(self) -> bool:
        return self.dim == self.dim_ambient

    @cached_property
    def _hull3(self):
        """Qhull of the intrinsic coordinates of a 3-dimensional body."""
        return ConvexHull(self.intrinsic)


def canonicalize(points: Iterable[Sequence[float]]) -> ConvexBody:
    """Convex hull extreme points of ``points`` in canonical order."""
    if isinstance(points, ConvexBody):
        return points
    return ConvexBody(points)


def dimension(body: ConvexBody) -> int:
    return body.dim


@dataclass(frozen=True)
class BodyFamilyTag:
    """Membership in K_{j-} (``at_most_j``), K_{j+} (``at_least_j``) or exact dimension."""

    kind: Literal["at_most_j", "at_least_j", "exactly_j"]
    j: int

    def contains(self, body: ConvexBody) -> bool:
        if not 0 <= self.j <= body.dim_ambient:
            raise ParameterOutOfRange(f"j={self.j} outside [0, {body.dim_ambient}]")
        d = body.dim
        if self.kind == "at_most_j":
            return d <= self.j
        if self.kind == "at_least_j":
            return d >= self.j
        if self.kind == "exactly_j":
            return d == self.j
        raise ValueError(f"unknown family kind {self.kind!r}")


def _unit(direction) -> np.ndarray:
    u = np.asarray(direction, dtype=float).ravel()
    nrm = float(np.linalg.norm(u))
    if nrm < TOL.direction_norm:
        raise ZeroDirection("direction has zero length")
    if abs(nrm - 1.0) > TOL.direction_norm:
        u = u / nrm
    return u


def support(body: ConvexBody, direction) -> tuple[float, np.ndarray]:
    """Support value h_K(u) and the lexicographically smallest maximizing vertex."""
    u = _unit(direction)
    if u.shape[0] != body.dim_ambient:
        raise DimensionMismatch("direction and body dimensions differ")
    vals = body.vertices @ u
    best = float(vals.max())
    i = int(np.flatnonzero(vals >= best - 1e-12 * body.scale)[0])
    return best, body.vertices[i].copy()


def polygon_distances(points: np.ndarray, loop: np.ndarray, solid: bool) -> np.ndarray:
    """Distances from planar ``points`` to the convex polygon with vertex ``loop``.

    Both arguments may carry leading batch axes (``(..., p, 2)`` and
    ``(..., q, 2)``); they broadcast against each other.  ``solid`` marks a
    two-dimensional polygon whose interior counts as distance zero.
    """
    lx, ly = loop[..., 0], loop[..., 1]
    ex = np.roll(lx, -1, axis=-1) - lx
    ey = np.roll(ly, -1, axis=-1) - ly
    # component-wise arithmetic: reductions over a length-2 axis are slow
    dx = points[..., :, None, 0] - lx[..., None, :]
    dy = points[..., :, None, 1] - ly[..., None, :]
    ex, ey = ex[..., None, :], ey[..., None, :]
    ee = ex * ex + ey * ey
    ee = np.where(ee > 0.0, ee, 1.0)
    t = np.clip((dx * ex + dy * ey) / ee, 0.0, 1.0)
    rx = dx - t * ex
    ry = dy - t * ey
    d2 = np.min(rx * rx + ry * ry, axis=-1)
    if solid:
        inside = np.all(ex * dy - ey * dx >= 0.0, axis=-1)
        d2 = np.where(inside, 0.0, d2)
    return np.sqrt(d2)


def _closest_on_triangle(p, a, b, c):
    # Ericson, Real-Time Collision Detection, 5.1.5
    ab, ac, ap = b - a, c - a, p - a
    d1, d2 = ab @ ap, ac @ ap
    if d1 <= 0 and d2 <= 0:
        return a
    bp = p - b
    d3, d4 = ab @ bp, ac @ bp
    if d3 >= 0 and d4 <= d3:
        return b
    vc = d1 * d4 - d3 * d2
    if vc <= 0 and d1 >= 0 and d3 <= 0:
        return a + ab * (d1 / (d1 - d3))
    cp = p - c
    d5, d6 = ab @ cp, ac @ cp
    if d6 >= 0 and d5 <= d6:
        return c
    vb = d5 * d2 - d1 * d6
    if vb <= 0 and d2 >= 0 and d6 <= 0:
        return a + ac * (d2 / (d2 - d6))
    va = d3 * d6 - d5 * d4
    if va <= 0 and (d4 - d3) >= 0 and (d5 - d6) >= 0:
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)))
    denom = 1.0 / (va + vb + vc)
    return a + ab * (vb * denom) + ac * (vc * denom)


def _closest_intrinsic(y: np.ndarray, body: ConvexBody) -> np.ndarray:
    """Nearest point of the body to ``y``, both in intrinsic coordinates."""
    k = body.dim
    V = body.intrinsic
    if k == 0:
        return np.zeros(0)
    if k == 1:
        t = V[:, 0]
        return np.clip(y, t.min(), t.max())
    if k == 2:
        if body.dim_ambient == 2:
            loop = body.loop
        else:
            c = V.mean(axis=0)
            loop = V[np.argsort(np.arctan2(V[:, 1] - c[1], V[:, 0] - c[0]))]
        edges = np.roll(loop, -1, axis=0) - loop
        diff = y - loop
        cross = edges[:, 0] * diff[:, 1] - edges[:, 1] * diff[:, 0]
        if np.all(cross >= 0.0):
            return y.copy()
        ee = np.sum(edges * edges, axis=1)
        t = np.clip(np.sum(diff * edges, axis=1) / ee, 0.0, 1.0)
        proj = loop + t[:, None] * edges
        j = int(np.argmin(np.sum((proj - y) ** 2, axis=1)))
        return proj[j]
    if k == 3:
        hull = body._hull3
        eq = hull.equations
        if np.all(eq[:, :3] @ y + eq[:, 3] <= 0.0):
            return y.copy()
        pts = hull.points
        best, best_d = None, np.inf
        for s in hull.simplices:
            q = _closest_on_triangle(y, pts[s[0]], pts[s[1]], pts[s[2]])
            d = float(np.sum((q - y) ** 2))
            if d < best_d:
                best, best_d = q, d
        return best
    return _closest_simplex_qp(y, V)


def _closest_simplex_qp(y: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Min ||V^T w - y|| over the probability simplex (dimension > 3 fallback)."""
    from scipy.optimize import minimize

    m = len(V)
    G = V @ V.T
    c = V @ y
    res = minimize(
        lambda w: 0.5 * w @ G @ w - c @ w,
        np.full(m, 1.0 / m),
        jac=lambda w: G @ w - c,
        bounds=[(0.0, 1.0)] * m,
        constraints=[{"type": "eq", "fun": lambda w: w.sum() - 1.0, "jac": lambda w: np.ones(m)}],
        method="SLSQP",
        options={"ftol": 1e-14, "maxiter": 500},
    )
    return res.x @ V


def point_distance(x, body: ConvexBody) -> tuple[float, np.ndarray]:
    """Euclidean distance from ``x`` to the body and the nearest body point."""
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != body.dim_ambient:
        raise DimensionMismatch("point and body dimensions differ")
    base, basis = body.frame
    y = (x - base) @ basis
    perp = (x - base) - basis @ y
    q = _closest_intrinsic(y, body)
    proj = base + basis @ q
    if body.dim == body.dim_ambient and np.array_equal(q, y):
        return 0.0, x.copy()
    dist = float(np.sqrt(np.sum((q - y) ** 2) + np.sum(perp ** 2)))
    return dist, proj


def _directed(A: ConvexBody, B: ConvexBody) -> float:
    if A.dim_ambient == 2:
        return float(polygon_distances(A.vertices, B.loop, B.solid).max())
    return max(point_distance(a, B)[0] for a in A.vertices)


def hausdorff(A: ConvexBody, B: ConvexBody) -> float:
    """Hausdorff distance; for polytopes the suprema are attained at vertices."""
    if A.dim_ambient != B.dim_ambient:
        raise DimensionMismatch("bodies live in different ambient dimensions")
    if A == B:
        return 0.0
    return max(_directed(A, B), _directed(B, A))


def minkowski_combination(A: ConvexBody, B: ConvexBody, t: float) -> ConvexBody:
    """The body (1 - t) A + t B."""
    if A.dim_ambient != B.dim_ambient:
        raise DimensionMismatch("bodies live in different ambient dimensions")
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ParameterOutOfRange(f"t={t} outside [0, 1]")
    if t == 0.0 or A == B:
        return A
    if t == 1.0:
        return B
    sums = (1.0 - t) * A.vertices[:, None, :] + t * B.vertices[None, :, :]
    return ConvexBody(sums.reshape(-1, A.dim_ambient))


def diameter(body: ConvexBody) -> float:
    if len(body) == 1:
        return 0.0
    return float(pdist(body.vertices).max())


def negate(body: ConvexBody) -> ConvexBody:
    return ConvexBody._trusted(_lexsorted(-body.vertices))


def scale(body: ConvexBody, c: float) -> ConvexBody:
    if not c > 0:
        raise NonpositiveScale(f"scale factor must be positive, got {c}")
    return ConvexBody._trusted(_lexsorted(c * body.vertices))
