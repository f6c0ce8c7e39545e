"""Invariant-point selectors: maps from bodies to points that commute with a group.

centroid, Löwner center and John center commute with every affine map;
circumcenter, Chebyshev point and Steiner point commute with similarities.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, Delaunay

from .body import ConvexBody, canonicalize
from .config import TOL
from .errors import DegenerateBody, NoConvergence, UnsupportedDimension
from .transforms import GroupTag

__all__ = [
    "SelectorId",
    "Ellipsoid",
    "HalfspaceRep",
    "to_halfspaces",
    "centroid",
    "circumball",
    "chebyshev",
    "steiner",
    "steiner_by_quadrature",
    "lowner",
    "john",
    "evaluate",
]


class SelectorId(str, Enum):
    CENTROID = "centroid"
    CHEBYSHEV = "chebyshev"
    CIRCUMCENTER = "circumcenter"
    STEINER = "steiner"
    LOWNER_CENTER = "lowner_center"
    JOHN_CENTER = "john_center"

    @property
    def declared_group(self) -> GroupTag:
        if self in (SelectorId.CENTROID, SelectorId.LOWNER_CENTER, SelectorId.JOHN_CENTER):
            return GroupTag.AFF
        return GroupTag.SIM

    @property
    def needs_full_dimension(self) -> bool:
        return self in (SelectorId.CHEBYSHEV, SelectorId.LOWNER_CENTER, SelectorId.JOHN_CENTER)


@dataclass(frozen=True, eq=False)
class Ellipsoid:
    """The set {x : (x - center)^T shape (x - center) <= 1}."""

    center: np.ndarray
    shape: np.ndarray

    def contains(self, points, slack: float = 0.0) -> np.ndarray:
        d = np.atleast_2d(points) - self.center
        return np.einsum("ij,jk,ik->i", d, self.shape, d) <= 1.0 + slack

    @property
    def semi_axes(self) -> np.ndarray:
        return 1.0 / np.sqrt(np.linalg.eigvalsh(self.shape))


@dataclass(frozen=True, eq=False)
class HalfspaceRep:
    """Body = {x : normals @ x <= offsets}, rows of ``normals`` unit length."""

    normals: np.ndarray
    offsets: np.ndarray

    def __len__(self):
        return len(self.offsets)

    def slack(self, points) -> np.ndarray:
        return self.offsets - np.atleast_2d(points) @ self.normals.T


def _require_full(body: ConvexBody, what: str):
    if body.dim < body.dim_ambient:
        raise DegenerateBody(f"{what} needs a full-dimensional body (dim {body.dim} < {body.dim_ambient})")


def to_halfspaces(body: ConvexBody) -> HalfspaceRep:
    """Irredundant facet description of a full-dimensional body."""
    _require_full(body, "to_halfspaces")
    V = body.vertices
    if body.dim_ambient == 1:
        return HalfspaceRep(np.array([[-1.0], [1.0]]), np.array([-V.min(), V.max()]))
    if body.dim_ambient == 2:
        loop = body.loop
        edges = np.roll(loop, -1, axis=0) - loop
        normals = np.column_stack([edges[:, 1], -edges[:, 0]])
        normals /= np.linalg.norm(normals, axis=1)[:, None]
    else:
        eq = ConvexHull(V).equations[:, :-1]
        normals: list[np.ndarray] = []
        for a in eq / np.linalg.norm(eq, axis=1)[:, None]:
            if not any(np.linalg.norm(a - b) <= 1e-9 for b in normals):
                normals.append(a)
        normals = np.array(normals)
    offsets = (V @ normals.T).max(axis=0)
    return HalfspaceRep(normals, offsets)


# -- centroid -------------------------------------------------------------

def _lift(body: ConvexBody, y: np.ndarray) -> np.ndarray:
    base, basis = body.frame
    return base + basis @ y


def centroid(body: ConvexBody) -> np.ndarray:
    """Barycenter for k-dimensional volume on the body's affine hull."""
    k = body.dim
    V = body.intrinsic
    if k == 0:
        return body.vertices[0].copy()
    if k == 1:
        t = V[:, 0]
        return _lift(body, np.array([(t.min() + t.max()) / 2.0]))
    if k == 2:
        if body.dim_ambient == 2:
            loop = body.loop
        else:
            c = V.mean(axis=0)
            loop = V[np.argsort(np.arctan2(V[:, 1] - c[1], V[:, 0] - c[0]))]
        p0 = loop[0]
        a, b = loop[1:-1] - p0, loop[2:] - p0
        areas = 0.5 * (a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0])
        cents = (loop[0] + loop[1:-1] + loop[2:]) / 3.0
        return _lift(body, (areas @ cents) / areas.sum())
    tri = Delaunay(V)
    simp = V[tri.simplices]
    vols = np.abs(np.linalg.det(simp[:, 1:] - simp[:, :1]))
    cents = simp.mean(axis=1)
    return _lift(body, (vols @ cents) / vols.sum())


# -- circumball (Welzl) ---------------------------------------------------

def _ball_through(support: list[np.ndarray]):
    p0 = support[0]
    if len(support) == 1:
        return p0.copy(), 0.0
    A = np.array(support[1:]) - p0
    rhs = 0.5 * np.sum(A * A, axis=1)
    x = np.linalg.lstsq(A @ A.T, rhs, rcond=None)[0]
    c = p0 + A.T @ x
    return c, float(max(np.linalg.norm(p - c) for p in support))


def _welzl(points: np.ndarray, count: int, support: list[np.ndarray], n: int, eps: float):
    if support:
        c, r = _ball_through(support)
    else:
        c, r = None, -1.0
    if len(support) == n + 1:
        return c, r
    for i in range(count):
        p = points[i]
        if c is None or np.linalg.norm(p - c) > r + eps:
            c, r = _welzl(points, i, support + [p], n, eps)
    return c, r


def circumball(body: ConvexBody) -> tuple[np.ndarray, float]:
    """Smallest enclosing ball of the vertices."""
    V = body.vertices
    if len(V) == 1:
        return V[0].copy(), 0.0
    # fixed-seed shuffle keeps Welzl's expected linear time and determinism
    order = np.random.default_rng(0).permutation(len(V))
    eps = 1e-12 * body.scale
    c, r = _welzl(V[order], len(V), [], body.dim_ambient, eps)
    r = float(np.max(np.linalg.norm(V - c, axis=1)))
    return c, r


# -- Chebyshev point ------------------------------------------------------

def _vertices_of(H: HalfspaceRep, offsets: np.ndarray, tol: float) -> np.ndarray:
    n = H.normals.shape[1]
    combos = np.array(list(itertools.combinations(range(len(offsets)), n)))
    A = H.normals[combos]
    b = offsets[combos]
    det = np.linalg.det(A)
    ok = np.abs(det) > 1e-12
    sol = np.linalg.solve(A[ok], b[ok][..., None])[..., 0]
    feasible = np.all(sol @ H.normals.T <= offsets + tol, axis=1)
    return sol[feasible]


def chebyshev(body: ConvexBody) -> tuple[np.ndarray, float]:
    """Center and radius of the largest inscribed ball.

    When the optimal centers form a face, its barycenter is returned.
    """
    _require_full(body, "chebyshev")
    H = to_halfspaces(body)
    n = body.dim_ambient
    cost = np.zeros(n + 1)
    cost[-1] = -1.0
    res = linprog(
        cost,
        A_ub=np.hstack([H.normals, np.ones((len(H), 1))]),
        b_ub=H.offsets,
        bounds=[(None, None)] * n + [(0, None)],
        method="highs",
    )
    if not res.success:
        raise NoConvergence(f"Chebyshev LP failed: {res.message}")
    r = float(res.x[-1])
    tol = TOL.geom * body.scale
    for _ in range(6):
        pts = _vertices_of(H, H.offsets - r, tol)
        if len(pts):
            break
        tol *= 10.0
    else:
        return res.x[:n].copy(), r
    face = canonicalize(pts)
    return centroid(face), r


# -- Steiner point --------------------------------------------------------

def _arc_moment(a: float, delta: float) -> np.ndarray:
    """Integral of u u^T over the arc [a, a + delta] of the unit circle."""
    b = a + delta
    s = (np.sin(2 * b) - np.sin(2 * a)) / 4.0
    c = (np.cos(2 * a) - np.cos(2 * b)) / 4.0
    return np.array([[delta / 2 + s, c], [c, delta / 2 - s]])


def _steiner_planar(loop: np.ndarray) -> np.ndarray:
    """(1/pi) * integral of h(u) u over the circle, split over vertex normal cones."""
    if len(loop) == 1:
        return loop[0].copy()
    edges = np.roll(loop, -1, axis=0) - loop
    phi = np.arctan2(-edges[:, 0], edges[:, 1])  # outward normal angles
    total = np.zeros(2)
    for j in range(len(loop)):
        start = phi[j - 1]
        delta = (phi[j] - start) % (2 * np.pi)
        total += _arc_moment(start, delta) @ loop[j]
    return total / np.pi


def _solid_angle(a, b, c) -> float:
    num = abs(np.dot(a, np.cross(b, c)))
    den = 1.0 + a @ b + b @ c + c @ a
    return 2.0 * np.arctan2(num, den)


def _steiner_spatial(V: np.ndarray) -> np.ndarray:
    """Vertices weighted by the solid angle of their normal cones over 4 pi."""
    hull = ConvexHull(V)
    normals: list[np.ndarray] = []
    for eq in hull.equations:
        a = eq[:3] / np.linalg.norm(eq[:3])
        if not any(np.linalg.norm(a - b) <= 1e-9 for b in normals):
            normals.append(a)
    N = np.array(normals)
    offsets = (V @ N.T).max(axis=0)
    tol = 1e-9 * max(1.0, float(np.abs(V).max()))
    point = np.zeros(3)
    for v in V:
        cone = N[np.abs(v @ N.T - offsets) <= tol]
        axis = cone.sum(axis=0)
        axis /= np.linalg.norm(axis)
        e1 = np.cross(axis, [1.0, 0.0, 0.0])
        if np.linalg.norm(e1) < 0.5:
            e1 = np.cross(axis, [0.0, 1.0, 0.0])
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(axis, e1)
        order = np.argsort(np.arctan2(cone @ e2, cone @ e1))
        cone = cone[order]
        omega = sum(_solid_angle(cone[0], cone[i], cone[i + 1]) for i in range(1, len(cone) - 1))
        point += omega / (4 * np.pi) * v
    return point


def steiner(body: ConvexBody) -> np.ndarray:
    """Steiner point, normalized so that the Steiner point of a ball is its center.

    The Steiner point is intrinsic to the affine hull, so it is computed in
    intrinsic coordinates: exact normal-cone arc integrals in the plane and
    exterior solid angles in space.
    """
    if body.dim_ambient > 3:
        raise UnsupportedDimension("Steiner point implemented for n <= 3")
    k = body.dim
    V = body.intrinsic
    if k == 0:
        return body.vertices[0].copy()
    if k == 1:
        t = V[:, 0]
        return _lift(body, np.array([(t.min() + t.max()) / 2.0]))
    if k == 2:
        if body.dim_ambient == 2:
            return _steiner_planar(body.loop)
        c = V.mean(axis=0)
        loop = V[np.argsort(np.arctan2(V[:, 1] - c[1], V[:, 0] - c[0]))]
        return _lift(body, _steiner_planar(loop))
    return _lift(body, _steiner_spatial(V))


def steiner_by_quadrature(body: ConvexBody, nodes: int | None = None) -> tuple[np.ndarray, float]:
    """Steiner point by direct quadrature of the support function.

    Planar bodies use the trapezoid rule on ``nodes`` equally spaced angles
    (default 10^6); spatial bodies use the 5810-node Lebedev rule.  The
    second return value is the change against a coarser rule, as an error
    estimate.
    """
    n = body.dim_ambient
    V = body.vertices
    if n == 2:
        nodes = nodes or 1_000_000

        def rule(m):
            th = np.linspace(0.0, 2 * np.pi, m, endpoint=False)
            U = np.column_stack([np.cos(th), np.sin(th)])
            h = np.max(U @ V.T, axis=1)
            return (h @ U) * (2 * np.pi / m) / np.pi

        fine = rule(nodes)
        return fine, float(np.linalg.norm(fine - rule(nodes // 2)))
    if n == 3:
        from scipy.integrate import lebedev_rule

        def rule(order):
            x, w = lebedev_rule(order)
            h = np.max(x.T @ V.T, axis=1)
            return (w * h) @ x.T / (4 * np.pi / 3)

        fine = rule(nodes or 131)
        return fine, float(np.linalg.norm(fine - rule(101)))
    raise UnsupportedDimension("Steiner quadrature implemented for n in {2, 3}")


# -- Löwner ellipsoid (Khachiyan with away steps) -------------------------

def lowner(body: ConvexBody, tol: float | None = None, max_iter: int | None = None) -> Ellipsoid:
    """Minimum-volume enclosing ellipsoid of the vertices."""
    _require_full(body, "lowner")
    tol = TOL.lowner_gap if tol is None else tol
    max_iter = TOL.lowner_max_iter if max_iter is None else max_iter
    P = body.vertices
    m, n = P.shape
    Q = np.hstack([P, np.ones((m, 1))])
    d = n + 1
    u = np.full(m, 1.0 / m)
    for _ in range(max_iter):
        X = (Q.T * u) @ Q
        M = np.einsum("ij,ji->i", Q, np.linalg.solve(X, Q.T))
        up = int(np.argmax(M))
        live = np.flatnonzero(u > 0)
        down = int(live[np.argmin(M[live])])
        gain, loss = M[up] / d - 1.0, 1.0 - M[down] / d
        if max(gain, loss) <= tol:
            break
        if gain >= loss:
            tau = (M[up] - d) / (d * (M[up] - 1.0))
            u *= 1.0 - tau
            u[up] += tau
        else:
            tau = min((d - M[down]) / (d * (M[down] - 1.0)), u[down] / (1.0 - u[down]))
            u *= 1.0 + tau
            u[down] = max(u[down] - tau, 0.0)
    else:
        raise NoConvergence(f"Khachiyan iteration did not reach gap {tol} in {max_iter} steps")
    c = u @ P
    S = (P.T * u) @ P - np.outer(c, c)
    shape = np.linalg.inv(S) / n
    diff = P - c
    worst = float(np.max(np.einsum("ij,jk,ik->i", diff, shape, diff)))
    shape = shape / worst  # every vertex inside, at least one on the boundary
    return Ellipsoid(c, 0.5 * (shape + shape.T))


# -- John ellipsoid (log-det barrier, Newton) -----------------------------

def _sym_basis(n: int) -> np.ndarray:
    basis = []
    for i in range(n):
        for j in range(i, n):
            S = np.zeros((n, n))
            S[i, j] = S[j, i] = 1.0
            basis.append(S)
    return np.array(basis)


def john(body: ConvexBody, tol: float | None = None, max_newton: int | None = None) -> Ellipsoid:
    """Maximum-volume inscribed ellipsoid c + E B^n, returned with shape (E E^T)^{-1}."""
    _require_full(body, "john")
    tol = TOL.john_grad if tol is None else tol
    max_newton = TOL.john_max_newton if max_newton is None else max_newton
    H = to_halfspaces(body)
    n = body.dim_ambient
    # work in coordinates where the Chebyshev ball is the unit ball
    c0, r0 = chebyshev(body)
    A, b = H.normals, (H.offsets - H.normals @ c0) / r0
    basis = _sym_basis(n)
    p = len(basis)
    # B[i] maps the coefficient vector of E to E a_i
    B = np.einsum("kab,ib->iak", basis, A)
    x = np.concatenate([np.linalg.lstsq(basis.reshape(p, -1).T, (0.5 * np.eye(n)).ravel(), rcond=None)[0], np.zeros(n)])
    theta = 2.0 * len(b)

    def unpack(x):
        return np.tensordot(x[:p], basis, axes=1), x[p:]

    def value(x, t):
        E, c = unpack(x)
        try:
            L = np.linalg.cholesky(E)
        except np.linalg.LinAlgError:
            return np.inf
        s = b - A @ c
        w = np.einsum("iak,k->ia", B, x[:p])
        D = s * s - np.sum(w * w, axis=1)
        if np.any(s <= 0) or np.any(D <= 0):
            return np.inf
        return -t * 2.0 * np.sum(np.log(np.diag(L))) - np.sum(np.log(D))

    def derivatives(x, t):
        E, c = unpack(x)
        Einv = np.linalg.inv(E)
        s = b - A @ c
        w = np.einsum("iak,k->ia", B, x[:p])
        D = s * s - np.sum(w * w, axis=1)
        EiS = np.einsum("ab,kbc->kac", Einv, basis)
        grad = np.zeros(p + n)
        hess = np.zeros((p + n, p + n))
        grad[:p] = -t * np.einsum("kaa->k", EiS)
        hess[:p, :p] = t * np.einsum("kab,lba->kl", EiS, EiS)
        # per-constraint Jacobian of (w_i, s_i) with respect to (e, c)
        J = np.zeros((len(b), n + 1, p + n))
        J[:, :n, :p] = B
        J[:, n, p:] = -A
        gu = np.concatenate([2 * w, -2 * s[:, None]], axis=1) / D[:, None]
        grad += np.einsum("iu,iux->x", gu, J)
        eye = np.diag(np.r_[np.full(n, 2.0), -2.0])
        hu = eye[None] / D[:, None, None] + np.einsum("iu,iv->iuv", gu, gu)
        hess += np.einsum("iux,iuv,ivy->xy", J, hu, J)
        return grad, hess

    t = 1.0
    steps = 0
    while True:
        while True:
            grad, hess = derivatives(x, t)
            dx = -np.linalg.solve(hess, grad)
            dec = float(-grad @ dx)
            f0, step = value(x, t), 1.0
            # below this the decrement is rounding noise in f
            if dec / 2.0 <= 1e-13 * max(1.0, abs(f0)) or np.linalg.norm(grad) <= tol * 1e-3 * (1.0 + t):
                break
            f1 = value(x + step * dx, t)
            while f1 > f0 - 0.25 * step * dec:
                step *= 0.5
                if step < 1e-16:
                    break
                f1 = value(x + step * dx, t)
            # an accepted step that cannot lower f means we are at rounding level
            if step < 1e-16 or not f1 < f0:
                break
            x = x + step * dx
            steps += 1
            if steps > max_newton:
                raise NoConvergence("John ellipsoid Newton iterations exhausted")
        if theta / t <= tol:
            break
        t *= 10.0
    E, c = unpack(x)
    E, c = r0 * E, c0 + r0 * c
    shape = np.linalg.inv(E @ E.T)
    return Ellipsoid(c, 0.5 * (shape + shape.T))


# -- dispatch -------------------------------------------------------------

def evaluate(selector, body: ConvexBody) -> np.ndarray:
    """The point selected by ``selector`` for ``body``."""
    sel = SelectorId(selector)
    if sel is SelectorId.CENTROID:
        return centroid(body)
    if sel is SelectorId.CIRCUMCENTER:
        return circumball(body)[0]
    if sel is SelectorId.CHEBYSHEV:
        return chebyshev(body)[0]
    if sel is SelectorId.STEINER:
        return steiner(body)
    if sel is SelectorId.LOWNER_CENTER:
        return lowner(body).center
    return john(body).center
