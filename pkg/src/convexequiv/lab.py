"""Worked examples: segment midpoints, the shrinking-triangle obstruction,
properness bounds for similarities, and bodies of constant width."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .body import ConvexBody, diameter, hausdorff, minkowski_combination, negate
from .errors import DegenerateBody, DegenerateSegment, InvalidDelta, NotConstantWidth, SamplingStarvation, UnsupportedDimension
from .selectors import centroid
from .symmetry import AffineSubspace, fixed_point_set, stabilizer
from .transforms import AffineTransform, GroupTag, sim_decompose

__all__ = [
    "MidpointReport",
    "segment_midpoint_demo",
    "TriangleRow",
    "TriangleTable",
    "triangle_counterexample",
    "ThinSetReport",
    "thin_bound_check",
    "width",
    "widths",
    "WidthReport",
    "width_report",
    "is_constant_width",
    "constant_width_convexity_check",
    "reuleaux_triangle",
    "regular_polygon",
    "fibonacci_sphere",
]


# -- segments ---------------------------------------------------------------

@dataclass(frozen=True)
class MidpointReport:
    midpoint: np.ndarray
    stabilizer_order: int
    fixed_set: AffineSubspace
    distance: float

    @property
    def ok(self) -> bool:
        return self.fixed_set.dim == 0 and self.distance <= 1e-8


def segment_midpoint_demo(a, b) -> MidpointReport:
    """Midpoint of [a, b] against the fixed set of the segment's isometry stabilizer."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or np.linalg.norm(a - b) <= 1e-12 * max(1.0, np.linalg.norm(a)):
        raise DegenerateSegment("segment endpoints coincide")
    seg = ConvexBody([a, b])
    stab = stabilizer(seg, GroupTag.EUCLIDEAN)
    fixed = fixed_point_set(stab)
    mid = 0.5 * (a + b)
    return MidpointReport(mid, len(stab), fixed, float(np.linalg.norm(fixed.base - mid)) if fixed.dim == 0 else np.inf)


# -- triangles collapsing onto a segment --------------------------------------

@dataclass(frozen=True)
class TriangleRow:
    n: int
    cx: float
    cy: float
    closed_form_error: float
    hausdorff_to_segment: float
    gap_to_midpoint: float


@dataclass(frozen=True)
class TriangleTable:
    rows: tuple[TriangleRow, ...]
    midpoint: tuple[float, float]
    limit: tuple[float, float]
    terminal_gap: float

    def row(self, n: int) -> TriangleRow:
        return self.rows[n - 1]


def triangle_counterexample(n_max: int) -> TriangleTable:
    """Centroids of T_n = conv{(0,0), (1/n,0), (0,1)} as T_n -> I = {0} x [0,1].

    T_n converges to I in the Hausdorff metric while the centroids converge
    to (0, 1/3), away from the only isometry-compatible value (0, 1/2) on I.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    segment = ConvexBody([[0.0, 0.0], [0.0, 1.0]])
    mid = np.array([0.0, 0.5])
    rows = []
    for n in range(1, n_max + 1):
        T = ConvexBody([[0.0, 0.0], [1.0 / n, 0.0], [0.0, 1.0]])
        c = centroid(T)
        exact = np.array([1.0 / (3 * n), 1.0 / 3.0])
        rows.append(TriangleRow(
            n, float(c[0]), float(c[1]),
            float(np.linalg.norm(c - exact)),
            hausdorff(T, segment),
            float(np.linalg.norm(c - mid)),
        ))
    # the centroid error decays like 1/n; extrapolate from the last two rows
    if n_max == 1:
        limit = np.array([rows[0].cx, rows[0].cy])
    else:
        r1, r2 = rows[-2], rows[-1]
        c1, c2 = np.array([r1.cx, r1.cy]), np.array([r2.cx, r2.cy])
        limit = (r2.n * c2 - r1.n * c1) / (r2.n - r1.n)
    return TriangleTable(tuple(rows), (0.0, 0.5), tuple(float(v) for v in limit),
                         float(np.linalg.norm(limit - mid)))


# -- properness of the similarity action ---------------------------------------

@dataclass(frozen=True)
class ThinSetReport:
    m: float
    delta: float
    M: float
    lambda_interval: tuple[float, float]
    translation_bound: float
    violations: int
    trials: int
    attempts: int
    lambda_seen: tuple[float, float]
    max_translation_seen: float

    @property
    def ok(self) -> bool:
        return self.violations == 0


def _perturbed(A: ConvexBody, delta: float, rng) -> ConvexBody:
    """A body within Hausdorff distance delta of A: jittered vertices plus a few interior points."""
    n = A.dim_ambient
    V = A.vertices
    k = int(rng.integers(0, 4))
    w = rng.dirichlet(np.ones(len(V)), size=k)
    pts = np.vstack([V, w @ V])

    def ball(count):
        d = rng.standard_normal((count, n))
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        return d * (delta * rng.random((count, 1)) ** (1.0 / n))

    return ConvexBody(pts + 0.999 * ball(len(pts)))


def thin_bound_check(A: ConvexBody, delta: float, trials: int = 1000, seed: int = 0,
                     max_attempts_per_trial: int = 1000) -> ThinSetReport:
    """Sample pairs (B, g) with B and gB both delta-close to A; check the scale and shift bounds.

    Each similarity is built as a random stabilizer element of A followed by
    a perturbation about the centroid of A whose range just overshoots the
    admissible set, then rejection-filtered.
    """
    delta = float(delta)
    m = diameter(A)
    if not (delta > 0 and m - 2 * delta > 0):
        raise InvalidDelta(f"need 0 < delta < diam/2 = {m / 2}")
    n = A.dim_ambient
    lam_lo, lam_hi = (m - 2 * delta) / (m + 2 * delta), (m + 2 * delta) / (m - 2 * delta)
    analytic_M = float(np.linalg.norm(A.vertices, axis=1).max()) + delta
    stab = stabilizer(A, GroupTag.EUCLIDEAN).elements
    c = centroid(A)
    span = 2.0 * delta / m

    accepted = []
    attempts = 0
    sampled_M = 0.0
    for t in range(trials):
        rng = np.random.default_rng(seed + t)
        for _ in range(max_attempts_per_trial):
            attempts += 1
            B = _perturbed(A, delta, rng)
            if hausdorff(B, A) >= delta:
                continue
            h = stab[int(rng.integers(len(stab)))]
            # one intensity for all three parts keeps some draws near the boundary
            reach = span * rng.random()
            lam = float(np.exp(rng.uniform(-reach, reach)))
            if n == 2:
                ang = rng.uniform(-reach, reach)
                R = np.array([[np.cos(ang), -np.sin(ang)], [np.sin(ang), np.cos(ang)]])
            else:
                # small rotation via a skew-symmetric generator
                W = rng.uniform(-reach, reach, size=(n, n))
                W = W - W.T
                R, upper = np.linalg.qr(np.eye(n) + W)
                R = R * np.sign(np.diag(upper))
            shift = rng.uniform(-1.0, 1.0, size=n) * delta * reach / span
            Ms = lam * R @ h.matrix
            g = AffineTransform(Ms, c + shift - lam * R @ c + lam * R @ h.translation)
            gB = ConvexBody(g(B.vertices))
            if hausdorff(gB, A) >= delta:
                continue
            sampled_M = max(sampled_M, float(np.linalg.norm(B.vertices, axis=1).max()),
                            float(np.linalg.norm(gB.vertices, axis=1).max()))
            accepted.append(g)
            break
        else:
            raise SamplingStarvation(f"trial {t}: no admissible sample in {max_attempts_per_trial} attempts")
    if attempts and len(accepted) / attempts < 1e-3:
        raise SamplingStarvation("rejection rate above 99.9%")

    M = max(analytic_M, sampled_M)
    bound = M * (1.0 + lam_hi)
    violations = 0
    lams, shifts = [], []
    for g in accepted:
        parts = sim_decompose(g)
        lams.append(parts.lam)
        shifts.append(float(np.linalg.norm(parts.u)))
        if not (lam_lo < parts.lam < lam_hi) or shifts[-1] > bound:
            violations += 1
    return ThinSetReport(
        m=m, delta=delta, M=M, lambda_interval=(lam_lo, lam_hi), translation_bound=bound,
        violations=violations, trials=trials, attempts=attempts,
        lambda_seen=(min(lams), max(lams)), max_translation_seen=max(shifts),
    )


# -- constant width -------------------------------------------------------------

def regular_polygon(k: int, radius: float = 1.0, center=(0.0, 0.0)) -> ConvexBody:
    a = 2 * np.pi * np.arange(k) / k
    return ConvexBody(np.asarray(center, dtype=float) + radius * np.c_[np.cos(a), np.sin(a)])


def fibonacci_sphere(count: int) -> np.ndarray:
    i = np.arange(count) + 0.5
    z = 1.0 - 2.0 * i / count
    r = np.sqrt(1.0 - z * z)
    phi = np.pi * (3.0 - np.sqrt(5.0)) * i
    return np.c_[r * np.cos(phi), r * np.sin(phi), z]


def reuleaux_triangle(width: float = 1.0, per_arc: int = 64) -> ConvexBody:
    """Polygonal Reuleaux triangle: each arc is centered at the opposite corner."""
    corners = width * np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3.0) / 2.0]])
    pts = []
    for i in range(3):
        center = corners[i]
        p, q = corners[(i + 1) % 3], corners[(i + 2) % 3]
        a0 = np.arctan2(*(p - center)[::-1])
        a1 = np.arctan2(*(q - center)[::-1])
        da = (a1 - a0 + np.pi) % (2 * np.pi) - np.pi
        t = a0 + da * np.linspace(0.0, 1.0, per_arc)
        pts.append(center + width * np.c_[np.cos(t), np.sin(t)])
    return ConvexBody(np.vstack(pts))


def _directions(n: int, count: int = 4096) -> np.ndarray:
    if n == 2:
        a = 2 * np.pi * np.arange(count) / count
        return np.c_[np.cos(a), np.sin(a)]
    if n == 3:
        return fibonacci_sphere(count)
    raise UnsupportedDimension("constant width checks support n in {2, 3}")


def widths(body: ConvexBody, directions: np.ndarray) -> np.ndarray:
    proj = body.vertices @ np.asarray(directions, dtype=float).T
    return proj.max(axis=0) - proj.min(axis=0)


def width(body: ConvexBody, direction) -> float:
    """h(u) + h(-u) for a unit direction u."""
    u = np.asarray(direction, dtype=float)
    return float(widths(body, (u / np.linalg.norm(u))[None])[0])


@dataclass(frozen=True)
class WidthReport:
    d: float
    spread: float
    ball_gap: float
    ball_slack: float
    constant: bool


def _unit_ball(n: int, radius: float) -> tuple[ConvexBody, float]:
    """Polytopal ball of the given radius and its Hausdorff gap to the true ball."""
    if n == 2:
        k = 256
        return regular_polygon(k, radius), radius * (1.0 - np.cos(np.pi / k))
    pts = fibonacci_sphere(422)
    ball = ConvexBody(radius * pts)
    # worst direction sits at a facet; its depth bounds the approximation error
    eq = ball._hull3.equations
    return ball, float(radius + eq[:, -1].max())


def width_report(body: ConvexBody, tol: float) -> WidthReport:
    n = body.dim_ambient
    if body.dim != n:
        raise DegenerateBody("constant width needs a full-dimensional body")
    w = widths(body, _directions(n))
    d = float(w.mean())
    spread = float(np.abs(w - d).max())
    ball, slack = _unit_ball(n, d)
    gap = hausdorff(minkowski_combination(body, negate(body), 0.5), ConvexBody._trusted(ball.vertices / 2.0)) * 2.0
    return WidthReport(d, spread, gap, slack, spread <= tol and gap <= tol + slack)


def is_constant_width(body: ConvexBody, tol: float = 2e-3) -> tuple[bool, float]:
    """Whether all widths agree within ``tol`` and A + (-A) matches d times a ball."""
    r = width_report(body, tol)
    return r.constant, r.d


def constant_width_convexity_check(A: ConvexBody, B: ConvexBody, t: float = 0.5, tol: float = 2e-3) -> bool:
    """Minkowski combinations of constant-width bodies keep constant width (within 2 tol)."""
    for name, body in (("A", A), ("B", B)):
        if not is_constant_width(body, tol)[0]:
            raise NotConstantWidth(f"{name} is not of constant width within {tol}")
    return is_constant_width(minkowski_combination(A, B, t), 2 * tol)[0]
