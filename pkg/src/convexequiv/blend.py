"""Equivariant extension of finitely many prescribed values.

Given anchors K_i with targets y_i, :func:`blend` evaluates

    psi(L) = (1 - lam(L)) phi(L) + lam(L) f(L)

where phi is an equivariant base map, lam is an invariant bump that equals 1
on the orbit of an anchor and vanishes away from it, and f transports the
target along the group element that best aligns the anchor with L.  The
result commutes with the group and takes the prescribed value on each anchor.

Orbit alignment is explicit for Euclidean motions and similarities: the
translation is fixed by matching Steiner points, the scale (similarities only)
by the circumradius ratio, and the orthogonal part by a rotation search over
both orientation components.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Union

import numpy as np

from .body import ConvexBody, diameter, hausdorff, minkowski_combination, point_distance
from ._kernels import rotation_costs
from .config import TOL
from .errors import (
    AmbiguousSupport,
    DegenerateBody,
    EmptyScenario,
    OrbitCollision,
    OutsideNeighborhood,
    ParameterOutOfRange,
    StabilizerViolation,
    UnsupportedDimension,
    UnsupportedGroup,
)
from .selectors import SelectorId, circumball, evaluate, steiner
from .symmetry import is_fixed, stabilizer
from .transforms import AffineTransform, GroupTag, apply

__all__ = [
    "Scenario",
    "Alignment",
    "validate",
    "orbit_align",
    "orbit_distance",
    "bump",
    "orbit_map_f",
    "connect",
    "blend",
    "blend_body",
    "blend_many",
    "clear_caches",
]

Target = Union[np.ndarray, ConvexBody]
SUPPORTED = (GroupTag.EUCLIDEAN, GroupTag.SIM)
COLLISION_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class Scenario:
    """A finite extension problem: anchors, their targets and the base map.

    ``base_selector`` is ignored when the targets are bodies; the base map is
    then the identity on bodies.
    """

    group: GroupTag
    pairs: tuple[tuple[ConvexBody, Target], ...]
    base_selector: SelectorId = SelectorId.STEINER
    deltas: tuple[float, ...] | None = None
    validated: bool = False

    def __post_init__(self):
        object.__setattr__(self, "group", GroupTag.parse(self.group))
        object.__setattr__(self, "base_selector", SelectorId(self.base_selector))
        pairs = []
        for body, target in self.pairs:
            if not isinstance(target, ConvexBody):
                target = np.asarray(target, dtype=float).ravel()
            pairs.append((body, target))
        object.__setattr__(self, "pairs", tuple(pairs))
        if self.deltas is not None:
            object.__setattr__(self, "deltas", tuple(float(d) for d in self.deltas))

    @property
    def body_targets(self) -> bool:
        return bool(self.pairs) and isinstance(self.pairs[0][1], ConvexBody)

    @property
    def anchors(self) -> list[ConvexBody]:
        return [k for k, _ in self.pairs]


@dataclass(frozen=True, eq=False)
class Alignment:
    transform: AffineTransform
    residual: float


# -- framing ---------------------------------------------------------------

@lru_cache(maxsize=8192)
def _framing(body: ConvexBody):
    """Steiner point, circumradius and Steiner-centered vertex loop."""
    s = steiner(body)
    r = circumball(body)[1]
    pts = body.loop if body.dim_ambient == 2 else body.vertices
    centered = pts - s
    centered.setflags(write=False)
    return s, r, centered


def _check_alignable(L: ConvexBody, K: ConvexBody, group: GroupTag):
    if group not in SUPPORTED:
        raise UnsupportedGroup(f"orbit alignment supports Euclidean and Sim, not {group.value}")
    if L.dim_ambient != K.dim_ambient:
        raise DegenerateBody("bodies live in different ambient dimensions")
    if L.dim < 1 or K.dim < 1:
        raise DegenerateBody("orbit alignment needs bodies of dimension >= 1")
    if L.dim_ambient not in (2, 3):
        raise UnsupportedDimension("orbit alignment implemented for n in {2, 3}")


def _rot(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)


def _planar_cost(Lc, L_solid, options, K_solid, theta, orient):
    """d_H(Lc[b], R(theta[b, a]) options[orient[b, a]]) for bodies b and angles a."""
    theta = np.ascontiguousarray(theta, dtype=float)
    orient = np.ascontiguousarray(np.broadcast_to(orient, theta.shape), dtype=np.int64)
    return rotation_costs(Lc, bool(L_solid), options, bool(K_solid), theta, orient)


_INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0


def _golden_batch(fun, lo, hi, tol):
    """Golden-section minimization of ``fun`` on many brackets at once.

    Each bracket stops on its own, so a result never depends on what else
    was in the batch.
    """
    a, b = lo.copy(), hi.copy()
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = fun(c), fun(d)
    while True:
        live = (b - a) > tol
        if not live.any():
            break
        left = fc <= fd
        # keep [a, d] where f(c) <= f(d), else [c, b]
        na = np.where(left, a, c)
        nb = np.where(left, d, b)
        new_c = np.where(left, nb - _INV_PHI * (nb - na), d)
        new_d = np.where(left, c, na + _INV_PHI * (nb - na))
        fp = fun(np.where(left, new_c, new_d))
        nfc = np.where(left, fp, fd)
        nfd = np.where(left, fc, fp)
        a, b = np.where(live, na, a), np.where(live, nb, b)
        c, d = np.where(live, new_c, c), np.where(live, new_d, d)
        fc, fd = np.where(live, nfc, fc), np.where(live, nfd, fd)
    x = 0.5 * (a + b)
    return x, fun(x)


def _align_planar(Lc, L_solid, Kc, K_solid):
    """Best linear parts (B, 2, 2) and costs (B,) for d_H(Lc[b], R D Kc) over O(2)."""
    Lc = np.ascontiguousarray(Lc)
    B = Lc.shape[0]
    steps = TOL.rotation_starts
    grid = 2 * np.pi * np.arange(steps) / steps
    half = np.pi / steps
    flip = np.array([1.0, -1.0])
    options = np.ascontiguousarray(np.stack([Kc, (Kc * flip)[::-1]]))  # reflected copy re-oriented counter-clockwise
    theta = np.broadcast_to(grid, (B, steps))
    F = np.stack([_planar_cost(Lc, L_solid, options, K_solid, theta, o) for o in (0, 1)], axis=1)
    local = (F <= np.roll(F, 1, axis=-1)) & (F <= np.roll(F, -1, axis=-1))
    ranked = np.argsort(np.where(local, F, np.inf).reshape(B, -1), axis=1, kind="stable")
    pick = ranked[:, : TOL.refine_candidates]
    orient, start = pick // steps, grid[pick % steps]
    x, fx = _golden_batch(
        lambda th: _planar_cost(Lc, L_solid, options, K_solid, th, orient),
        start - 2 * half, start + 2 * half, TOL.golden_bracket,
    )
    Ms = np.empty((B, 2, 2))
    costs = np.empty(B)
    for r in range(B):
        # deterministic reduction: lowest cost, then orientation, then angle
        cost, o, th = min(zip(fx[r].tolist(), orient[r].tolist(), (x[r] % (2 * np.pi)).tolist()))
        M = _rot(th)
        Ms[r] = M @ np.diag([1.0, -1.0]) if o == 1 else M
        costs[r] = cost
    return Ms, costs


def _spatial_cost(L: ConvexBody, Lc, K: ConvexBody, Kc, R, rho, sL, sK):
    # distances to R K' are distances of R^T(.) to K', so hulls stay cached
    back = (Lc @ R) / rho + sK
    d1 = max(point_distance(x, K)[0] for x in back) * rho
    fwd = Kc @ R.T * rho + sL
    d2 = max(point_distance(x, L)[0] for x in fwd)
    return max(d1, d2)


def _euler(a, b, c):
    ca, sa, cb, sb, cc, sc = np.cos(a), np.sin(a), np.cos(b), np.sin(b), np.cos(c), np.sin(c)
    Rz1 = np.array([[ca, -sa, 0], [sa, ca, 0], [0, 0, 1]])
    Ry = np.array([[cb, 0, sb], [0, 1, 0], [-sb, 0, cb]])
    Rz2 = np.array([[cc, -sc, 0], [sc, cc, 0], [0, 0, 1]])
    return Rz1 @ Ry @ Rz2


def _align_spatial(L, K, rho, sL, sK, Lc, Kc):
    """Coarse Euler-angle grid per orientation, then Nelder-Mead on a rotation vector."""
    from scipy.optimize import minimize
    from scipy.spatial.transform import Rotation

    refl = np.diag([1.0, 1.0, -1.0])
    cands = []
    for o, D in enumerate((np.eye(3), refl)):
        for a in np.linspace(0, 2 * np.pi, 8, endpoint=False):
            for b in np.linspace(0, np.pi, 5):
                for c in np.linspace(0, 2 * np.pi, 8, endpoint=False):
                    R = _euler(a, b, c) @ D
                    cands.append((_spatial_cost(L, Lc, K, Kc, R, rho, sL, sK), o, a, b, c))
    cands.sort()
    best = None
    for _, o, a, b, c in cands[: TOL.refine_candidates]:
        D = np.eye(3) if o == 0 else refl
        R0 = _euler(a, b, c)

        def f(w):
            R = Rotation.from_rotvec(w).as_matrix() @ R0 @ D
            return _spatial_cost(L, Lc, K, Kc, R, rho, sL, sK)

        simplex = 0.2 * np.vstack([np.zeros(3), np.eye(3)])
        res = minimize(f, np.zeros(3), method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-13, "initial_simplex": simplex})
        R = Rotation.from_rotvec(res.x).as_matrix() @ R0 @ D
        if best is None or res.fun < best[0]:
            best = (float(res.fun), R)
    return best[1], best[0]


_CACHE: dict = {}
_CACHE_LIMIT = 8192


def clear_caches() -> None:
    """Forget memoized framings and alignments (needed after tolerance changes)."""
    _CACHE.clear()
    _framing.cache_clear()


def _align_many(Ls, K: ConvexBody, group: GroupTag):
    """[(M, v, cost)] aligning K onto each L; cost is the orbit distance under ``group``.

    Planar bodies are aligned in batches grouped by vertex count.
    """
    for L in Ls:
        _check_alignable(L, K, group)
    n = K.dim_ambient
    # the anchor itself aligns by the identity; skip the search so bumps are exactly 1 there
    out = [(np.eye(n), np.zeros(n), 0.0) if L == K else _CACHE.get((L, K, group)) for L in Ls]
    todo = [j for j, hit in enumerate(out) if hit is None]
    if todo:
        sK, rK, Kc = _framing(K)
        sim = group is GroupTag.SIM
        if K.dim_ambient == 2:
            buckets: dict = {}
            for j in todo:
                L = Ls[j]
                buckets.setdefault((len(L.loop), L.solid), []).append(j)
            for (_, solid), idx in buckets.items():
                frames = [_framing(Ls[j]) for j in idx]
                rL = np.array([f[1] for f in frames])
                Lc = np.stack([f[2] for f in frames])
                if sim:
                    Ms, costs = _align_planar(Lc / rL[:, None, None], solid, Kc / rK, K.solid)
                    Ms = Ms * (rL / rK)[:, None, None]
                else:
                    Ms, costs = _align_planar(Lc, solid, Kc, K.solid)
                for j, f, M, c in zip(idx, frames, Ms, costs):
                    out[j] = (M, f[0] - M @ sK, float(c))
        else:
            for j in todo:
                sL, rL, Lc = _framing(Ls[j])
                rho = rL / rK if sim else 1.0
                R, cost = _align_spatial(Ls[j], K, rho, sL, sK, Lc, Kc)
                M = rho * R
                out[j] = (M, sL - M @ sK, cost / rL if sim else cost)
        if len(_CACHE) + len(todo) > _CACHE_LIMIT:
            _CACHE.clear()
        for j in todo:
            _CACHE[(Ls[j], K, group)] = out[j]
    return out


def orbit_align(L: ConvexBody, K: ConvexBody, group=GroupTag.EUCLIDEAN) -> Alignment:
    """Group element g minimizing d_H(L, gK) under canonical framing."""
    group = GroupTag.parse(group)
    M, v, _ = _align_many([L], K, group)[0]
    g = AffineTransform(M, v)
    return Alignment(g, hausdorff(L, apply(g, K)))


def orbit_distance(L: ConvexBody, K: ConvexBody, group=GroupTag.EUCLIDEAN) -> float:
    """Group-invariant distance between the orbits of L and K.

    Euclidean: the alignment residual.  Sim: the residual after scaling both
    bodies to unit circumradius about their Steiner points.
    """
    return _align_many([L], K, GroupTag.parse(group))[0][2]


def _distance_lower_bound(L: ConvexBody, K: ConvexBody, group: GroupTag) -> float:
    """Cheap invariant lower bound on orbit_distance (diameter and radius gaps)."""
    _, rL, Lc = _framing(L)
    _, rK, Kc = _framing(K)
    if group is GroupTag.SIM:
        Lc, Kc = Lc / rL, Kc / rK
    dL, dK = diameter(ConvexBody._trusted(Lc)), diameter(ConvexBody._trusted(Kc))
    nL, nK = np.linalg.norm(Lc, axis=1).max(), np.linalg.norm(Kc, axis=1).max()
    return max(abs(dL - dK) / 2.0, abs(nL - nK))


# -- scenario validation --------------------------------------------------

def _default_delta(K: ConvexBody, group: GroupTag) -> float:
    return 1.0 / 3.0 if group is GroupTag.SIM else circumball(K)[1] / 3.0


def validate(scenario: Scenario) -> Scenario:
    """Check stabilizer containment and orbit disjointness; fill in bump radii."""
    if not scenario.pairs:
        raise EmptyScenario("a scenario needs at least one anchor")
    group = scenario.group
    if group not in SUPPORTED:
        raise UnsupportedGroup(f"blend supports Euclidean and Sim scenarios, not {group.value}")
    if not scenario.body_targets and not scenario.base_selector.declared_group.contains(group):
        raise UnsupportedGroup("base selector is not equivariant under the scenario group")
    kinds = {isinstance(t, ConvexBody) for _, t in scenario.pairs}
    if len(kinds) > 1:
        raise ValueError("targets must be all points or all bodies")
    for i, (K, y) in enumerate(scenario.pairs):
        if K.dim < 1:
            raise DegenerateBody(f"anchor {i} is a point")
        stab = stabilizer(K, group)
        if isinstance(y, ConvexBody):
            if y.dim_ambient != K.dim_ambient:
                raise ValueError(f"target body {i} has the wrong dimension")
            if any(hausdorff(apply(g, y), y) > TOL.fixed_point for g in stab):
                raise StabilizerViolation(i)
        else:
            if y.shape[0] != K.dim_ambient:
                raise ValueError(f"target {i} has the wrong dimension")
            if not is_fixed(y, stab):
                raise StabilizerViolation(i)
    m = len(scenario.pairs)
    dist = np.full((m, m), np.inf)
    for i in range(m):
        for j in range(i + 1, m):
            Ki, Kj = scenario.pairs[i][0], scenario.pairs[j][0]
            d = orbit_distance(Ki, Kj, group)
            scale = 1.0 if group is GroupTag.SIM else max(1.0, circumball(Ki)[1])
            if d <= COLLISION_TOL * scale:
                raise OrbitCollision(i, j)
            dist[i, j] = dist[j, i] = d
    if scenario.deltas is None:
        deltas = tuple(
            float(dist[i].min() / 3.0) if m > 1 else _default_delta(scenario.pairs[i][0], group)
            for i in range(m)
        )
    else:
        deltas = scenario.deltas
        if len(deltas) != m or any(d <= 0 for d in deltas):
            raise ParameterOutOfRange("need one positive bump radius per anchor")
        for i in range(m):
            for j in range(i + 1, m):
                if deltas[i] + deltas[j] > dist[i, j]:
                    raise ParameterOutOfRange(f"bump supports of anchors {i} and {j} overlap")
    return replace(scenario, deltas=deltas, validated=True)


def _ensure_valid(scenario: Scenario) -> Scenario:
    return scenario if scenario.validated else validate(scenario)


# -- the blend map ----------------------------------------------------------

def _bump_value(L: ConvexBody, scenario: Scenario, i: int) -> float:
    K = scenario.pairs[i][0]
    delta = scenario.deltas[i]
    if _distance_lower_bound(L, K, scenario.group) >= delta:
        return 0.0
    d = orbit_distance(L, K, scenario.group)
    return float(min(1.0, max(0.0, 1.0 - d / delta)))


def bump(L: ConvexBody, scenario: Scenario, i: int) -> float:
    """Invariant bump: 1 on the orbit of anchor i, 0 beyond orbit distance delta_i."""
    return _bump_value(L, _ensure_valid(scenario), i)


def orbit_map_f(L: ConvexBody, scenario: Scenario, i: int):
    """Target i transported by the element aligning anchor i with L."""
    scenario = _ensure_valid(scenario)
    if _bump_value(L, scenario, i) <= 0.0:
        raise OutsideNeighborhood(f"body is outside the support of bump {i}")
    K, y = scenario.pairs[i]
    g = orbit_align(L, K, scenario.group).transform
    return apply(g, y) if isinstance(y, ConvexBody) else g(y)


def connect(a, b, t: float) -> np.ndarray:
    """Straight-line equiconnection (1 - t) a + t b."""
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ParameterOutOfRange(f"t={t} outside [0, 1]")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if t == 0.0 or np.array_equal(a, b):
        return a.copy()
    if t == 1.0:
        return b.copy()
    return (1.0 - t) * a + t * b


def _active(L: ConvexBody, scenario: Scenario):
    lams = [_bump_value(L, scenario, i) for i in range(len(scenario.pairs))]
    live = [i for i, lam in enumerate(lams) if lam > 0.0]
    if len(live) > 1:
        raise AmbiguousSupport(f"bumps {live} are simultaneously positive")
    return (live[0], lams[live[0]]) if live else (None, 0.0)


def blend(L: ConvexBody, scenario: Scenario) -> np.ndarray:
    """psi(L) for a point-target scenario."""
    scenario = _ensure_valid(scenario)
    if scenario.body_targets:
        raise ValueError("scenario has body targets; use blend_body")
    i, lam = _active(L, scenario)
    base = evaluate(scenario.base_selector, L)
    if i is None:
        return base
    return connect(base, orbit_map_f(L, scenario, i), lam)


def blend_body(L: ConvexBody, scenario: Scenario) -> ConvexBody:
    """psi(L) for a body-target scenario, with the identity as base map."""
    scenario = _ensure_valid(scenario)
    if not scenario.body_targets:
        raise ValueError("scenario has point targets; use blend")
    i, lam = _active(L, scenario)
    if i is None:
        return L
    return minkowski_combination(L, orbit_map_f(L, scenario, i), lam)


def blend_many(bodies, scenario: Scenario) -> list:
    """blend (or blend_body) over many bodies, sharing batched alignments."""
    scenario = _ensure_valid(scenario)
    bodies = list(bodies)
    for i, (K, _) in enumerate(scenario.pairs):
        near = [L for L in bodies if _distance_lower_bound(L, K, scenario.group) < scenario.deltas[i]]
        if near:
            _align_many(near, K, scenario.group)
    one = blend_body if scenario.body_targets else blend
    return [one(L, scenario) for L in bodies]
