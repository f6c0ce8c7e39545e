"""Stabilizers of polytopes and the affine subspaces they fix.

An affine map preserving a polytope permutes its vertices, and it is pinned
down by where it sends one affine frame of vertices.  Enumerating the
ordered vertex tuples that a frame can go to therefore finds the whole
stabilizer.  For a body of dimension k < n the stabilizer is infinite; we
return the finite subgroup acting on the affine hull by vertex permutations
and on its orthogonal complement by +-identity, which has the same fixed
points.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .body import ConvexBody
from .config import TOL
from .errors import DegenerateBody, GroupClosureError, TooManyVertices
from .selectors import SelectorId, centroid, evaluate
from .transforms import AffineTransform, GroupTag, classify, inverse

__all__ = [
    "StabilizerGroup",
    "AffineSubspace",
    "ContainmentRow",
    "stabilizer",
    "fixed_point_set",
    "is_fixed",
    "check_containment",
]


@dataclass(frozen=True, eq=False)
class StabilizerGroup:
    elements: tuple[AffineTransform, ...]
    group: GroupTag
    body: ConvexBody

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def index_of(self, g: AffineTransform, tol: float = 1e-7) -> int | None:
        for i, h in enumerate(self.elements):
            if h.allclose(g, tol):
                return i
        return None


@dataclass(frozen=True, eq=False)
class AffineSubspace:
    base: np.ndarray
    directions: np.ndarray  # (d, n), orthonormal rows

    @property
    def dim(self) -> int:
        return self.directions.shape[0]

    def project(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        D = self.directions
        return self.base + (x - self.base) @ D.T @ D

    def distance(self, x) -> float:
        return float(np.linalg.norm(np.asarray(x, dtype=float) - self.project(x)))

    def same_as(self, other: "AffineSubspace", tol: float = 1e-8) -> bool:
        if self.dim != other.dim or other.distance(self.base) > tol:
            return False
        if self.dim == 0:
            return True
        # equal spans iff projectors agree
        P1 = self.directions.T @ self.directions
        P2 = other.directions.T @ other.directions
        return bool(np.allclose(P1, P2, atol=tol))


def _frame_indices(Y: np.ndarray, k: int, tol: float) -> list[int]:
    chosen = [0]
    for j in range(1, len(Y)):
        trial = chosen + [j]
        D = Y[trial[1:]] - Y[trial[0]]
        if np.linalg.matrix_rank(D, tol=tol) == len(trial) - 1:
            chosen = trial
            if len(chosen) == k + 1:
                break
    return chosen


def _sort_key(g: AffineTransform):
    return tuple(np.round(np.r_[g.matrix.ravel(), g.translation], 9))


def stabilizer(body: ConvexBody, group=GroupTag.AFF) -> StabilizerGroup:
    """All maps of ``group`` sending the vertex set of ``body`` onto itself."""
    group = GroupTag.parse(group)
    m = len(body)
    if body.dim == 0:
        raise DegenerateBody("a point has an infinite stabilizer")
    if m > TOL.max_stabilizer_vertices:
        raise TooManyVertices(f"{m} vertices exceed the enumeration cap {TOL.max_stabilizer_vertices}")
    n, k = body.dim_ambient, body.dim
    base, U = body.frame
    Y = body.intrinsic
    tol = TOL.vertex_match * body.scale
    frame = _frame_indices(Y, k, tol)
    F = Y[frame]
    Fd_inv = np.linalg.inv((F[1:] - F[0]).T)

    tuples = np.array(list(itertools.permutations(range(m), k + 1)))
    T = Y[tuples]                                         # (P, k+1, k)
    # A_p maps frame edges onto the candidate image edges: A_p Fd^T = E_p^T
    A = np.einsum("pja,jb->pab", T[:, 1:] - T[:, :1], Fd_inv)
    a = T[:, 0] - np.einsum("pab,b->pa", A, F[0])
    images = np.einsum("pab,mb->pma", A, Y) + a[:, None, :]
    dist = np.linalg.norm(images[:, :, None, :] - Y[None, None, :, :], axis=-1).min(axis=-1)
    hits = np.flatnonzero(np.all(dist <= tol, axis=1))

    comp = np.eye(n) - U @ U.T
    signs = (1.0,) if k == n else (1.0, -1.0)
    elements: list[AffineTransform] = []
    for p in hits:
        for s in signs:
            M = U @ A[p] @ U.T + s * comp
            v = base + U @ a[p] - M @ base
            try:
                g = AffineTransform(M, v)
            except Exception:
                continue
            if group in classify(g):
                elements.append(g)
    elements.sort(key=_sort_key)
    stab = StabilizerGroup(tuple(elements), group, body)
    _check_group(stab)
    return stab


def _flat(g: AffineTransform) -> np.ndarray:
    return np.r_[g.matrix.ravel(), g.translation]


def _check_group(stab: StabilizerGroup, tol: float = 1e-7):
    """Numerically verify identity, inverses and closure."""
    els = stab.elements
    if not els:
        raise GroupClosureError("empty stabilizer")
    n = els[0].n
    table = np.array([_flat(g) for g in els])
    # maps of thin bodies have large entries; round-off grows with them
    tol = tol * max(1.0, float(np.abs(table).max()))

    def present(vec):
        return np.min(np.max(np.abs(table - vec), axis=1)) <= tol

    if not present(np.r_[np.eye(n).ravel(), np.zeros(n)]):
        raise GroupClosureError("stabilizer does not contain the identity")
    Ms = np.array([g.matrix for g in els])
    vs = np.array([g.translation for g in els])
    for g in els:
        if not present(_flat(inverse(g))):
            raise GroupClosureError("stabilizer not closed under inverses")
        prods = np.concatenate([
            np.einsum("ab,kbc->kac", g.matrix, Ms).reshape(len(els), -1),
            vs @ g.matrix.T + g.translation,
        ], axis=1)
        gaps = np.max(np.abs(prods[:, None, :] - table[None, :, :]), axis=2).min(axis=1)
        if np.any(gaps > tol):
            raise GroupClosureError("stabilizer not closed under composition")


def fixed_point_set(stab: StabilizerGroup) -> AffineSubspace:
    """Points fixed by every element: solve (M_g - I) x = -v_g jointly."""
    n = stab.body.dim_ambient
    rows = np.vstack([g.matrix - np.eye(n) for g in stab.elements])
    _, s, vt = np.linalg.svd(rows)
    s = np.r_[s, np.zeros(n - len(s))]
    null = vt[s <= 1e-8 * max(1.0, s.max(initial=0.0))]
    if null.shape[0] == n:
        return AffineSubspace(np.zeros(n), np.eye(n))
    # the average of a finite orbit is fixed by the whole group
    c = centroid(stab.body)
    base = np.mean([g(c) for g in stab.elements], axis=0)
    return AffineSubspace(base, null)


def is_fixed(x, stab: StabilizerGroup, tol: float | None = None) -> bool:
    tol = TOL.fixed_point if tol is None else tol
    x = np.asarray(x, dtype=float)
    return max(float(np.linalg.norm(g(x) - x)) for g in stab.elements) <= tol


@dataclass(frozen=True)
class ContainmentRow:
    selector: str
    point: tuple[float, ...]
    distance: float
    ok: bool


def check_containment(body: ConvexBody, selectors=None, group=GroupTag.EUCLIDEAN,
                      tol: float = 1e-6) -> tuple[AffineSubspace, list[ContainmentRow]]:
    """Distance of each selector's point to the fixed set of the stabilizer."""
    selectors = [SelectorId(s) for s in (selectors or list(SelectorId))]
    fixed = fixed_point_set(stabilizer(body, group))
    rows = []
    for sel in selectors:
        p = evaluate(sel, body)
        d = fixed.distance(p)
        rows.append(ContainmentRow(sel.value, tuple(float(x) for x in p), d, d <= tol))
    return fixed, rows
