"""Invertible affine maps x -> Mx + v and the subgroups we care about."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .body import ConvexBody, _lexsorted
from .config import TOL
from .errors import DimensionMismatch, InvalidBounds, NotASimilarity, SingularMatrix

__all__ = [
    "GroupTag",
    "AffineTransform",
    "SimilarityParts",
    "SampleBounds",
    "apply",
    "compose",
    "inverse",
    "identity",
    "translation",
    "rotation2d",
    "reflection2d",
    "sim_decompose",
    "sim_recompose",
    "classify",
    "sample",
    "haar_orthogonal",
]


class GroupTag(str, Enum):
    AFF = "Aff"
    SIM = "Sim"
    EUCLIDEAN = "Euclidean"
    ORTHOGONAL = "Orthogonal"
    TRANSLATION = "Translation"

    def contains(self, other: "GroupTag") -> bool:
        """Whether ``other`` is a subgroup of ``self``."""
        return other in _SUBGROUPS[self]

    @classmethod
    def parse(cls, text) -> "GroupTag":
        if isinstance(text, cls):
            return text
        for tag in cls:
            if str(text).lower() in (tag.value.lower(), tag.name.lower()):
                return tag
        if str(text).lower() in ("e", "e(n)", "isometry"):
            return cls.EUCLIDEAN
        raise ValueError(f"unknown group tag {text!r}")


_SUBGROUPS = {
    GroupTag.AFF: set(GroupTag),
    GroupTag.SIM: {GroupTag.SIM, GroupTag.EUCLIDEAN, GroupTag.ORTHOGONAL, GroupTag.TRANSLATION},
    GroupTag.EUCLIDEAN: {GroupTag.EUCLIDEAN, GroupTag.ORTHOGONAL, GroupTag.TRANSLATION},
    GroupTag.ORTHOGONAL: {GroupTag.ORTHOGONAL},
    GroupTag.TRANSLATION: {GroupTag.TRANSLATION},
}


@dataclass(frozen=True, eq=False)
class AffineTransform:
    matrix: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        v = np.array(self.translation, dtype=float).ravel()
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != v.shape[0]:
            raise DimensionMismatch("matrix must be n x n and translation length n")
        if abs(np.linalg.det(m)) <= TOL.invertible_det:
            raise SingularMatrix("affine map is not invertible")
        m.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "translation", v)

    @property
    def n(self) -> int:
        return self.translation.shape[0]

    def __call__(self, x) -> np.ndarray:
        """Image of a point, or of each row of an array of points."""
        x = np.asarray(x, dtype=float)
        return x @ self.matrix.T + self.translation

    def __matmul__(self, other: "AffineTransform") -> "AffineTransform":
        return compose(self, other)

    def allclose(self, other: "AffineTransform", tol: float = 1e-10) -> bool:
        return bool(
            np.allclose(self.matrix, other.matrix, atol=tol, rtol=0)
            and np.allclose(self.translation, other.translation, atol=tol, rtol=0)
        )

    def __repr__(self) -> str:
        return f"AffineTransform(matrix={self.matrix.tolist()}, translation={self.translation.tolist()})"


@dataclass(frozen=True, eq=False)
class SimilarityParts:
    u: np.ndarray
    lam: float
    sigma: np.ndarray


def identity(n: int) -> AffineTransform:
    return AffineTransform(np.eye(n), np.zeros(n))


def translation(v) -> AffineTransform:
    v = np.asarray(v, dtype=float).ravel()
    return AffineTransform(np.eye(len(v)), v)


def rotation2d(theta: float, center=(0.0, 0.0)) -> AffineTransform:
    c, s = np.cos(theta), np.sin(theta)
    m = np.array([[c, -s], [s, c]])
    center = np.asarray(center, dtype=float)
    return AffineTransform(m, center - m @ center)


def reflection2d(normal, offset: float = 0.0) -> AffineTransform:
    """Reflection across the line {x : <normal, x> = offset}."""
    a = np.asarray(normal, dtype=float)
    a = a / np.linalg.norm(a)
    m = np.eye(2) - 2.0 * np.outer(a, a)
    return AffineTransform(m, 2.0 * offset * a)


def apply(g: AffineTransform, body: ConvexBody) -> ConvexBody:
    """Image gK; extreme points map to extreme points, so only re-sorting is needed."""
    if g.n != body.dim_ambient:
        raise DimensionMismatch("transform and body dimensions differ")
    return ConvexBody._trusted(_lexsorted(g(body.vertices)))


def compose(g: AffineTransform, h: AffineTransform) -> AffineTransform:
    """The map x -> g(h(x))."""
    if g.n != h.n:
        raise DimensionMismatch("cannot compose maps of different dimension")
    return AffineTransform(g.matrix @ h.matrix, g.matrix @ h.translation + g.translation)


def inverse(g: AffineTransform) -> AffineTransform:
    try:
        minv = np.linalg.inv(g.matrix)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix("affine map is not invertible") from exc
    return AffineTransform(minv, -minv @ g.translation)


def _similarity_scale(m: np.ndarray, tol: float) -> float | None:
    lam = float(np.linalg.norm(m[:, 0]))
    gram = m.T @ m
    if np.allclose(gram, lam * lam * np.eye(len(m)), atol=tol * max(1.0, lam * lam), rtol=0):
        return lam
    return None


def sim_decompose(g: AffineTransform) -> SimilarityParts:
    """The unique (u, lambda, sigma) with g(x) = u + lambda * sigma x."""
    lam = _similarity_scale(g.matrix, TOL.similarity)
    if lam is None:
        raise NotASimilarity("matrix^T matrix is not a multiple of the identity")
    return SimilarityParts(u=g.translation.copy(), lam=lam, sigma=g.matrix / lam)


def sim_recompose(parts: SimilarityParts) -> AffineTransform:
    return AffineTransform(parts.lam * np.asarray(parts.sigma), parts.u)


def classify(g: AffineTransform, tol: float | None = None) -> set[GroupTag]:
    tol = TOL.similarity if tol is None else tol
    tags = {GroupTag.AFF}
    n = g.n
    if np.allclose(g.matrix, np.eye(n), atol=tol, rtol=0):
        tags.add(GroupTag.TRANSLATION)
    lam = _similarity_scale(g.matrix, tol)
    if lam is not None:
        tags.add(GroupTag.SIM)
        if abs(lam - 1.0) <= tol:
            tags.add(GroupTag.EUCLIDEAN)
            if np.allclose(g.translation, 0.0, atol=tol, rtol=0):
                tags.add(GroupTag.ORTHOGONAL)
    return tags


@dataclass(frozen=True)
class SampleBounds:
    max_translation: float = 5.0
    scale_range: tuple[float, float] = (0.5, 2.0)
    max_condition: float = 50.0

    def check(self):
        lo, hi = self.scale_range
        if not (self.max_translation >= 0 and 0 < lo <= hi and self.max_condition >= 1):
            raise InvalidBounds(f"invalid sampling bounds {self}")


def haar_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed element of O(n), both determinant signs."""
    z = rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    q = q * np.sign(np.diag(r))
    if rng.random() < 0.5:
        # composing with a fixed reflection keeps the law Haar
        q[:, 0] = -q[:, 0]
    return q


def sample(group, n: int = 2, bounds: SampleBounds | None = None, seed: int = 0) -> AffineTransform:
    """Deterministic random element of ``group`` acting on R^n."""
    group = GroupTag.parse(group)
    bounds = bounds or SampleBounds()
    bounds.check()
    rng = np.random.default_rng(seed)
    shift = rng.uniform(-bounds.max_translation, bounds.max_translation, size=n)
    lo, hi = bounds.scale_range
    if group is GroupTag.TRANSLATION:
        return AffineTransform(np.eye(n), shift)
    sigma = haar_orthogonal(n, rng)
    if group is GroupTag.ORTHOGONAL:
        return AffineTransform(sigma, np.zeros(n))
    if group is GroupTag.EUCLIDEAN:
        return AffineTransform(sigma, shift)
    if group is GroupTag.SIM:
        lam = float(np.exp(rng.uniform(np.log(lo), np.log(hi))))
        return AffineTransform(lam * sigma, shift)
    # general affine: U diag(s) V^T with bounded condition number
    other = haar_orthogonal(n, rng)
    for _ in range(1000):
        s = np.exp(rng.uniform(np.log(lo), np.log(hi), size=n))
        if s.max() / s.min() <= bounds.max_condition:
            break
    else:
        raise InvalidBounds("could not meet max_condition within scale_range")
    return AffineTransform(sigma @ np.diag(s) @ other.T, shift)
