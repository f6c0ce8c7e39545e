import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from convexequiv import (
    AffineTransform,
    ConvexBody,
    GroupTag,
    SampleBounds,
    apply,
    classify,
    compose,
    diameter,
    hausdorff,
    inverse,
    sample,
)
from convexequiv.errors import InvalidBounds, NotASimilarity, SingularMatrix
from convexequiv.transforms import identity, rotation2d, sim_decompose, sim_recompose, translation

from oracles import bodies

SQUARE = ConvexBody([(0, 0), (1, 0), (0, 1), (1, 1)])
T = ConvexBody([(0, 0), (1, 0), (0, 1)])
seeds = st.integers(0, 2**32 - 1)
groups = st.sampled_from(list(GroupTag))


def test_apply_identity():
    assert apply(identity(2), T) == T


def test_apply_translation():
    assert apply(translation((2, 3)), SQUARE).vertices.tolist() == [[2, 3], [2, 4], [3, 3], [3, 4]]


def test_apply_dilation():
    g = AffineTransform(2 * np.eye(2), np.zeros(2))
    assert apply(g, T) == ConvexBody([(0, 0), (2, 0), (0, 2)])


def test_singular_rejected():
    with pytest.raises(SingularMatrix):
        AffineTransform([[1, 2], [2, 4]], [0, 0])


@given(seeds)
def test_compose_with_inverse_is_identity(seed):
    g = sample(GroupTag.AFF, 2, seed=seed)
    assert compose(g, inverse(g)).allclose(identity(2), 1e-10)
    assert compose(inverse(g), g).allclose(identity(2), 1e-10)


def test_compose_identity_left():
    h = sample(GroupTag.AFF, 3, seed=4)
    assert compose(identity(3), h).allclose(h, 0)


def test_inverse_translation():
    assert inverse(translation((1.5, -2))).allclose(translation((-1.5, 2)), 0)


class TestSimilarityParts:
    def test_identity(self):
        p = sim_decompose(identity(2))
        assert p.lam == 1 and not p.u.any()
        np.testing.assert_array_equal(p.sigma, np.eye(2))

    def test_dilation(self):
        p = sim_decompose(AffineTransform(2 * np.eye(2), (3, -1)))
        assert p.lam == 2
        np.testing.assert_array_equal(p.u, (3, -1))
        np.testing.assert_array_equal(p.sigma, np.eye(2))

    def test_rotation(self):
        p = sim_decompose(rotation2d(0.7))
        assert p.lam == pytest.approx(1, abs=1e-15)
        np.testing.assert_allclose(p.sigma, [[math.cos(0.7), -math.sin(0.7)], [math.sin(0.7), math.cos(0.7)]])

    def test_shear_is_not_similarity(self):
        with pytest.raises(NotASimilarity):
            sim_decompose(AffineTransform([[1, 1], [0, 1]], [0, 0]))

    @given(seeds, st.sampled_from([2, 3]))
    def test_round_trip(self, seed, n):
        g = sample(GroupTag.SIM, n, seed=seed)
        p = sim_decompose(g)
        np.testing.assert_allclose(p.sigma.T @ p.sigma, np.eye(n), atol=1e-10)
        assert sim_recompose(p).allclose(g, 1e-10)
        q = sim_decompose(sim_recompose(p))
        assert q.lam == pytest.approx(p.lam, abs=1e-10)
        np.testing.assert_allclose(q.sigma, p.sigma, atol=1e-10)


class TestClassify:
    def test_translation(self):
        assert classify(translation((1, 2))) == {
            GroupTag.AFF, GroupTag.SIM, GroupTag.EUCLIDEAN, GroupTag.TRANSLATION
        }

    def test_dilation(self):
        assert classify(AffineTransform(3 * np.eye(2), (0, 0))) == {GroupTag.AFF, GroupTag.SIM}

    def test_shear(self):
        assert classify(AffineTransform([[1, 1], [0, 1]], [0, 0])) == {GroupTag.AFF}

    def test_rotation_about_origin(self):
        assert GroupTag.ORTHOGONAL in classify(rotation2d(1.0))


class TestSample:
    @given(groups, seeds, st.sampled_from([2, 3]))
    def test_lands_in_group(self, group, seed, n):
        assert group in classify(sample(group, n, seed=seed))

    @given(seeds)
    def test_scale_range(self, seed):
        lam = sim_decompose(sample(GroupTag.SIM, 2, SampleBounds(scale_range=(0.5, 2)), seed)).lam
        assert 0.5 - 1e-12 <= lam <= 2 + 1e-12

    @given(seeds)
    def test_condition_bound(self, seed):
        g = sample(GroupTag.AFF, 2, SampleBounds(max_condition=50), seed)
        assert np.linalg.cond(g.matrix) <= 50 + 1e-9

    @given(groups, seeds)
    def test_deterministic(self, group, seed):
        assert sample(group, 2, seed=seed).allclose(sample(group, 2, seed=seed), 0)

    def test_orthogonal_part_covers_both_components(self):
        signs = {np.sign(np.linalg.det(sample(GroupTag.EUCLIDEAN, 2, seed=s).matrix)) for s in range(64)}
        assert signs == {-1.0, 1.0}

    @pytest.mark.parametrize(
        "bounds",
        [SampleBounds(max_translation=-1), SampleBounds(scale_range=(2, 1)), SampleBounds(scale_range=(0, 1)),
         SampleBounds(max_condition=0.5)],
    )
    def test_invalid_bounds(self, bounds):
        with pytest.raises(InvalidBounds):
            sample(GroupTag.SIM, 2, bounds, 0)


@given(bodies(1, 8), seeds, seeds)
def test_action_axiom(K, s1, s2):
    g, h = sample(GroupTag.AFF, 2, seed=s1), sample(GroupTag.AFF, 2, seed=s2)
    lhs = apply(compose(g, h), K).vertices
    rhs = apply(g, apply(h, K)).vertices
    np.testing.assert_allclose(lhs, rhs, atol=1e-9)


@given(bodies(1, 8), bodies(1, 8), seeds)
def test_euclidean_isometry(A, B, seed):
    g = sample(GroupTag.EUCLIDEAN, 2, seed=seed)
    assert hausdorff(apply(g, A), apply(g, B)) == pytest.approx(hausdorff(A, B), abs=1e-9)


@given(bodies(1, 8), bodies(1, 8), seeds)
def test_similarity_covariance(A, B, seed):
    g = sample(GroupTag.SIM, 2, seed=seed)
    lam = sim_decompose(g).lam
    assert hausdorff(apply(g, A), apply(g, B)) == pytest.approx(lam * hausdorff(A, B), abs=1e-9)
    assert diameter(apply(g, A)) == pytest.approx(lam * diameter(A), abs=1e-9)
