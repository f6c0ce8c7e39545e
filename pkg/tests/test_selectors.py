import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from convexequiv import (
    ConvexBody,
    GroupTag,
    SelectorId,
    apply,
    centroid,
    chebyshev,
    circumball,
    evaluate,
    john,
    lowner,
    sample,
    steiner,
)
from convexequiv.errors import DegenerateBody
from convexequiv.lab import fibonacci_sphere, regular_polygon
from convexequiv.selectors import steiner_by_quadrature, to_halfspaces

from oracles import (
    chebyshev_grid,
    circumball_brute,
    nice_polygons,
    seeded_polygon,
    steiner_sphere,
    steiner_trapezoid,
    triangle_ellipses,
)

SQUARE = ConvexBody([(0, 0), (1, 0), (0, 1), (1, 1)])
T = ConvexBody([(0, 0), (1, 0), (0, 1)])
SEG = ConvexBody([(1, 2), (4, -2)])
seeds = st.integers(0, 2**32 - 1)


class TestHalfspaces:
    def test_square(self):
        H = to_halfspaces(SQUARE)
        assert len(H) == 4
        normals = sorted(map(tuple, np.round(H.normals, 12).tolist()))
        assert normals == [(-1, 0), (0, -1), (0, 1), (1, 0)]

    def test_triangle(self):
        assert len(to_halfspaces(T)) == 3

    def test_segment_rejected(self):
        with pytest.raises(DegenerateBody):
            to_halfspaces(SEG)

    @given(nice_polygons())
    def test_vertices_are_tight(self, K):
        H = to_halfspaces(K)
        slack = H.slack(K.vertices)
        assert slack.min() >= -1e-9 and (np.sum(np.abs(slack) < 1e-9, axis=0) >= 2).all()


class TestCentroid:
    def test_triangle(self):
        np.testing.assert_allclose(centroid(T), (1 / 3, 1 / 3), atol=1e-15)

    def test_square(self):
        np.testing.assert_allclose(centroid(SQUARE), (0.5, 0.5), atol=1e-15)

    def test_segment_midpoint(self):
        np.testing.assert_allclose(centroid(SEG), (2.5, 0), atol=1e-15)

    def test_point(self):
        np.testing.assert_array_equal(centroid(ConvexBody([(3, 4)])), (3, 4))

    @given(nice_polygons())
    def test_against_shapely(self, K):
        from shapely.geometry import Polygon

        c = Polygon(K.loop).centroid
        np.testing.assert_allclose(centroid(K), (c.x, c.y), atol=1e-9)

    def test_spatial_tetrahedron(self):
        V = np.array([[0, 0, 0], [1, 0, 0], [0, 2, 0], [0, 0, 3.0]])
        np.testing.assert_allclose(centroid(ConvexBody(V)), V.mean(0), atol=1e-14)


class TestCircumball:
    def test_square(self):
        c, r = circumball(SQUARE)
        np.testing.assert_allclose(c, (0.5, 0.5), atol=1e-12)
        assert r == pytest.approx(math.sqrt(2) / 2, abs=1e-12)

    def test_segment(self):
        c, r = circumball(SEG)
        np.testing.assert_allclose(c, (2.5, 0), atol=1e-12)
        assert r == pytest.approx(2.5, abs=1e-12)

    def test_right_triangle_against_brute_force(self):
        c, r = circumball(T)
        cg, rg = circumball_brute(T.vertices)
        np.testing.assert_allclose(c, (0.5, 0.5), atol=1e-12)
        np.testing.assert_allclose(c, cg, atol=1e-12)
        assert r == pytest.approx(rg, abs=1e-12)

    @given(nice_polygons())
    def test_random_against_brute_force(self, K):
        c, r = circumball(K)
        cb, rb = circumball_brute(K.vertices)
        assert np.linalg.norm(K.vertices - c, axis=1).max() <= r + 1e-9
        assert r == pytest.approx(rb, abs=1e-12)
        np.testing.assert_allclose(c, cb, atol=1e-9)

    def test_spatial_cube(self):
        cube = ConvexBody(np.array(list(np.ndindex(2, 2, 2)), dtype=float))
        c, r = circumball(cube)
        np.testing.assert_allclose(c, (0.5, 0.5, 0.5), atol=1e-12)
        assert r == pytest.approx(math.sqrt(3) / 2, abs=1e-12)


class TestChebyshev:
    def test_square(self):
        c, r = chebyshev(SQUARE)
        np.testing.assert_allclose(c, (0.5, 0.5), atol=1e-12)
        assert r == pytest.approx(0.5, abs=1e-12)

    def test_rectangle_uses_face_barycenter(self):
        c, r = chebyshev(ConvexBody([(0, 0), (2, 0), (0, 1), (2, 1)]))
        np.testing.assert_allclose(c, (1, 0.5), atol=1e-9)
        assert r == pytest.approx(0.5, abs=1e-12)

    def test_right_triangle_incenter(self):
        c, r = chebyshev(T)
        rho = 1 - math.sqrt(2) / 2
        np.testing.assert_allclose(c, (rho, rho), atol=1e-12)
        assert r == pytest.approx(rho, abs=1e-12)
        cg, rg = chebyshev_grid(T)
        np.testing.assert_allclose(c, cg, atol=1e-5)

    @given(nice_polygons())
    def test_random_against_grid(self, K):
        _, r = chebyshev(K)
        _, rg = chebyshev_grid(K)
        assert r == pytest.approx(rg, abs=1e-6)

    def test_segment_rejected(self):
        with pytest.raises(DegenerateBody):
            chebyshev(SEG)


class TestSteiner:
    def test_square(self):
        np.testing.assert_allclose(steiner(SQUARE), (0.5, 0.5), atol=1e-14)

    def test_singleton(self):
        np.testing.assert_array_equal(steiner(ConvexBody([(3, 4)])), (3, 4))

    def test_segment(self):
        np.testing.assert_allclose(steiner(SEG), (2.5, 0), atol=1e-14)

    def test_triangle_against_trapezoid(self):
        oracle = steiner_trapezoid(T.vertices, 1_000_000)
        np.testing.assert_allclose(steiner(T), oracle, atol=1e-8)

    @given(nice_polygons())
    def test_random_against_trapezoid(self, K):
        np.testing.assert_allclose(steiner(K), steiner_trapezoid(K.vertices), atol=1e-7)

    @pytest.mark.parametrize("seed", range(4))
    def test_spatial_against_sphere_lattice(self, seed):
        rng = np.random.default_rng(seed)
        K = ConvexBody(rng.standard_normal((12, 3)))
        np.testing.assert_allclose(steiner(K), steiner_sphere(K.vertices), atol=2e-4)

    def test_builtin_quadrature_agrees(self):
        K = seeded_polygon(11)
        q, err = steiner_by_quadrature(K)
        np.testing.assert_allclose(steiner(K), q, atol=1e-8 + err)


class TestEllipsoids:
    def test_lowner_square(self):
        E = lowner(SQUARE)
        np.testing.assert_allclose(E.center, (0.5, 0.5), atol=1e-6)
        np.testing.assert_allclose(E.semi_axes, [math.sqrt(2) / 2] * 2, atol=1e-5)

    def test_john_square(self):
        E = john(SQUARE)
        np.testing.assert_allclose(E.center, (0.5, 0.5), atol=1e-9)
        np.testing.assert_allclose(E.semi_axes, [0.5, 0.5], atol=1e-6)

    @given(seeds)
    def test_triangles_against_closed_form(self, seed):
        V = np.random.default_rng(seed).uniform(-3, 3, (3, 2))
        K = ConvexBody(V)
        if K.dim < 2 or abs(np.linalg.det(np.c_[V, np.ones(3)])) < 0.5:
            return
        c, Q_out, Q_in = triangle_ellipses(K.vertices)
        Lo, Jo = lowner(K), john(K)
        np.testing.assert_allclose(Lo.center, c, atol=1e-5 * K.scale)
        np.testing.assert_allclose(Jo.center, c, atol=1e-5 * K.scale)
        np.testing.assert_allclose(Jo.shape, Q_in, rtol=1e-5, atol=1e-5 * np.abs(Q_in).max())
        np.testing.assert_allclose(Lo.shape, Q_out, rtol=1e-4, atol=1e-4 * np.abs(Q_out).max())

    @given(nice_polygons())
    def test_nesting(self, K):
        Lo, Jo = lowner(K), john(K)
        assert Lo.contains(K.vertices, slack=1e-8).all()
        H = to_halfspaces(K)
        # support of the inner ellipse along each facet normal
        reach = H.normals @ Jo.center + np.sqrt(np.einsum("ij,jk,ik->i", H.normals, np.linalg.inv(Jo.shape), H.normals))
        assert (reach <= H.offsets + 1e-8 * K.scale).all()
        assert chebyshev(K)[1] <= circumball(K)[1]

    def test_spatial_box(self):
        box = ConvexBody(np.array(list(np.ndindex(2, 2, 2)), dtype=float) * [1, 2, 3])
        np.testing.assert_allclose(lowner(box).center, (0.5, 1, 1.5), atol=1e-6)
        np.testing.assert_allclose(john(box).semi_axes, [1.5, 1, 0.5], atol=1e-6)


class TestEvaluate:
    def test_examples(self):
        np.testing.assert_allclose(evaluate("centroid", T), (1 / 3, 1 / 3), atol=1e-15)
        np.testing.assert_allclose(evaluate(SelectorId.CIRCUMCENTER, SEG), (2.5, 0), atol=1e-12)
        np.testing.assert_allclose(evaluate("steiner", SQUARE), (0.5, 0.5), atol=1e-14)

    @pytest.mark.parametrize("sel", list(SelectorId))
    def test_regular_64gon_agrees_with_center(self, sel):
        K = regular_polygon(64, 1.0, (0.3, -0.2))
        np.testing.assert_allclose(evaluate(sel, K), (0.3, -0.2), atol=2e-3)

    @pytest.mark.parametrize("sel", list(SelectorId))
    @given(seed=seeds)
    def test_centrally_symmetric(self, sel, seed):
        rng = np.random.default_rng(seed)
        half = rng.uniform(-1, 1, (4, 2))
        c = rng.uniform(-3, 3, 2)
        K = ConvexBody(np.vstack([c + half, c - half]))
        if K.dim < 2:
            return
        np.testing.assert_allclose(evaluate(sel, K), c, atol=1e-8 * (1 + K.scale))

    @pytest.mark.parametrize("sel", list(SelectorId))
    @given(K=nice_polygons(), seed=seeds)
    def test_equivariance_declared_group(self, sel, K, seed):
        g = sample(sel.declared_group, 2, seed=seed)
        expect = g(evaluate(sel, K))
        got = evaluate(sel, apply(g, K))
        assert np.linalg.norm(got - expect) <= 1e-6 * (1 + np.linalg.norm(expect))

    def test_spatial_equivariance(self):
        K = ConvexBody(fibonacci_sphere(20) * [1.0, 1.5, 0.7] + [0.2, 0.1, 0.0])
        K = ConvexBody(np.vstack([K.vertices, [[1.2, 0.4, 0.3]]]))
        for seed in range(3):
            for sel in SelectorId:
                g = sample(sel.declared_group, 3, seed=seed)
                expect = g(evaluate(sel, K))
                got = evaluate(sel, apply(g, K))
                assert np.linalg.norm(got - expect) <= 1e-6 * (1 + np.linalg.norm(expect)), sel
