import math

import numpy as np
import pytest
from conftest import polygons, polytopes
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial import ConvexHull
from shapely.geometry import Polygon

from covario.bodies import box, disk_approx, regular_polygon, simplex
from covario.errors import DegenerateBodyError, DimensionMismatchError, TruncationError
from covario.geometry import (
    ConvexBody,
    Empty,
    LowerDimensional,
    TruncationBox,
    centroid,
    cone_extend,
    cylinder_extend,
    dilate,
    hausdorff_distance,
    intersect,
    is_homothetic,
    minkowski_sum,
    reflect,
    same_vertex_set,
    strictly_convex_approx,
    support_function,
    translate,
    volume,
)

SQ = box([0, 0], [1, 1])
TRI = ConvexBody([[0, 0], [1, 0], [0, 1]])


def shp(body):
    return Polygon(body.vertices)


def brute_hull_area(points):
    """Area of the hull by brute force: keep points that are extreme in some
    of many sampled directions, order them by angle, then apply the shoelace formula."""
    pts = np.unique(np.round(points, 12), axis=0)
    ang = np.linspace(0, 2 * np.pi, 20000, endpoint=False)
    dirs = np.column_stack((np.cos(ang), np.sin(ang)))
    ext = np.unique(np.argmax(pts @ dirs.T, axis=0))
    hull = pts[ext]
    c = hull.mean(axis=0)
    hull = hull[np.argsort(np.arctan2(*(hull - c).T[::-1]))]
    x, y = hull.T
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _worst_vertex_condition(body):
    slack = body.vertices @ body.normals.T - body.offsets
    worst = 1.0
    for row in slack:
        sv = np.linalg.svd(body.normals[np.abs(row) <= 1e-9 * body.diameter], compute_uv=False)
        worst = max(worst, sv[0] / sv[body.dim - 1])
    return worst


class TestConstruction:
    def test_extreme_points_only(self):
        body = ConvexBody([[0, 0], [1, 0], [0.5, 0], [1, 1], [0, 1], [0.5, 0.5]])
        assert len(body.vertices) == 4

    def test_counterclockwise(self):
        body = ConvexBody([[0, 0], [0, 1], [1, 1], [1, 0]])
        x, y = body.vertices.T
        assert np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)) > 0

    def test_degenerate_rejected(self):
        with pytest.raises(DegenerateBodyError):
            ConvexBody([[0, 0], [1, 1], [2, 2]])
        with pytest.raises(DegenerateBodyError):
            ConvexBody([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]])

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            ConvexBody([[0, 0], [1, np.nan], [0, 1]])

    def test_from_halfspaces_unit_square(self):
        n = np.array([[1, 0], [-1, 0], [0, 1], [0, -1]], float)
        body = ConvexBody.from_halfspaces(n, np.array([1, 0, 1, 0], float))
        assert same_vertex_set(body, SQ, 1e-12)

    def test_from_halfspaces_unbounded(self):
        with pytest.raises(DegenerateBodyError):
            ConvexBody.from_halfspaces(np.array([[1.0, 0.0]]), np.array([1.0]))

    def test_readonly(self):
        with pytest.raises(ValueError):
            SQ.vertices[0, 0] = 5.0

    def test_smoothness_tag(self):
        d = disk_approx(64)
        assert d.smoothness == strictly_convex_approx(64)
        assert d.smoothness.to_json() == {"strictly_convex_approx": 64}
        assert SQ.smoothness.to_json() == "polytope"

    @given(polygons(max_vertices=64))
    def test_round_trip_2d(self, body):
        back = ConvexBody.from_halfspaces(body.normals, body.offsets)
        assert same_vertex_set(back, body, 1e-12 * body.diameter)

    @given(polytopes(npts=14))
    def test_round_trip_3d(self, body):
        # nearly parallel facets make a vertex ill-posed; allow eps * condition number
        back = ConvexBody.from_halfspaces(body.normals, body.offsets)
        tol = max(1e-12, 64 * np.finfo(float).eps * _worst_vertex_condition(body))
        assert same_vertex_set(back, body, tol * body.diameter)

    @given(polytopes(npts=12))
    def test_3d_vertices_match_qhull(self, body):
        hull = ConvexHull(body.vertices)
        assert len(hull.vertices) == len(body.vertices)
        assert body.volume == pytest.approx(hull.volume, rel=1e-12)


class TestTransforms:
    def test_translate_identity(self):
        assert np.array_equal(translate(SQ, [0, 0]).vertices, SQ.vertices)

    def test_translate_shift(self):
        assert same_vertex_set(translate(SQ, [2, 3]), box([2, 3], [3, 4]), 0)

    def test_translate_triangle(self):
        exp = ConvexBody([[-1, 0], [0, 0], [-1, 1]])
        assert same_vertex_set(translate(TRI, [-1, 0]), exp, 0)

    def test_translate_keeps_tag(self):
        d = disk_approx(32)
        assert translate(d, [1, 1]).smoothness == d.smoothness

    def test_translate_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            translate(SQ, [1, 2, 3])

    def test_reflect_symmetric(self):
        sym = box([-1, -1], [1, 1])
        assert same_vertex_set(reflect(sym), sym, 0)

    def test_reflect_triangle(self):
        exp = ConvexBody([[0, 0], [-1, 0], [0, -1]])
        assert same_vertex_set(reflect(TRI), exp, 0)

    @given(polygons())
    def test_reflect_involution(self, body):
        back = reflect(reflect(body))
        assert np.max(np.abs(back.vertices - body.vertices)) <= 1e-15 * max(1, np.abs(body.vertices).max())

    def test_reflect_counterclockwise(self):
        r = reflect(TRI)
        x, y = r.vertices.T
        assert np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)) > 0

    def test_dilate_identity(self):
        assert same_vertex_set(dilate(TRI, 1.0), TRI, 0)

    def test_dilate_square(self):
        d = dilate(SQ, 2.0)
        assert same_vertex_set(d, box([0, 0], [2, 2]), 0)
        assert d.volume == 4.0

    def test_dilate_disk_area_ratio(self):
        d = regular_polygon(256)
        # oracle: shoelace on the scaled vertices
        big = shp(ConvexBody(3 * d.vertices)).area
        assert dilate(d, 3.0).volume / d.volume == pytest.approx(9.0, abs=1e-12)
        assert dilate(d, 3.0).volume == pytest.approx(big, rel=1e-13)

    def test_dilate_center(self):
        assert same_vertex_set(dilate(SQ, 2.0, center=[1, 1]), box([-1, -1], [1, 1]), 1e-15)

    @pytest.mark.parametrize("t", [0.0, -1.0])
    def test_dilate_nonpositive(self, t):
        with pytest.raises(ValueError):
            dilate(SQ, t)

    @given(polygons(), st.floats(0.1, 10))
    def test_dilate_volume_law_2d(self, body, t):
        assert volume(dilate(body, t)) == pytest.approx(t**2 * body.volume, rel=1e-12)

    @given(polytopes(), st.floats(0.1, 10))
    def test_dilate_volume_law_3d(self, body, t):
        assert volume(dilate(body, t)) == pytest.approx(t**3 * body.volume, rel=1e-12)


class TestMinkowski:
    def test_equal_boxes(self):
        assert same_vertex_set(minkowski_sum(SQ, SQ), box([0, 0], [2, 2]), 1e-15)

    def test_box_sum(self):
        assert same_vertex_set(minkowski_sum(SQ, box([-1, -1], [0, 0])), box([-1, -1], [1, 1]), 1e-15)

    def test_triangle_difference_body(self):
        hexagon = minkowski_sum(TRI, reflect(TRI))
        oracle = brute_hull_area((TRI.vertices[:, None, :] + reflect(TRI).vertices[None, :, :]).reshape(-1, 2))
        assert len(hexagon.vertices) == 6
        assert oracle == pytest.approx(3.0, abs=1e-12)
        assert hexagon.volume == pytest.approx(oracle, abs=1e-12)
        assert same_vertex_set(reflect(hexagon), hexagon, 1e-15)

    @given(polygons(), polygons())
    def test_matches_pairwise_hull(self, a, b):
        pts = (a.vertices[:, None, :] + b.vertices[None, :, :]).reshape(-1, 2)
        assert minkowski_sum(a, b).volume == pytest.approx(ConvexHull(pts).volume, rel=1e-12)

    @given(polygons(), polygons(), st.tuples(st.floats(-3, 3), st.floats(-3, 3)))
    def test_commutes_with_translation(self, a, b, x):
        lhs = minkowski_sum(translate(a, x), b)
        rhs = translate(minkowski_sum(a, b), x)
        assert same_vertex_set(lhs, rhs, 1e-12 * lhs.diameter)

    @given(polytopes(), polytopes())
    def test_3d_matches_qhull(self, a, b):
        pts = (a.vertices[:, None, :] + b.vertices[None, :, :]).reshape(-1, 3)
        assert minkowski_sum(a, b).volume == pytest.approx(ConvexHull(pts).volume, rel=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            minkowski_sum(SQ, box([0, 0, 0], [1, 1, 1]))


class TestIntersect:
    def test_edges_tilted_opposite_ways(self):
        # left edges lean by ~1e-16 in opposite directions and cross mid-height;
        # the crossing point must not displace a true corner
        A = ConvexBody(np.array([[-0.06250000000000022, -0.5], [0.9375, -0.5], [0.9375, 0.5], [-0.0625, 0.5]]))
        B = ConvexBody(np.array([
            [-0.06250000000000011, 0.5], [-0.0625, -0.5], [0.9375000000000036, -0.5], [0.9375000000000021, 0.5],
        ]))
        assert intersect(A, B).volume == pytest.approx(1.0, abs=1e-14)
        assert len(intersect(A, B).vertices) == 4

    def test_hull_keeps_corner_behind_flat_point(self):
        pts = np.array([[-1e-17, 0.3], [0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
        body = ConvexBody(pts)
        assert same_vertex_set(body, SQ, 1e-15)
        assert body.vertices[0].tolist() == [0.0, 0.0]

    def test_identity(self):
        assert same_vertex_set(intersect(SQ, SQ), SQ, 0)

    def test_half_overlap(self):
        res = intersect(SQ, translate(SQ, [0.5, 0]))
        assert same_vertex_set(res, box([0.5, 0], [1, 1]), 1e-15)
        assert res.volume == pytest.approx(0.5, abs=1e-15)

    def test_shared_edge(self):
        res = intersect(SQ, translate(SQ, [1, 0]))
        assert isinstance(res, LowerDimensional)
        assert res.volume == 0.0

    def test_disjoint(self):
        assert isinstance(intersect(SQ, translate(SQ, [3, 0])), Empty)

    @given(polygons(), polygons())
    def test_against_shapely(self, a, b):
        res = intersect(a, b)
        assert res.volume == pytest.approx(shp(a).intersection(shp(b)).area, abs=1e-12)

    @given(polygons(), polygons())
    def test_bounded_by_min_volume(self, a, b):
        res = intersect(a, b)
        assert res.volume <= min(a.volume, b.volume) * (1 + 1e-12)
        contained = a.contains(b.vertices, 1e-12).all() or b.contains(a.vertices, 1e-12).all()
        equal = res.volume >= min(a.volume, b.volume) * (1 - 1e-12)
        assert contained == equal

    def test_cube_half_shift(self):
        cube = box([0, 0, 0], [1, 1, 1])
        res = intersect(cube, translate(cube, [0.5, 0.5, 0.5]))
        assert res.volume == pytest.approx(0.125, abs=1e-14)
        assert isinstance(intersect(cube, translate(cube, [1, 0, 0])), LowerDimensional)
        assert isinstance(intersect(cube, translate(cube, [2, 0, 0])), Empty)

    @given(polytopes(), polytopes())
    def test_3d_against_halfspace_hull(self, a, b):
        res = intersect(a, b)
        # oracle: scipy's halfspace intersection around an interior point
        from scipy.optimize import linprog
        from scipy.spatial import HalfspaceIntersection

        A = np.vstack([a.normals, b.normals])
        c = np.concatenate([a.offsets, b.offsets])
        norm = np.linalg.norm(A, axis=1)
        lp = linprog([0, 0, 0, -1], A_ub=np.column_stack([A, norm]), b_ub=c, bounds=[(None, None)] * 3 + [(0, 1)])
        if lp.x[3] < 1e-7:
            assert res.volume <= 1e-9
            return
        hs = HalfspaceIntersection(np.column_stack([A, -c]), lp.x[:3])
        assert res.volume == pytest.approx(ConvexHull(hs.intersections).volume, rel=1e-9, abs=1e-12)


class TestMeasures:
    def test_unit_square(self):
        assert volume(SQ) == 1.0

    def test_half_box_triangle(self):
        assert volume(ConvexBody([[0, 0], [2, 0], [0, 2]])) == 2.0

    def test_4096_gon(self):
        k = 4096
        exact = 0.5 * k * math.sin(2 * math.pi / k)
        area = volume(regular_polygon(k))
        assert area == pytest.approx(exact, rel=1e-13)
        assert abs(area - math.pi) <= 2e-6

    def test_centroid_square(self):
        assert np.allclose(centroid(SQ), [0.5, 0.5], atol=1e-15)

    def test_centroid_triangle(self):
        assert np.allclose(centroid(TRI), [1 / 3, 1 / 3], atol=1e-15)

    def test_centroid_tetrahedron(self):
        assert np.allclose(centroid(simplex(3)), [0.25, 0.25, 0.25], atol=1e-15)
        assert volume(simplex(3)) == pytest.approx(1 / 6, rel=1e-14)

    @given(polygons(), st.tuples(st.floats(-5, 5), st.floats(-5, 5)))
    def test_centroid_equivariance(self, body, x):
        assert np.allclose(centroid(translate(body, x)), centroid(body) + np.array(x), atol=1e-12)

    @given(polygons())
    def test_centroid_against_shapely(self, body):
        c = shp(body).centroid
        assert np.allclose(centroid(body), [c.x, c.y], atol=1e-12)

    def test_support_box(self):
        assert support_function(box([-1, -1], [1, 1]), [1, 0]) == 1.0

    def test_support_disk(self):
        d = regular_polygon(1024)
        for ang in np.linspace(0, 2 * np.pi, 37):
            h = support_function(d, [math.cos(ang), math.sin(ang)])
            assert math.cos(math.pi / 1024) - 1e-15 <= h <= 1 + 1e-15
            assert abs(h - 1) <= 5e-6

    def test_support_zero_direction(self):
        with pytest.raises(ValueError):
            support_function(SQ, [0, 0])

    @given(polygons(), polygons(), st.floats(0, 2 * np.pi))
    def test_support_additivity(self, a, b, ang):
        u = [math.cos(ang), math.sin(ang)]
        lhs = support_function(minkowski_sum(a, b), u)
        assert lhs == pytest.approx(support_function(a, u) + support_function(b, u), abs=1e-12)


class TestHomothety:
    def test_scaled_translate(self):
        res = is_homothetic(SQ, box([2, 5], [4, 7]))
        assert res.is_homothetic
        assert res.scale == pytest.approx(2.0, abs=1e-15)
        assert np.allclose(res.shift, [2, 5], atol=1e-14)

    def test_different_shape(self):
        assert not is_homothetic(SQ, TRI).is_homothetic

    def test_anisotropic(self):
        res = is_homothetic(SQ, box([0, 0], [2, 1]))
        # oracle: candidate is sqrt(2)*[0,1]^2 centred on (1, 0.5); farthest
        # vertex distance, found by brute force over both vertex sets
        s = math.sqrt(2.0)
        cand = box([1 - s / 2, 0.5 - s / 2], [1 + s / 2, 0.5 + s / 2])
        target = box([0, 0], [2, 1])
        dist = max(
            max(target.distance(cand.vertices)), max(cand.distance(target.vertices))
        ) / target.diameter
        assert not res.is_homothetic
        assert res.hausdorff_residual == pytest.approx(dist, rel=1e-12)

    def test_hausdorff_known(self):
        assert hausdorff_distance(SQ, translate(SQ, [0.3, 0])) == pytest.approx(0.3, abs=1e-15)


class TestBox:
    def test_margin_violation(self):
        bx = TruncationBox([0, 0], [2, 2])
        with pytest.raises(TruncationError):
            bx.check([SQ])

    def test_around_passes_check(self):
        bx = TruncationBox.around([SQ, TRI], 0.5)
        bx.check([SQ, TRI], 0.5)

    def test_invalid(self):
        with pytest.raises(ValueError):
            TruncationBox([0, 0], [1, -1])


class TestExtensions:
    BOX = TruncationBox([0, 0], [10, 10])

    def test_cylinder_square(self):
        cyl = cylinder_extend(SQ, [0, 1], self.BOX)
        assert same_vertex_set(cyl, box([0, -10], [1, 10]), 1e-12)

    def test_cylinder_fixed_point(self):
        # a piece of a strip along v and any sub-square of it sweep the same cylinder
        big = TruncationBox([0, 0], [60, 60])
        strip = cylinder_extend(box([0, -10], [1, 10]), [0, 1], big)
        assert same_vertex_set(strip, cylinder_extend(SQ, [0, 1], big), 1e-12)
        assert same_vertex_set(strip, box([0, -60], [1, 60]), 1e-12)

    def test_cylinder_slices(self):
        cyl = cylinder_extend(TRI, [1, 2], self.BOX)
        # slices of a band transverse to v: every translate along v cuts the same area
        band = ConvexBody([[-1, 0], [1, 0], [1, 0.2], [-1, 0.2]])
        vols = [intersect(cyl, translate(band, s * np.array([1.0, 2.0]))).volume for s in (-1, -0.5, 0, 0.5, 1)]
        oracle = shp(band).intersection(Polygon(np.vstack([TRI.vertices - 50 * np.array([1, 2]), TRI.vertices + 50 * np.array([1, 2])])).convex_hull).area
        assert np.ptp(vols) <= 1e-12
        assert vols[2] == pytest.approx(oracle, abs=1e-12)

    def test_cylinder_zero_direction(self):
        with pytest.raises(ValueError):
            cylinder_extend(SQ, [0, 0], self.BOX)

    def test_cylinder_small_box(self):
        with pytest.raises(TruncationError):
            cylinder_extend(SQ, [0, 1], TruncationBox([0, 0], [2, 2]))

    def test_cone_quadrant(self):
        body = box([1, -1], [2, 1])
        cone = cone_extend(body, [0, 0], self.BOX)
        exp = ConvexBody([[0, 0], [10, 10], [10, -10]])
        assert same_vertex_set(cone, exp, 1e-12)

    def test_cone_interior_apex(self):
        body = box([-1, -1], [1, 1])
        cone = cone_extend(body, [0, 0], self.BOX)
        assert same_vertex_set(cone, self.BOX.as_body(), 0)

    @pytest.mark.parametrize("t", [0.25, 0.5, 1.0])
    def test_cone_dilation_invariant(self, t):
        apex = np.array([0.5, -0.5])
        cone = cone_extend(ConvexBody([[2, 0], [3, 1], [2.5, 2]]), apex, self.BOX)
        shrunk = dilate(cone, t, center=apex)
        # inside the box the cone contains its shrunk copies, and the shrunk
        # cone fills the box region of the same radius around the apex
        assert cone.contains(shrunk.vertices, 1e-12).all()
        window = TruncationBox(apex, [t * 9.4, t * 9.4]).as_body()
        a, b = intersect(cone, window), intersect(shrunk, window)
        assert a.volume == pytest.approx(b.volume, rel=1e-12)

    def test_cone_small_box(self):
        with pytest.raises(TruncationError):
            cone_extend(box([1, -1], [2, 1]), [0, 0], TruncationBox([0, 0], [3, 3]))
