"""Visibility polygons of points, segments, chains, and marginal regions."""

import math

import numpy as np
import pytest

from watchroute import (PointOutsideDomain, PolygonWithHoles, SegmentLeavesDomain,
                        SimplePolygon, marginal_visibility, random_points_inside,
                        random_simple_polygon, shortest_path, union_all,
                        visibility_from_point, visibility_from_segment,
                        visibility_of_chain)
from conftest import RayOracle, monte_carlo_area, region_membership


def test_point_vis_convex(unit_square):
    v = visibility_from_point(unit_square, (0.3, 0.7))
    assert v.area == pytest.approx(1.0)


def test_point_vis_outside_raises(unit_square):
    with pytest.raises(PointOutsideDomain):
        visibility_from_point(unit_square, (2.0, 2.0))


def test_point_vis_lshape_matches_ray_oracle(lshape):
    for x in [(0.5, 0.5), (1.8, 0.5), (0.2, 1.9), (1.0, 0.5)]:
        mine = visibility_from_point(lshape, x)
        oracle = RayOracle(lshape, x, n_rays=7200)
        assert mine.area == pytest.approx(oracle.area(), rel=5e-4)
        # membership probes
        rng = np.random.default_rng(0)
        pts = np.asarray(random_points_inside(lshape, 1500, seed=9))
        agree = np.mean(region_membership(mine.region, pts) == oracle.sees(pts))
        assert agree >= 0.995


def test_point_vis_exact_window_area(lshape):
    # window through the reflex vertex from (1.8, 0.5): hand-computed area
    v = visibility_from_point(lshape, (1.8, 0.5))
    assert v.area == pytest.approx(2.3125, abs=1e-9)


def test_point_vis_with_hole(unit_square):
    hole = SimplePolygon([(0.45, 0.45), (0.55, 0.45), (0.55, 0.55), (0.45, 0.55)])
    pwh = PolygonWithHoles(unit_square, [hole])
    v = visibility_from_point(pwh, (0.1, 0.1))
    assert v.area < pwh.area
    mc = monte_carlo_area(v.region, pwh.bbox, 200_000, seed=2)
    assert v.area == pytest.approx(mc, rel=0.02)
    oracle = RayOracle(pwh, (0.1, 0.1), n_rays=7200)
    assert v.area == pytest.approx(oracle.area(), rel=2e-3)


def test_visibility_symmetry_sampled():
    rng = np.random.default_rng(4)
    checked = 0
    for seed in range(8):
        poly = random_simple_polygon(12, seed=seed + 40)
        pts = random_points_inside(poly, 17, seed=seed)
        vis = {p: visibility_from_point(poly, p) for p in pts}
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                x, y = pts[i], pts[j]
                a = bool(region_membership(vis[x].region, np.array([y]))[0])
                b = bool(region_membership(vis[y].region, np.array([x]))[0])
                # skip probes hugging the region boundary
                if a != b:
                    import shapely

                    d1 = vis[x].region.shapely().boundary.distance(shapely.points(*y))
                    d2 = vis[y].region.shapely().boundary.distance(shapely.points(*x))
                    assert min(d1, d2) <= 1e-7 * poly.scale, (x, y)
                checked += 1
    assert checked >= 1000


def test_segment_vis_convex_chord(unit_square):
    v = visibility_from_segment(unit_square, ((0.2, 0.2), (0.8, 0.8)))
    assert v.area == pytest.approx(1.0)


def test_segment_vis_degenerate_is_point(lshape):
    p = (0.4, 0.6)
    vs = visibility_from_segment(lshape, (p, p))
    vp = visibility_from_point(lshape, p)
    assert vs.area == pytest.approx(vp.area, abs=1e-12)


def test_segment_vis_leaves_domain(lshape):
    with pytest.raises(SegmentLeavesDomain):
        visibility_from_segment(lshape, ((0.5, 1.8), (1.8, 0.5)))


def test_segment_vis_matches_dense_sampling(lshape):
    # union of point visibilities at 200 samples vs the critical-point union
    seg = ((0.5, 1.5), (1.5, 0.5))
    mine = visibility_from_segment(lshape, seg)
    pieces = []
    for t in np.linspace(0, 1, 200):
        p = (seg[0][0] + t * (seg[1][0] - seg[0][0]),
             seg[0][1] + t * (seg[1][1] - seg[0][1]))
        pieces.append(visibility_from_point(lshape, p).region)
    dense = union_all(pieces)
    assert mine.area == pytest.approx(dense.area, rel=5e-3)
    assert mine.area >= dense.area - 1e-9  # dense sampling can only miss area


def test_segment_monotonicity(lshape):
    seg = ((1.2, 0.3), (1.9, 0.8))
    vs = visibility_from_segment(lshape, seg)
    for t in np.linspace(0, 1, 7):
        p = (seg[0][0] + t * (seg[1][0] - seg[0][0]),
             seg[0][1] + t * (seg[1][1] - seg[0][1]))
        vp = visibility_from_point(lshape, p)
        assert vp.region.difference(vs.region).area <= 1e-9 * lshape.scale ** 2


def test_geodesic_visibility_minimality():
    # the geodesic's visibility region is inclusion-minimal among paths
    poly = random_simple_polygon(12, seed=77)
    pts = random_points_inside(poly, 6, seed=5)
    rng = np.random.default_rng(8)
    for s, t in [(pts[0], pts[1]), (pts[2], pts[3]), (pts[4], pts[5])]:
        geo = shortest_path(poly, s, t)
        v_geo = visibility_of_chain(poly, geo.waypoints)
        for _ in range(3):
            # random simple detour path from s to t via an interior point
            mid = random_points_inside(poly, 1, seed=int(rng.integers(1e6)))[0]
            p1 = shortest_path(poly, s, mid)
            p2 = shortest_path(poly, mid, t)
            path = p1.waypoints + p2.waypoints[1:]
            v_path = visibility_of_chain(poly, path)
            assert v_geo.region.difference(v_path.region).area <= 1e-9 * poly.scale ** 2


def test_marginal_visibility_trivial(unit_square):
    m = marginal_visibility(unit_square, ((0.5, 0.5), (0.9, 0.9)), [(0.1, 0.1), (0.5, 0.5)])
    assert m.area == pytest.approx(0.0, abs=1e-12)


def test_marginal_visibility_degenerate_same_point(lshape):
    s = (0.2, 0.2)
    m = marginal_visibility(lshape, (s, s), [s])
    assert m.area == pytest.approx(0.0, abs=1e-12)


def test_marginal_visibility_lshape_brute_force(lshape):
    s = (1.9, 0.1)
    sj = (1.0, 0.8)
    m = marginal_visibility(lshape, ((s[0], s[1]), sj), [s])
    v_seg = visibility_from_segment(lshape, (s, sj))
    v_s = visibility_from_point(lshape, s)
    direct = v_seg.region.difference(v_s.region)
    assert m.area == pytest.approx(direct.area, abs=1e-12)
    mc = monte_carlo_area(direct, lshape.bbox, 100_000, seed=3)
    assert m.area == pytest.approx(mc, abs=0.02 * lshape.area)


def test_marginal_additivity(lshape):
    base = [(1.9, 0.1), (1.2, 0.6)]
    seg = ((1.2, 0.6), (0.6, 0.9))
    m = marginal_visibility(lshape, seg, base)
    v_base = visibility_of_chain(lshape, base)
    v_seg = visibility_from_segment(lshape, seg)
    u = v_base.region.union(v_seg.region)
    assert v_base.area + m.area == pytest.approx(u.area, abs=4e-9 * lshape.scale ** 2)


def test_marginal_chain_independence(lshape):
    """The marginal against a relatively convex chain equals the marginal
    against the geodesic with the same endpoints."""
    s = (2.0, 0.5)
    si = (1.0, 1.0)
    sj = (0.4, 1.6)
    geo = shortest_path(lshape, s, si)
    chain = [s, (1.5, 0.35), si]  # relatively convex detour to the same point
    m_geo = visibility_from_segment(lshape, (si, sj)).region.difference(
        visibility_of_chain(lshape, geo.waypoints).region)
    m_chain = visibility_from_segment(lshape, (si, sj)).region.difference(
        visibility_of_chain(lshape, chain).region)
    assert m_geo.area == pytest.approx(m_chain.area, abs=1e-9 * lshape.scale ** 2)
