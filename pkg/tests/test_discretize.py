"""Discretization: parameter formulas, overlay candidates, buckets, snapping."""

import math

import numpy as np
import pytest

from watchroute import (BucketSpec, GridSpec, InvalidEpsilon, Tour,
                        TourOutsideWindow, build_candidates,
                        choose_parameters_bwrp, choose_parameters_qwrp,
                        count_candidates, random_points_inside,
                        random_simple_polygon, relative_convex_hull, snap_tour,
                        visibility_of_chain)
from watchroute.discretize import SNAP_LENGTH_COEFF, rounding_loss_bound

SQRT2 = math.sqrt(2.0)


def test_choose_parameters_qwrp_formula_values():
    delta, I = choose_parameters_qwrp(10, 40.0, 100.0, 0.5, 0.5)
    # direct evaluation of the published formulas
    assert delta == pytest.approx(0.5 * 100 / ((16 + 8 * SQRT2) * 10), rel=1e-15)
    assert delta == pytest.approx(0.18305826175840778, rel=1e-12)
    assert I == pytest.approx(0.25 * 40 / (2 * 7 * 0.5 + (32 + 16 * SQRT2) * 10), rel=1e-15)
    assert I == pytest.approx(0.01807422168355879, rel=1e-12)


def test_choose_parameters_qwrp_monotone_in_eps():
    prev = math.inf
    for eps1 in (1.0, 0.5, 0.25, 0.1, 0.01):
        delta, _ = choose_parameters_qwrp(10, 40.0, 100.0, eps1, 0.5)
        assert delta < prev
        prev = delta


def test_choose_parameters_qwrp_invalid():
    with pytest.raises(InvalidEpsilon):
        choose_parameters_qwrp(10, 40.0, 100.0, 0.0, 0.5)
    with pytest.raises(InvalidEpsilon):
        choose_parameters_qwrp(10, 40.0, 100.0, 0.5, 1.5)


def test_choose_parameters_bwrp_formula_and_guarantee():
    n, B, eps = 10, 100.0, 0.5
    delta, I = choose_parameters_bwrp(n, B, eps)
    assert delta == pytest.approx(eps * B / ((16 + 8 * SQRT2) * n), rel=1e-15)
    assert I == pytest.approx(eps * eps * B / (4 * (n - 3) * eps + (64 + 32 * SQRT2) * n), rel=1e-15)
    slack = SNAP_LENGTH_COEFF * delta * n + (2 * (n - 3) + 2 * B / delta) * I
    assert B + slack <= (1 + eps) * B * (1 + 1e-12)


def test_choose_parameters_bwrp_boundary_n3():
    delta, I = choose_parameters_bwrp(3, 60.0, 0.5)
    assert I == pytest.approx(0.25 * 60 / ((64 + 32 * SQRT2) * 3), rel=1e-15)


@pytest.mark.parametrize("eps", [1.0, 0.5, 0.25])
def test_choose_parameters_bwrp_guarantee_random(eps):
    for n, B in [(3, 5.0), (7, 11.0), (25, 400.0)]:
        delta, I = choose_parameters_bwrp(n, B, eps)
        slack = SNAP_LENGTH_COEFF * delta * n + (2 * (n - 3) + 2 * B / delta) * I
        assert B + slack <= (1 + eps) * B * (1 + 1e-12)


def test_bucket_spec():
    b = BucketSpec(I=0.5, count=10, rounding="down")
    assert b.index(1.24) == 2
    assert b.index(1.0) == 2
    up = BucketSpec(I=0.5, count=10, rounding="up")
    assert up.index(1.24) == 3
    assert up.index(1.0) == 2
    with pytest.raises(ValueError):
        BucketSpec(I=-1, count=1, rounding="down")


def test_build_candidates_unit_square(unit_square):
    grid = GridSpec((0.0, 0.0), 0.5, 1.0)
    cs = build_candidates(unit_square, (0.0, 0.0), grid)
    # independent overlay enumeration: lattice + edge/diagonal crossings + vertices
    expect = set()
    lines = [-0.5, -0.25, 0.25, 0.5]
    for x in lines:
        for y in lines:
            if 0 <= x <= 1 and 0 <= y <= 1:
                expect.add((x, y))
    for v in lines:
        if 0 <= v <= 1:
            expect.update({(v, 0.0), (v, 1.0), (0.0, v), (1.0, v)})
            # anti-diagonal (1,0)-(0,1) crossings with x- and y-lines
            expect.add((v, 1 - v))
            expect.add((1 - v, v))
    expect.update({(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)})
    got = {(round(x, 9), round(y, 9)) for x, y in cs.points}
    assert got == expect
    assert count_candidates(unit_square, (0.0, 0.0), grid) >= len(cs.points)


def test_build_candidates_degenerate_grid(unit_square):
    # pixel larger than the diameter: only polygon vertices and the depot
    grid = GridSpec((0.5, 0.5), 4.0, 8.0)
    cs = build_candidates(unit_square, (0.5, 0.5), grid)
    assert set(cs.points) == {(0.5, 0.5), (0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)}


def test_candidate_count_growth_law():
    # counts grow like n^2 / eps^2 with a modest fitted constant
    cs = {}
    for n in (10, 20):
        poly = random_simple_polygon(n, seed=n)
        s = poly.vertices[0]
        for eps in (1.0, 0.5):
            delta, _ = choose_parameters_qwrp(n, poly.area / 2, poly.scale, eps, 0.5)
            grid = GridSpec(s, delta, poly.scale)
            cs[(n, eps)] = count_candidates(poly, s, grid)
    for (n, eps), cnt in cs.items():
        c_fit = cnt * eps ** 2 / n ** 2
        assert c_fit <= 800.0, (n, eps, cnt)


def test_cell_geometry_bounds(lshape):
    grid = GridSpec((0.2, 0.2), 0.25, 2.0)
    cs = build_candidates(lshape, (0.2, 0.2), grid)
    for cell in cs.cells:
        xs = [p[0] for p in cell]
        ys = [p[1] for p in cell]
        if not all(grid.in_window(p) for p in cell):
            continue
        diam = math.hypot(max(xs) - min(xs), max(ys) - min(ys))
        per = sum(math.hypot(cell[i][0] - cell[i - 1][0], cell[i][1] - cell[i - 1][1])
                  for i in range(len(cell)))
        assert diam <= grid.delta * SQRT2 + 1e-9
        assert per <= 4 * grid.delta + 1e-9


def test_snap_tour_fixed_point_and_degenerate(lshape):
    grid = GridSpec((0.25, 0.25), 0.25, 3.9)
    cs = build_candidates(lshape, (0.25, 0.25), grid)
    keyset = {(round(x, 9), round(y, 9)) for x, y in cs.points}
    # degenerate tour at the depot snaps to (at most) its cell boundary
    t0 = Tour([(0.25, 0.25)])
    s0 = snap_tour(lshape, t0, cs)
    assert s0.length <= 4 * grid.delta + 1e-9
    assert s0.length <= SNAP_LENGTH_COEFF * grid.delta * lshape.n


@pytest.mark.parametrize("seed", range(10))
def test_snap_lemma_random_tours(seed):
    poly = random_simple_polygon(10, seed=seed + 200)
    s = poly.vertices[0]
    grid = GridSpec(s, poly.scale / 10.0, poly.scale * 2.5)
    cs = build_candidates(poly, s, grid, cap=4000)
    pts = random_points_inside(poly, 4, seed=seed)
    hull = relative_convex_hull(poly, pts)
    tour = Tour(hull.boundary if not hull.degenerate else hull.boundary)
    snapped = snap_tour(poly, tour, cs)
    bound = tour.length + SNAP_LENGTH_COEFF * grid.delta * poly.n
    assert snapped.length <= bound + 1e-9 * poly.scale
    keyset = {(round(x, 9), round(y, 9)) for x, y in cs.points}
    for v in snapped.vertices:
        assert (round(v[0], 9), round(v[1], 9)) in keyset
    v_old = visibility_of_chain(poly, tour.closed_chain())
    v_new = visibility_of_chain(poly, snapped.closed_chain())
    lost = v_old.region.difference(v_new.region).area
    assert lost <= 1e-9 * poly.area


def test_snap_outside_window_raises(lshape):
    grid = GridSpec((0.2, 0.2), 0.1, 0.4)
    cs = build_candidates(lshape, (0.2, 0.2), grid)
    with pytest.raises(TourOutsideWindow):
        snap_tour(lshape, Tour([(1.8, 0.8), (1.9, 0.9), (1.7, 0.95)]), cs)


def test_rounding_loss_bound_formula():
    n, L = 10, 100.0
    delta, I = choose_parameters_qwrp(n, 40.0, L, 0.5, 0.5)
    loss = rounding_loss_bound(n, L, delta, I)
    # by construction the loss bound equals eps2 * A
    assert loss == pytest.approx(0.5 * 40.0, rel=1e-12)
