"""Probability-measure search: oracle integration and solver equivalence."""

import numpy as np
import pytest

from watchroute import (BudgetParams, MeasureOracle, QuotaParams, Region,
                        RegionOutsideDomain, explicit_candidates, l_shape,
                        measure_of_region, random_density, solve_bwrp,
                        solve_max_detection, solve_min_time_detection,
                        solve_qwrp_dual)
from watchroute.geom import triangulate_domain
from watchroute.measure import density_doc, density_from_doc


def test_uniform_measure_basics(lshape):
    mu = MeasureOracle.uniform(lshape)
    assert mu.total == pytest.approx(1.0, abs=1e-12)
    assert measure_of_region(mu, lshape, lshape) == pytest.approx(1.0, abs=1e-9)
    half = Region.from_ring([(0, 0), (1, 0), (1, 1), (0, 1)])
    assert measure_of_region(mu, half, lshape) == pytest.approx(1.0 / 3.0, abs=1e-12)


def test_half_square_uniform(unit_square):
    mu = MeasureOracle.uniform(unit_square)
    half = Region.from_ring([(0, 0), (0.5, 0), (0.5, 1), (0, 1)])
    assert mu.measure(half) == pytest.approx(0.5, abs=1e-12)


def test_region_outside_raises(unit_square):
    mu = MeasureOracle.uniform(unit_square)
    bad = Region.from_ring([(0.5, 0.5), (1.5, 0.5), (1.5, 1.5), (0.5, 1.5)])
    with pytest.raises(RegionOutsideDomain):
        measure_of_region(mu, bad, unit_square)


def test_random_density_monte_carlo(lshape):
    raw = random_density(lshape, seed=5)
    mu = MeasureOracle.from_densities(lshape, raw)
    assert mu.total == pytest.approx(1.0, abs=1e-9)
    reg = Region.from_ring([(0.2, 0.2), (1.6, 0.2), (1.6, 0.9), (0.2, 0.9)])
    m = mu.measure(reg)
    # Monte-Carlo with the densities looked up per triangle
    rng = np.random.default_rng(1)
    tri = triangulate_domain(lshape)
    import shapely
    from shapely.geometry import Polygon as ShP

    pts = np.column_stack([rng.uniform(0, 2, 400_000), rng.uniform(0, 2, 400_000)])
    dens = np.zeros(len(pts))
    for t, (i, j, k) in enumerate(tri.triangles):
        tp = ShP([tri.points[i], tri.points[j], tri.points[k]])
        mask = shapely.covers(tp, shapely.points(pts[:, 0], pts[:, 1]))
        dens[mask & (dens == 0)] = mu.density[t]
    inside = shapely.covers(reg.shapely(), shapely.points(pts[:, 0], pts[:, 1]))
    mc = float(np.mean(inside * dens) * 4.0)
    assert m == pytest.approx(mc, rel=0.01)


def test_density_doc_roundtrip(lshape):
    raw = random_density(lshape, seed=2)
    mu = MeasureOracle.from_densities(lshape, raw)
    doc = density_doc(mu)
    mu2 = density_from_doc(doc)
    assert mu2.total == pytest.approx(1.0, abs=1e-9)
    reg = Region.from_ring([(0.1, 0.1), (0.9, 0.1), (0.9, 0.9), (0.1, 0.9)])
    assert mu2.measure(reg) == pytest.approx(mu.measure(reg), rel=1e-12)


def _cands(lshape, s):
    pts = list(lshape.vertices) + [(0.5, 0.5), (1.5, 0.5), (0.5, 1.5), (1.0, 0.5),
                                   (0.5, 1.0)]
    return explicit_candidates(lshape, s, pts)


def test_min_time_trivial_quota(lshape):
    mu = MeasureOracle.uniform(lshape)
    s = (2.0, 0.5)
    tour, t = solve_min_time_detection(lshape, s, mu, p=0.5)
    assert t == 0.0  # the depot already sees 2.25/3 of the mass


def test_min_time_uniform_matches_area_solver(lshape):
    mu = MeasureOracle.uniform(lshape)
    s = (2.0, 0.5)
    cands = _cands(lshape, s)
    p = 0.93
    tour_mu, tm = solve_min_time_detection(lshape, s, mu, p, 0.25, 0.25,
                                           speed=2.0, candidates=cands)
    tour_a = solve_qwrp_dual(lshape, s, QuotaParams(A=p * lshape.area, eps1=0.25, eps2=0.25),
                             candidates=cands)
    assert tour_mu.length == pytest.approx(tour_a.length, abs=1e-9)
    assert tm == pytest.approx(tour_a.length / 2.0, abs=1e-9)


def test_max_detection_uniform_matches_area_solver(lshape):
    mu = MeasureOracle.uniform(lshape)
    s = (2.0, 0.5)
    cands = _cands(lshape, s)
    T = 1.5
    tour_mu, prob = solve_max_detection(lshape, s, mu, T, 0.25, speed=1.0, candidates=cands)
    tour_a = solve_bwrp(lshape, s, BudgetParams(B=T, eps=0.25), candidates=cands)
    assert prob == pytest.approx(tour_a.metadata["measured_weight"] / lshape.area, abs=1e-9)
    assert tour_mu.length == pytest.approx(tour_a.length, abs=1e-9)


def test_max_detection_monotone_in_time(lshape):
    mu = MeasureOracle.uniform(lshape)
    s = (2.0, 0.5)
    cands = _cands(lshape, s)
    prev = -1.0
    for T in np.linspace(0, 2.5, 6):
        _, prob = solve_max_detection(lshape, s, mu, float(T), 0.25, candidates=cands)
        assert -1e-9 <= prob <= 1 + 1e-9
        assert prob >= prev - 1e-9
        prev = prob


def test_skewed_density_steers_route(lshape):
    """All mass in the top leg: the min-time route enters its sightline."""
    tri = triangulate_domain(lshape)
    dens = []
    for i, j, k in tri.triangles:
        cy = (tri.points[i][1] + tri.points[j][1] + tri.points[k][1]) / 3.0
        dens.append(1.0 if cy > 1.0 else 1e-9)
    mu = MeasureOracle.from_densities(lshape, dens)
    s = (2.0, 0.5)
    cands = _cands(lshape, s)
    tour, t = solve_min_time_detection(lshape, s, mu, p=0.9, eps1=0.25, eps2=0.1,
                                       candidates=cands)
    assert t > 0
    # exhaustive oracle over the same candidates with the measure weight
    from watchroute import bf_route_oracle

    opt, _ = bf_route_oracle(lshape, s, "qwrp", 0.9 * (1 - 0.1), cands.points,
                             weight_fn=mu.weight_fn())
    assert tour.length <= 1.25 * opt + 1e-9
