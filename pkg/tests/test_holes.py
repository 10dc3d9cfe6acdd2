"""Polygons with holes: snapping, line graph, reward oracle, recursive greedy."""

import math

import numpy as np
import pytest

from watchroute import (GridSpec, RewardOracle, Tour, build_candidates,
                        build_g1, build_g2, recursive_greedy, snap_with_holes,
                        solve_bwrp_holes, square_with_hole, visibility_of_chain,
                        walks_bf_oracle)
from watchroute.holes import Walk, _g2_shortest


@pytest.fixture
def pwh():
    return square_with_hole(side=4.0, hole_side=1.0)


@pytest.fixture
def ring_g2(pwh):
    pts = [(0.5, 0.5), (3.5, 0.5), (3.5, 3.5), (0.5, 3.5)]
    g1 = build_g1(pwh, pts)
    return g1, build_g2(g1)


def test_g1_edges_respect_hole(pwh):
    pts = [(0.5, 0.5), (3.5, 0.5), (3.5, 3.5), (0.5, 3.5)]
    g1 = build_g1(pwh, pts)
    # diagonals are blocked by the central hole
    assert sorted(g1.edges) == [(0, 1), (0, 3), (1, 2), (2, 3)]


def test_g2_walk_length_correspondence(ring_g2):
    g1, g2 = ring_g2
    nid_of = {(u, v, e): i for i, (u, v, e) in enumerate(g2.dir_nodes)}
    rng = np.random.default_rng(3)
    adj1 = {}
    for e, (u, v) in enumerate(g1.edges):
        adj1.setdefault(u, []).append((v, e))
        adj1.setdefault(v, []).append((u, e))
    done = 0
    for _ in range(50):
        walk = [int(rng.integers(len(g1.nodes)))]
        crossings = []
        length = 0.0
        for _ in range(rng.integers(2, 6)):
            v, e = adj1[walk[-1]][rng.integers(len(adj1[walk[-1]]))]
            crossings.append((walk[-1], v, e))
            length += g1.weights[e]
            walk.append(v)
        back = [(v, e) for v, e in adj1[walk[-1]] if v == walk[0]]
        if not back:
            continue
        v, e = back[0]
        crossings.append((walk[-1], v, e))
        length += g1.weights[e]
        nodes = [nid_of[c] for c in crossings]
        g2_len = 0.0
        for a, b in zip(nodes, nodes[1:] + nodes[:1]):
            w = dict(g2.adj[a]).get(b)
            assert w is not None, "closed G1 walk must map to adjacent G2 nodes"
            g2_len += w
        assert g2_len == pytest.approx(length, abs=1e-12)
        done += 1
    assert done >= 10


def test_reward_monotone_submodular(pwh, ring_g2):
    _, g2 = ring_g2
    reward = RewardOracle(pwh, g2)
    rng = np.random.default_rng(0)
    ids = list(range(len(g2)))
    for _ in range(200):
        S = frozenset(rng.choice(ids, rng.integers(0, 4), replace=False).tolist())
        T = S | frozenset(rng.choice(ids, rng.integers(0, 4), replace=False).tolist())
        x = int(rng.choice(ids))
        assert reward(S) <= reward(T) + 1e-9
        gain_s = reward(S | {x}) - reward(S)
        gain_t = reward(T | {x}) - reward(T)
        assert gain_s >= gain_t - 1e-9


def test_recursive_greedy_trivial_budget(ring_g2, pwh):
    _, g2 = ring_g2
    reward = RewardOracle(pwh, g2)
    w = recursive_greedy(g2, reward, 0, 0, 0.0, depth=2)
    assert w.nodes == [0]


class TableReward:
    """Abstract coverage reward over ground items attached to G2 nodes."""

    def __init__(self, g2, items):
        self.g2 = g2
        self.items = items  # per g1-edge list of (item, weight)

    def __call__(self, nodes):
        got = {}
        for n in nodes:
            for item, w in self.items[self.g2.g1_edge(n)]:
                got[item] = max(got.get(item, 0.0), w)
        return sum(got.values())


def abstract_instance(seed):
    """Small integer-weighted G2 via a random G1 graph."""
    from watchroute.holes import LineGraphG2, VisibilityGraphG1

    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 6))
    nodes = [(float(i), 0.0) for i in range(n)]
    edges, weights = [], []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.6 or j == i + 1:
                edges.append((i, j))
                weights.append(float(rng.integers(1, 4)))
    g1 = VisibilityGraphG1(nodes, edges, weights)
    dir_nodes = []
    for e, (u, v) in enumerate(edges):
        dir_nodes.append((u, v, e))
        dir_nodes.append((v, u, e))
    out_of = {}
    for nid, (u, v, e) in enumerate(dir_nodes):
        out_of.setdefault(u, []).append(nid)
    adj = [[] for _ in range(len(dir_nodes))]
    for nid, (u, v, e) in enumerate(dir_nodes):
        for nxt in out_of.get(v, []):
            adj[nid].append((nxt, 0.5 * (weights[e] + weights[dir_nodes[nxt][2]])))
    g2 = LineGraphG2(g1, dir_nodes, adj)
    items = []
    for e in range(len(edges)):
        its = [(int(rng.integers(0, 8)), float(rng.integers(1, 5)))
               for _ in range(rng.integers(1, 3))]
        items.append(its)
    return g2, TableReward(g2, items)


@pytest.mark.parametrize("seed", range(5))
def test_recursive_greedy_guarantee_abstract(seed):
    g2, reward = abstract_instance(seed)
    if len(g2) > 15 * 2:
        pytest.skip("instance larger than intended")
    budget = 9.0
    start = 0
    opt, opt_walk = walks_bf_oracle(g2, reward, start, budget, max_edges=6)
    k = max(len(opt_walk) - 1, 1)
    depth = max(1, math.ceil(math.log2(max(2, k))))
    grid = [float(b) for b in np.arange(0.0, budget + 0.5, 0.5)]
    w = recursive_greedy(g2, reward, start, start, budget, depth, budget_grid=grid)
    got = reward(frozenset(w.nodes))
    factor = 1.0 / (1.0 + math.ceil(math.log2(max(2, k))))
    assert got >= opt * factor - 1e-9
    assert w.length <= budget + 1e-9


def test_solve_bwrp_holes_ring(pwh):
    pts = [(0.5, 0.5), (3.5, 0.5), (3.5, 3.5), (0.5, 3.5)]
    t = solve_bwrp_holes(pwh, (0.5, 0.5), B=12.0, eps=0.25,
                         candidate_points=pts, depth=3)
    assert t.length <= 12.0 * 1.25 + 1e-9
    assert t.metadata["measured_weight"] == pytest.approx(pwh.area, abs=1e-9)
    assert t.metadata["k"] >= 3


def test_solve_bwrp_holes_zero_budget(pwh):
    t = solve_bwrp_holes(pwh, (0.5, 0.5), B=0.0, eps=0.25,
                         candidate_points=[(0.5, 0.5)])
    from watchroute import visibility_from_point

    assert t.metadata["measured_weight"] == pytest.approx(
        visibility_from_point(pwh, (0.5, 0.5)).area, abs=1e-9)


def test_solve_bwrp_holes_no_holes_convex(unit_square):
    t = solve_bwrp_holes(unit_square, (0.0, 0.0), B=1.0, eps=0.25,
                         candidate_points=[(0.0, 0.0), (0.5, 0.5)])
    assert t.metadata["measured_weight"] == pytest.approx(1.0, abs=1e-9)


def test_snap_with_holes_fixed_shape(pwh):
    grid = GridSpec((0.5, 0.5), 0.5, 8.0)
    cs = build_candidates(pwh, (0.5, 0.5), grid, cap=5000)
    tour = Tour([(0.6, 0.6), (3.3, 0.7), (3.2, 3.2), (0.7, 3.3)])
    snapped = snap_with_holes(pwh, tour, cs)
    # candidate vertices only
    keyset = {(round(x, 9), round(y, 9)) for x, y in cs.points}
    for v in snapped.vertices:
        assert (round(v[0], 9), round(v[1], 9)) in keyset
    # visibility containment
    v_old = visibility_of_chain(pwh, tour.closed_chain())
    v_new = visibility_of_chain(pwh, snapped.closed_chain())
    assert v_old.region.difference(v_new.region).area <= 1e-9 * pwh.area
    # length overhead: per edge at most 2*sqrt(2)*delta plus the cell loops
    per_cell = max(sum(math.hypot(c[i][0] - c[i - 1][0], c[i][1] - c[i - 1][1])
                       for i in range(len(c))) for c in cs.cells)
    bound = tour.length + len(tour.vertices) * (per_cell + 2 * math.sqrt(2) * grid.delta)
    assert snapped.length <= bound + 1e-9


def test_snap_with_holes_preserves_winding(pwh):
    """The snapped loop crosses the same axis rays from the hole center the
    same net number of times (same homotopy class)."""
    grid = GridSpec((0.5, 0.5), 0.5, 8.0)
    cs = build_candidates(pwh, (0.5, 0.5), grid, cap=5000)
    tour = Tour([(0.6, 0.6), (3.3, 0.7), (3.2, 3.2), (0.7, 3.3)])
    snapped = snap_with_holes(pwh, tour, cs)

    def winding(verts, center=(2.0, 2.0)):
        total = 0.0
        for a, b in zip(verts, verts[1:] + verts[:1]):
            a1 = math.atan2(a[1] - center[1], a[0] - center[0])
            a2 = math.atan2(b[1] - center[1], b[0] - center[0])
            d = a2 - a1
            while d > math.pi:
                d -= 2 * math.pi
            while d < -math.pi:
                d += 2 * math.pi
            total += d
        return round(total / (2 * math.pi))

    assert winding(tour.vertices) == winding(snapped.vertices) != 0
