"""Brute-force reference oracles: exhaustive route enumeration over coarse
candidate sets, exhaustive convex-subset search in line arrangements, and
knapsack enumeration.

These deliberately avoid the solvers' shortcuts: route weights come from
explicit region unions instead of the marginal telescoping, and convex
subsets are enumerated order-free, so oracle agreement checks both the
dynamic programs and their structural assumptions.
"""

from __future__ import annotations

import itertools
import math

from .config import ToleranceConfig
from .discretize import explicit_candidates
from .errors import CapExceeded
from .geodesic import _pkey, turn_allows_wedge, _reflex_wedge
from .geom import Domain, Point, seg_len, segment_inside
from .region import Region, union_all
from .tour import Tour
from .visibility import _point_vis_cached, visibility_from_segment


def bf_route_oracle(domain: Domain, s: Point, problem: str, value: float,
                    candidate_points: list[Point], *, cap: int = 40,
                    weight_fn=None, node_cap: int = 2_000_000,
                    tol: ToleranceConfig | None = None) -> tuple[float, Tour | None]:
    """Exact optimum over the restricted candidate set by exhaustive
    enumeration of relatively convex, angular-order-increasing closed chains.

    problem "qwrp": minimum length of a tour through s seeing weight >= value
    (hard quota); returns (length, tour).  problem "bwrp": maximum weight of
    a tour of length <= value; returns (weight, tour).
    """
    tol = tol or domain.tol
    if len(candidate_points) > cap:
        raise CapExceeded(f"{len(candidate_points)} candidates exceed oracle cap {cap}")
    weight_fn = weight_fn or (lambda region: region.area)
    s = (float(s[0]), float(s[1]))
    cands = explicit_candidates(domain, s, candidate_points, tol)
    slots = cands.order.slots
    M = len(slots)
    pts = [sl[0] for sl in slots]
    wedges = [_reflex_wedge(domain, p) for p in pts]
    tau = tol.tau
    area_slack = tol.tau_area * max(domain.area, 1.0)

    vis = {}

    def visible(i: int, j: int) -> bool:
        key = (min(i, j), max(i, j))
        hit = vis.get(key)
        if hit is None:
            hit = segment_inside(domain, pts[i], pts[j])
            vis[key] = hit
        return hit

    def seg_region(i: int, j: int) -> Region:
        return visibility_from_segment(domain, (pts[i], pts[j]), tol).region

    v_s = _point_vis_cached(domain, s, tol).region
    w_s = weight_fn(v_s)
    is_quota = problem in ("qwrp", "fptas")
    best_val = math.inf if is_quota else w_s
    best_tour: Tour | None = Tour([s], depot=s) if (not is_quota or w_s >= value - area_slack) else None
    if is_quota and best_tour is not None:
        best_val = 0.0

    nodes = 0
    # DFS states: (slot chain, accumulated region, length)
    stack: list[tuple[list[int], Region, float]] = [([0], v_s, 0.0)]
    while stack:
        nodes += 1
        if nodes > node_cap:
            raise CapExceeded("oracle enumeration node cap exhausted")
        chain, reg, ln = stack.pop()
        last = chain[-1]
        # try closing the tour back to s
        if len(chain) >= 2 and visible(last, M - 1):
            ok = True
            if len(chain) >= 3:
                ok = turn_allows_wedge(pts[chain[-2]], pts[last], s, wedges[last], tau)
            if ok:
                ok = turn_allows_wedge(pts[last], s, pts[chain[1]], wedges[0], tau)
            if ok:
                closed_len = ln + seg_len(pts[last], s)
                if is_quota:
                    if closed_len < best_val - 1e-15:
                        creg = reg.union(seg_region(last, 0))
                        if weight_fn(creg) >= value - area_slack:
                            best_val = closed_len
                            best_tour = Tour([pts[c] for c in chain], depot=s)
                else:
                    if closed_len <= value + tol.abs_len(domain.scale):
                        creg = reg.union(seg_region(last, 0))
                        w = weight_fn(creg)
                        if w > best_val + 1e-15:
                            best_val = w
                            best_tour = Tour([pts[c] for c in chain], depot=s)
        for nxt in range(last + 1, M - 1):
            if seg_len(pts[last], pts[nxt]) <= tol.abs_coord(domain.scale):
                continue
            if not visible(last, nxt):
                continue
            if len(chain) >= 2 and not turn_allows_wedge(
                    pts[chain[-2]], pts[last], pts[nxt], wedges[last], tau):
                continue
            d = ln + seg_len(pts[last], pts[nxt])
            # bound: closing still costs at least the straight-line return
            if is_quota and d + seg_len(pts[nxt], s) >= best_val - 1e-15:
                continue
            if not is_quota and d + seg_len(pts[nxt], s) > value + tol.abs_len(domain.scale):
                continue
            nreg = reg.union(seg_region(last, nxt))
            stack.append((chain + [nxt], nreg, d))
    return best_val, best_tour


# ---------------------------------------------------------------------------
# line arrangement oracle
# ---------------------------------------------------------------------------

def lines_bf_oracle(arr, graph, Q: int, cap_vertices: int = 18) -> float:
    """Optimal quota-Q route length by order-free enumeration of vertex
    subsets: every subset is scanned in hull (centroid-angular) order and its
    chord coverage accumulated; exact for Q in 1..n."""
    from .lines import crossing_masks

    m = len(arr.vertices)
    if m > cap_vertices:
        raise CapExceeded(f"{m} arrangement vertices exceed oracle cap {cap_vertices}")
    masks = crossing_masks(arr)
    best = math.inf
    for v in range(m):
        if bin(arr.incident[v]).count("1") >= Q:
            return 0.0
    for size in range(2, m + 1):
        for sub in itertools.combinations(range(m), size):
            pts = [arr.vertices[v] for v in sub]
            cx = sum(p[0] for p in pts) / size
            cy = sum(p[1] for p in pts) / size
            order = sorted(sub, key=lambda v: math.atan2(
                arr.vertices[v][1] - cy, arr.vertices[v][0] - cx))
            cov = 0
            ln = 0.0
            for a, b in zip(order, order[1:] + order[:1]):
                cov |= masks[a, b]
                ln += graph.dist[a, b]
            if bin(cov).count("1") >= Q and ln < best:
                best = ln
    return best


# ---------------------------------------------------------------------------
# knapsack oracles
# ---------------------------------------------------------------------------

def knapsack_min_weight(weights: list[float], values: list[float],
                        quota: float) -> tuple[float, frozenset[int]]:
    """Inverse knapsack by enumeration: lightest item subset with total value
    at least the quota."""
    m = len(weights)
    if m > 24:
        raise CapExceeded("too many items for exhaustive knapsack")
    best_w = math.inf
    best_set: frozenset[int] = frozenset()
    for mask in range(1 << m):
        v = sum(values[i] for i in range(m) if mask >> i & 1)
        if v + 1e-12 < quota:
            continue
        w = sum(weights[i] for i in range(m) if mask >> i & 1)
        if w < best_w - 1e-12:
            best_w = w
            best_set = frozenset(i for i in range(m) if mask >> i & 1)
    return best_w, best_set


def knapsack_max_value(weights: list[float], values: list[float],
                       budget: float) -> tuple[float, frozenset[int]]:
    """Classic knapsack by enumeration: most valuable subset within budget."""
    m = len(weights)
    if m > 24:
        raise CapExceeded("too many items for exhaustive knapsack")
    best_v = 0.0
    best_set: frozenset[int] = frozenset()
    for mask in range(1 << m):
        w = sum(weights[i] for i in range(m) if mask >> i & 1)
        if w > budget + 1e-12:
            continue
        v = sum(values[i] for i in range(m) if mask >> i & 1)
        if v > best_v + 1e-12:
            best_v = v
            best_set = frozenset(i for i in range(m) if mask >> i & 1)
    return best_v, best_set


# ---------------------------------------------------------------------------
# exhaustive walk oracle for the line-graph orienteering
# ---------------------------------------------------------------------------

def walks_bf_oracle(g2, reward, start: int, budget: float,
                    max_edges: int = 8, node_cap: int = 400_000) -> tuple[float, list[int]]:
    """Best closed walk from `start` of length <= budget by bounded DFS over
    the line graph; exact for small instances."""
    best_r = reward(frozenset([start]))
    best_walk = [start]
    nodes = 0
    stack: list[tuple[list[int], float]] = [([start], 0.0)]
    while stack:
        nodes += 1
        if nodes > node_cap:
            raise CapExceeded("walk oracle node cap exhausted")
        walk, ln = stack.pop()
        cur = walk[-1]
        if cur == start and len(walk) > 1:
            r = reward(frozenset(walk))
            if r > best_r + 1e-15:
                best_r = r
                best_walk = list(walk)
        if len(walk) > max_edges:
            continue
        for nxt, w in g2.adj[cur]:
            if ln + w <= budget + 1e-12:
                stack.append((walk + [nxt], ln + w))
    return best_r, best_walk
