"""Geodesic shortest paths, shortest-path trees, relative convex hulls, and
the geodesic angular order used by the dynamic programs.

Shortest paths run Dijkstra over the visibility graph of the domain vertices
plus the query points; one implementation serves simple polygons and polygons
with holes.  The angular order assigns every candidate a lexicographic key of
signed clockwise turn angles along its geodesic from the depot, so that any
clockwise relatively convex chain visits strictly increasing keys; reflex
vertices get a pre-subtree and a post-subtree copy so they can appear twice
on degenerate (out-and-back) tours.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOL, ToleranceConfig
from .errors import PointOutsideDomain
from .geom import Domain, Point, cross, orientation, seg_len, segment_inside

INF = float("inf")


def _pkey(p: Point) -> tuple[float, float]:
    return (round(float(p[0]), 12), round(float(p[1]), 12))


@dataclass
class GeodesicPath:
    waypoints: list[Point]
    length: float

    def is_segment(self) -> bool:
        return len(self.waypoints) <= 2


@dataclass
class ShortestPathTree:
    root: Point
    nodes: list[Point]
    parent: dict[tuple, tuple | None]
    dist: dict[tuple, float]

    def path_to(self, p: Point) -> GeodesicPath:
        k = _pkey(p)
        if k not in self.dist or self.dist[k] == INF:
            raise PointOutsideDomain(f"no geodesic from root to {p}")
        chain = [k]
        while self.parent[chain[-1]] is not None:
            chain.append(self.parent[chain[-1]])
        chain.reverse()
        pts = [(x, y) for x, y in chain]
        return GeodesicPath(pts, self.dist[k])


# ---------------------------------------------------------------------------
# visibility-graph Dijkstra
# ---------------------------------------------------------------------------

def _domain_vertices(domain: Domain) -> list[Point]:
    out: list[Point] = []
    seen = set()
    for ring in domain.rings():
        for x, y in ring:
            k = (round(float(x), 12), round(float(y), 12))
            if k not in seen:
                seen.add(k)
                out.append((float(x), float(y)))
    return out


def _vg_edges(domain: Domain, nodes: list[Point]) -> list[list[tuple[int, float]]]:
    m = len(nodes)
    adj: list[list[tuple[int, float]]] = [[] for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            a, b = nodes[i], nodes[j]
            d = seg_len(a, b)
            if d == 0.0 or segment_inside(domain, a, b):
                adj[i].append((j, d))
                adj[j].append((i, d))
    return adj


def _dijkstra(adj: list[list[tuple[int, float]]], src: int) -> tuple[list[float], list[int]]:
    """Dijkstra preferring the deepest parent on (near-)ties, so collinear
    chains attach through each other instead of fanning out of the source;
    the angular order relies on this nesting."""
    m = len(adj)
    dist = [INF] * m
    parent = [-1] * m
    dist[src] = 0.0
    pq = [(0.0, src)]
    while pq:
        d, u = heapq.heappop(pq)
        if d > dist[u] + 1e-12 * (1.0 + abs(dist[u])):
            continue
        for v, w in adj[u]:
            nd = d + w
            tol = 1e-12 * (1.0 + nd)
            if nd < dist[v] - tol:
                dist[v] = nd
                parent[v] = u
                heapq.heappush(pq, (nd, v))
            elif nd <= dist[v] + tol and parent[v] != -1 and \
                    dist[u] > dist[parent[v]] + tol:
                parent[v] = u
                heapq.heappush(pq, (dist[v], v))
    return dist, parent


def _anchor_graph(domain: Domain):
    """All-pairs geodesics between the reflex vertices (every geodesic bend
    sits on one); cached on the domain."""
    cached = getattr(domain, "_wr_anchorgraph", None)
    if cached is not None:
        return cached
    anchors: list[Point] = []
    seen = set()
    for p in domain.reflex_vertices():
        k = _pkey(p)
        if k not in seen:
            seen.add(k)
            anchors.append((float(p[0]), float(p[1])))
    adj = _vg_edges(domain, anchors)
    R = len(anchors)
    dist = [[INF] * R for _ in range(R)]
    parent = [[-1] * R for _ in range(R)]
    for i in range(R):
        d, par = _dijkstra(adj, i)
        dist[i] = d
        parent[i] = par
    out = (anchors, dist, parent)
    domain._wr_anchorgraph = out
    return out


def shortest_path(domain: Domain, x: Point, y: Point,
                  tol: ToleranceConfig | None = None) -> GeodesicPath:
    """Geodesic shortest path between two points of the closed domain.

    Direct segment when the endpoints see each other; otherwise the best
    route through the cached reflex-anchor graph, since every geodesic bend
    is a reflex vertex.
    """
    x = (float(x[0]), float(x[1]))
    y = (float(y[0]), float(y[1]))
    for p in (x, y):
        if not domain.contains(p):
            raise PointOutsideDomain(f"{p} outside domain")
    if seg_len(x, y) == 0.0:
        return GeodesicPath([x], 0.0)
    if segment_inside(domain, x, y):
        return GeodesicPath([x, y], seg_len(x, y))
    anchors, dist, parent = _anchor_graph(domain)
    R = len(anchors)
    vis_x = [(i, seg_len(x, anchors[i])) for i in range(R)
             if segment_inside(domain, x, anchors[i])]
    vis_y = [(j, seg_len(y, anchors[j])) for j in range(R)
             if segment_inside(domain, y, anchors[j])]
    best = INF
    best_ij = None
    for i, dx in vis_x:
        for j, dy in vis_y:
            d = dx + dist[i][j] + dy
            if d < best - 1e-15:
                best = d
                best_ij = (i, j)
    if best_ij is None:
        raise PointOutsideDomain("no path inside domain (disconnected input?)")
    i, j = best_ij
    mids = [j]
    while mids[-1] != i:
        p = parent[i][mids[-1]]
        if p == -1:
            break
        mids.append(p)
    mids.reverse()
    waypoints = [x] + [anchors[k] for k in mids] + [y]
    return GeodesicPath(waypoints, best)


def build_spt(domain: Domain, s: Point, candidates: list[Point],
              tol: ToleranceConfig | None = None) -> ShortestPathTree:
    """Tree of geodesic shortest paths from the depot to every candidate
    (domain vertices are implicit tree nodes).

    Geodesics bend only at reflex vertices, so the transit graph is Dijkstra
    over {s} + reflex vertices; every other node attaches to its best visible
    anchor with one visibility test each.
    """
    s = (float(s[0]), float(s[1]))
    if not domain.contains(s):
        raise PointOutsideDomain(f"depot {s} outside domain")
    anchors: list[Point] = [s]
    seen = {_pkey(s)}
    for p in domain.reflex_vertices():
        k = _pkey(p)
        if k not in seen:
            seen.add(k)
            anchors.append((float(p[0]), float(p[1])))
    adj = _vg_edges(domain, anchors)
    dist_a, parent_a = _dijkstra(adj, 0)

    nodes: list[Point] = list(anchors)
    pmap: dict[tuple, tuple | None] = {}
    dmap: dict[tuple, float] = {}
    for i, p in enumerate(anchors):
        k = _pkey(p)
        pmap[k] = _pkey(anchors[parent_a[i]]) if parent_a[i] != -1 else None
        dmap[k] = dist_a[i]

    leaves: list[Point] = []
    for p in list(candidates) + _domain_vertices(domain):
        k = _pkey(p)
        if k not in seen:
            seen.add(k)
            leaves.append((float(p[0]), float(p[1])))
    for p in leaves:
        best = INF
        best_depth = -INF
        best_anchor: tuple | None = None
        for i, a in enumerate(anchors):
            if dist_a[i] == INF:
                continue
            d = dist_a[i] + seg_len(a, p)
            tol = 1e-12 * (1.0 + d)
            if d > best + tol:
                continue
            better = d < best - tol or dist_a[i] > best_depth + tol
            if better and segment_inside(domain, a, p):
                best = min(best, d)
                best_depth = dist_a[i]
                best_anchor = _pkey(a)
        k = _pkey(p)
        nodes.append(p)
        pmap[k] = best_anchor
        dmap[k] = best
    return ShortestPathTree(root=s, nodes=nodes, parent=pmap, dist=dmap)


# ---------------------------------------------------------------------------
# relative-convexity turn predicate
# ---------------------------------------------------------------------------

def _reflex_wedge(domain: Domain, pt: Point) -> tuple[Point, Point] | None:
    """Ring neighbors (prev, next) when pt sits on a reflex vertex."""
    tol_abs = domain.tol.abs_coord(domain.scale)
    for ring in domain.rings():
        n = len(ring)
        for i in range(n):
            v = ring[i]
            if seg_len(pt, (v[0], v[1])) <= tol_abs:
                a, b, c = ring[i - 1], v, ring[(i + 1) % n]
                if orientation(tuple(a), tuple(b), tuple(c), domain.tol) <= 0:
                    return (float(a[0]), float(a[1])), (float(c[0]), float(c[1]))
                return None
    return None


def turn_allows_wedge(prev: Point, joint: Point, nxt: Point,
                      wedge: tuple[Point, Point] | None, tau: float) -> bool:
    """Core clockwise turn test with a precomputed reflex wedge at the joint
    (None when the joint is not a reflex vertex of the domain)."""
    d_in = (joint[0] - prev[0], joint[1] - prev[1])
    d_out = (nxt[0] - joint[0], nxt[1] - joint[1])
    l_in = math.hypot(*d_in)
    l_out = math.hypot(*d_out)
    if l_in == 0.0 or l_out == 0.0:
        return True
    crs = d_in[0] * d_out[1] - d_in[1] * d_out[0]
    if crs <= tau * l_in * l_out:
        return True  # right turn, straight continuation, or reversal
    if wedge is None:
        return False
    (vp, vn) = wedge
    rev_in = (-d_in[0] / l_in, -d_in[1] / l_in)
    out_u = (d_out[0] / l_out, d_out[1] / l_out)
    for g_pt in (vp, vn):
        g = (g_pt[0] - joint[0], g_pt[1] - joint[1])
        lg = math.hypot(*g)
        if lg == 0.0:
            continue
        g = (g[0] / lg, g[1] / lg)
        c1 = out_u[0] * g[1] - out_u[1] * g[0]
        c2 = g[0] * rev_in[1] - g[1] * rev_in[0]
        if c1 < -tau or c2 < -tau:
            return False
    return True


def turn_allows(domain: Domain, prev: Point, joint: Point, nxt: Point) -> bool:
    """Whether a clockwise relatively convex chain may turn prev->joint->nxt.

    Right (clockwise) and straight turns are always allowed; a full reversal
    makes a degenerate antenna tip and is allowed anywhere; left turns are
    allowed only when the joint wraps a reflex vertex of the domain whose
    exterior wedge pokes into the non-region side of the turn.
    """
    return turn_allows_wedge(prev, joint, nxt, _reflex_wedge(domain, joint),
                             domain.tol.tau)


def is_rc_extension(domain: Domain, chain: list[Point], nxt: Point) -> bool:
    """Feasibility test for appending a vertex to a relatively convex chain."""
    if not chain:
        return True
    if not segment_inside(domain, chain[-1], nxt):
        return False
    if len(chain) == 1:
        return True
    return turn_allows(domain, chain[-2], chain[-1], nxt)


# ---------------------------------------------------------------------------
# relative convex hull
# ---------------------------------------------------------------------------

@dataclass
class RelConvexHull:
    boundary: list[Point]  # closed chain, first vertex not repeated
    perimeter: float
    degenerate: bool = False


def _euclid_hull(points: list[Point]) -> list[Point]:
    pts = sorted(set((float(x), float(y)) for x, y in points))
    if len(pts) <= 2:
        return pts
    def half(ps):
        out = []
        for p in ps:
            while len(out) >= 2 and cross(out[-2][0], out[-2][1], out[-1][0], out[-1][1], p[0], p[1]) <= 0:
                out.pop()
            out.append(p)
        return out
    lower = half(pts)
    upper = half(pts[::-1])
    return lower[:-1] + upper[:-1]


def relative_convex_hull(domain: Domain, points: list[Point],
                         tol: ToleranceConfig | None = None) -> RelConvexHull:
    """Relative (geodesic) convex hull of a point set inside the domain.

    Iterated shortcutting: start from the Euclidean hull order, join
    consecutive hull points by geodesics, and drop hull points that turn the
    wrong way until a fixed point; bends of the boundary then alternate input
    points and reflex vertices of the domain.
    """
    tol = tol or domain.tol
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) == 0:
        raise ValueError("need at least one point")
    uniq = sorted(set(pts))
    if len(uniq) == 1:
        return RelConvexHull([uniq[0]], 0.0, degenerate=True)
    hull = _euclid_hull(uniq)
    if len(hull) == 2:
        path = shortest_path(domain, hull[0], hull[1], tol)
        boundary = path.waypoints + path.waypoints[-2:0:-1]
        return RelConvexHull(boundary, 2.0 * path.length, degenerate=True)

    anchors = list(hull)  # CCW
    geo_memo: dict[tuple, list[Point]] = {}

    def geo(a: Point, b: Point) -> list[Point]:
        key = (_pkey(a), _pkey(b))
        hit = geo_memo.get(key)
        if hit is None:
            hit = shortest_path(domain, a, b, tol).waypoints
            geo_memo[key] = hit
        return hit

    for _ in range(4 * len(uniq) + 8):
        cycle: list[Point] = []
        for i in range(len(anchors)):
            a, b = anchors[i], anchors[(i + 1) % len(anchors)]
            wp = geo(a, b)
            cycle.extend(wp[:-1])
        # test each anchor for validity on the cycle boundary
        bad = None
        m = len(cycle)
        pos = {_pkey(p): i for i, p in enumerate(cycle)}
        for a in anchors:
            i = pos.get(_pkey(a))
            if i is None:
                bad = a
                break
            prv, nxt = cycle[i - 1], cycle[(i + 1) % m]
            # boundary is CCW: traverse reversed to reuse the CW turn test
            if not turn_allows(domain, nxt, a, prv):
                bad = a
                break
        if bad is None or len(anchors) <= 3:
            if bad is not None and len(anchors) == 3:
                anchors = [p for p in anchors if p != bad]
                path = shortest_path(domain, anchors[0], anchors[1], tol)
                boundary = path.waypoints + path.waypoints[-2:0:-1]
                return RelConvexHull(boundary, 2.0 * path.length, degenerate=True)
            per = sum(seg_len(cycle[i], cycle[(i + 1) % m]) for i in range(m))
            return RelConvexHull(cycle, per)
        anchors = [p for p in anchors if p != bad]
        if len(anchors) == 2:
            path = shortest_path(domain, anchors[0], anchors[1], tol)
            boundary = path.waypoints + path.waypoints[-2:0:-1]
            return RelConvexHull(boundary, 2.0 * path.length, degenerate=True)
    raise RuntimeError("relative convex hull did not converge")


# ---------------------------------------------------------------------------
# geodesic angular order
# ---------------------------------------------------------------------------

@dataclass
class AngularOrder:
    """Total order on candidate slots for the chain dynamic programs.

    `slots[i]` is (point, node_key, copy_tag); slot 0 is the depot and the
    last slot is the depot's closing copy.  `reflex_duplicates` maps a reflex
    candidate's key to its (pre, post) slot indices.
    """

    slots: list[tuple[Point, tuple, str]]
    reflex_duplicates: dict[tuple, tuple[int, int]] = field(default_factory=dict)

    @property
    def sequence(self) -> list[int]:
        return list(range(len(self.slots)))

    def point(self, i: int) -> Point:
        return self.slots[i][0]

    def __len__(self) -> int:
        return len(self.slots)


def _cw_angle(ref: float, ang: float) -> float:
    """Clockwise angle from direction `ref` to direction `ang` in [0, 2pi)."""
    return (ref - ang) % (2.0 * math.pi)


def _root_reference(domain: Domain, s: Point) -> float:
    """Reference direction at the depot: the cone edge toward the boundary
    predecessor, so interior directions get CW offsets in [0, interior span]."""
    from .visibility import _interior_cone

    cone = _interior_cone(domain, s)
    if cone is None:
        return math.pi  # interior depot: arbitrary fixed cut
    a0, span = cone
    return a0 + span


def angular_order(domain: Domain, spt: ShortestPathTree, candidates: list[Point],
                  reference: float | None = None) -> AngularOrder:
    """Sort candidates in geodesic angular order around the SPT root.

    Keys are tuples of clockwise turn angles along the geodesic; candidates
    on a common geodesic tie-break by distance.  Candidates at reflex domain
    vertices contribute two slots: one before their SPT subtree and one after
    it, accounting for tours that pass the vertex twice.
    """
    s = spt.root
    ref = reference if reference is not None else _root_reference(domain, s)
    key_cache: dict[tuple, tuple] = {_pkey(s): ()}

    def key_of(k: tuple) -> tuple:
        if k in key_cache:
            return key_cache[k]
        par = spt.parent[k]
        if par is None:
            key_cache[k] = ()
            return ()
        base = key_of(par)
        d = (k[0] - par[0], k[1] - par[1])
        ang = math.atan2(d[1], d[0])
        if par == _pkey(s):
            lab = _cw_angle(ref, ang)
        else:
            gp = spt.parent[par]
            din = (par[0] - gp[0], par[1] - gp[1])
            ain = math.atan2(din[1], din[0])
            lab = math.remainder(ain - ang, 2.0 * math.pi)  # cw-positive turn
        key = base + (round(lab, 12),)
        key_cache[k] = key
        return key

    reflex_keys = {_pkey(r) for r in domain.reflex_vertices()}
    skey = _pkey(s)
    entries = []
    seen = set()
    for c in candidates:
        k = _pkey(c)
        if k in seen or k == skey:
            continue
        seen.add(k)
        if spt.dist.get(k, INF) == INF:
            continue
        base = key_of(k)
        d = spt.dist[k]
        if k in reflex_keys:
            entries.append((base + (-INF,), d, k, "pre"))
            entries.append((base + (INF,), d, k, "post"))
        else:
            entries.append((base + (0.0,), d, k, "only"))
    entries.sort(key=lambda e: (e[0], e[1], e[2]))

    slots: list[tuple[Point, tuple, str]] = [((s[0], s[1]), skey, "root")]
    dup: dict[tuple, tuple[int, int]] = {}
    pending: dict[tuple, int] = {}
    for key, d, k, tag in entries:
        slots.append(((k[0], k[1]), k, tag))
        idx = len(slots) - 1
        if tag == "pre":
            pending[k] = idx
        elif tag == "post":
            dup[k] = (pending.pop(k), idx)
    slots.append(((s[0], s[1]), skey, "close"))
    return AngularOrder(slots=slots, reflex_duplicates=dup)
