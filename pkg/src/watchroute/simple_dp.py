"""Core route solvers for simple polygons: the quota-route dual
approximation, the budgeted-route approximation, the quota FPTAS, the
floating (no-depot) heuristic, and the interior-depot wrapper.

Both dynamic programs run over directed candidate-pair states ("the chain
arrived at j coming from i") so the relative-convexity turn test depends only
on the state and not on the bucket axis; per transition the whole bucket axis
is updated with one vectorized shift.  Chain visibility is accounted through
marginal regions V(seg(i,j)) \\ V(geodesic(s,i)), which by the visibility
substructure of relatively convex chains equals the marginal against the
whole chain, so the accounting telescopes exactly.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOL, ToleranceConfig
from .errors import CandidateCapExceeded, InfeasibleQuota, PointOutsideDomain
from .discretize import (
    BucketSpec,
    CandidateSet,
    GridSpec,
    SNAP_LENGTH_COEFF,
    build_candidates,
    choose_parameters_bwrp,
    choose_parameters_qwrp,
    explicit_candidates,
    rounding_loss_bound,
)
from .geodesic import _pkey, _reflex_wedge, shortest_path, turn_allows_wedge
from .geom import Domain, Point, seg_len, segment_inside
from .region import Region, union_all
from .tour import Tour
from .visibility import (
    _point_vis_cached,
    visibility_from_point,
    visibility_from_segment,
)

INF = float("inf")
DEFAULT_DP_CELL_CAP = 20_000_000
DEFAULT_DP_CANDIDATE_CAP = 120


@dataclass(frozen=True)
class QuotaParams:
    A: float
    eps1: float = 0.25
    eps2: float = 0.25


@dataclass(frozen=True)
class BudgetParams:
    B: float
    eps: float = 0.25


# ---------------------------------------------------------------------------
# marginal-visibility cache
# ---------------------------------------------------------------------------

class MarginalCache:
    """Per-(domain, depot, candidate set) cache of geodesic visibility,
    segment visibility, and marginal weights.

    `weight_fn` maps a Region to its value (area by default; a probability
    measure for the stochastic-search solvers)."""

    def __init__(self, domain: Domain, s: Point, candidates: CandidateSet,
                 weight_fn=None, tol: ToleranceConfig | None = None):
        self.domain = domain
        self.s = (float(s[0]), float(s[1]))
        self.cs = candidates
        self.slots = candidates.order.slots
        self.M = len(self.slots)
        self.pts: list[Point] = [sl[0] for sl in self.slots]
        self.tol = tol or domain.tol
        self.weight_fn = weight_fn or (lambda region: region.area)
        self._geo_vis: dict[tuple, Region] = {}
        self._marg: dict[tuple, float] = {}
        self._vis_pair: dict[frozenset, bool] = {}
        self.wedges = [_reflex_wedge(domain, p) for p in self.pts]
        self.w0 = self.weight_fn(self.geodesic_visibility(_pkey(self.s)))

    # visibility of the geodesic from s to node k, built down the SPT
    def geodesic_visibility(self, k: tuple) -> Region:
        hit = self._geo_vis.get(k)
        if hit is not None:
            return hit
        par = self.cs.spt.parent.get(k)
        if par is None:
            reg = _point_vis_cached(self.domain, k, self.tol).region
        else:
            base = self.geodesic_visibility(par)
            seg_reg = visibility_from_segment(self.domain, (par, k), self.tol).region
            reg = base.union(seg_reg)
        self._geo_vis[k] = reg
        return reg

    def visible(self, i: int, j: int) -> bool:
        a, b = self.pts[i], self.pts[j]
        key = frozenset((_pkey(a), _pkey(b)))
        hit = self._vis_pair.get(key)
        if hit is None:
            hit = segment_inside(self.domain, a, b)
            self._vis_pair[key] = hit
        return hit

    def marginal(self, i: int, j: int) -> float:
        """Weight of V(seg(p_i, p_j)) \\ V(geodesic(s, p_i))."""
        ka, kb = _pkey(self.pts[i]), _pkey(self.pts[j])
        key = (ka, kb)
        hit = self._marg.get(key)
        if hit is None:
            seg_vis = visibility_from_segment(self.domain, (self.pts[i], self.pts[j]), self.tol)
            base = self.geodesic_visibility(ka)
            hit = max(0.0, self.weight_fn(seg_vis.region.difference(base)))
            self._marg[key] = hit
        return hit

    def edge_len(self, i: int, j: int) -> float:
        return seg_len(self.pts[i], self.pts[j])


# ---------------------------------------------------------------------------
# edge-state tables
# ---------------------------------------------------------------------------

@dataclass
class _EdgeSet:
    tails: np.ndarray
    heads: np.ndarray
    lengths: np.ndarray
    by_head: list[list[int]]
    by_tail: list[list[int]]

    def __len__(self):
        return len(self.tails)


def _build_edges(cache: MarginalCache) -> _EdgeSet:
    M = cache.M
    tol_abs = cache.tol.abs_coord(cache.domain.scale)
    tails, heads, lengths = [], [], []
    by_head: list[list[int]] = [[] for _ in range(M)]
    by_tail: list[list[int]] = [[] for _ in range(M)]
    for v in range(1, M):
        for u in range(0, v):
            if u == 0 and v == M - 1:
                continue  # the empty tour is handled separately
            d = cache.edge_len(u, v)
            if d <= tol_abs:
                continue
            if not cache.visible(u, v):
                continue
            e = len(tails)
            tails.append(u)
            heads.append(v)
            lengths.append(d)
            by_head[v].append(e)
            by_tail[u].append(e)
    return _EdgeSet(np.asarray(tails, dtype=np.int32),
                    np.asarray(heads, dtype=np.int32),
                    np.asarray(lengths, dtype=float), by_head, by_tail)


def _turn_ok(cache: MarginalCache, t: int, i: int, j: int) -> bool:
    return turn_allows_wedge(cache.pts[t], cache.pts[i], cache.pts[j],
                             cache.wedges[i], cache.tol.tau)


# ---------------------------------------------------------------------------
# quota DP (minimize length subject to bucketed area quota)
# ---------------------------------------------------------------------------

@dataclass
class QuotaDPResult:
    feasible: bool
    tour: Tour | None
    length: float
    dp_weight_buckets: int
    diagnostics: dict


def _run_quota_dp(cache: MarginalCache, I: float, target_buckets: int,
                  cell_cap: int = DEFAULT_DP_CELL_CAP) -> tuple:
    """Fill the (edge, bucket) table; returns (edges, marg_b, val, bp, b0)."""
    edges = _build_edges(cache)
    E = len(edges)
    K = max(0, int(target_buckets))
    if E * (K + 1) > cell_cap:
        raise CandidateCapExceeded(
            f"DP table {E}x{K + 1} exceeds cell cap {cell_cap}")
    marg_b = np.zeros(E, dtype=np.int64)
    for e in range(E):
        marg_b[e] = int(math.floor(cache.marginal(int(edges.tails[e]), int(edges.heads[e])) / I + 1e-12))
    b0 = int(math.floor(cache.w0 / I + 1e-12))
    val = np.full((E, K + 1), INF)
    bp = np.full((E, K + 1), -1, dtype=np.int32)
    for v in range(1, cache.M):
        for e2 in edges.by_head[v]:
            u = int(edges.tails[e2])
            m = int(marg_b[e2])
            le = float(edges.lengths[e2])
            row = val[e2]
            if u == 0:
                b = min(b0 + m, K)
                if le < row[b]:
                    row[b] = le
                    bp[e2, b] = -2
            for e1 in edges.by_head[u]:
                if not _turn_ok(cache, int(edges.tails[e1]), u, v):
                    continue
                src = val[e1]
                if m == 0:
                    cand = src + le
                elif m <= K:
                    cand = np.full(K + 1, INF)
                    if K > m:
                        cand[m:K] = src[:K - m] + le
                    tail_min = src[max(0, K - m):].min()
                    cand[K] = tail_min + le
                else:
                    cand = np.full(K + 1, INF)
                    cand[K] = src.min() + le
                upd = cand < row - 1e-15
                if np.any(upd):
                    row[upd] = cand[upd]
                    bp[e2, upd] = e1
    return edges, marg_b, val, bp, b0


def _reconstruct_chain(edges: _EdgeSet, marg_or_cost: np.ndarray, val: np.ndarray,
                       bp: np.ndarray, e: int, b: int, K: int, clamp: bool) -> list[int] | None:
    chain = []
    guard = 0
    while True:
        guard += 1
        if guard > 10000:
            return None
        chain.append(e)
        pe = int(bp[e, b])
        if pe == -2:
            break
        if pe < 0:
            return None
        m = int(marg_or_cost[e])
        if clamp and b == K:
            lo = max(0, K - m)
            b = lo + int(np.argmin(val[pe, lo:] if m else val[pe, K:K + 1]))
            if m == 0:
                b = K
        else:
            b = b - m
        e = pe
    chain.reverse()
    return chain


def _chain_vertices(cache: MarginalCache, chain: list[int], edges: _EdgeSet) -> list[Point]:
    verts = [cache.pts[0]]
    for e in chain[:-1]:
        verts.append(cache.pts[int(edges.heads[e])])
    return verts


def _cycle_valid(cache: MarginalCache, verts: list[Point]) -> bool:
    """Closure turn at the depot plus a proper-crossing scan; interior turns
    were already enforced transition by transition."""
    n = len(verts)
    if n <= 2:
        return True
    if not turn_allows_wedge(verts[-1], verts[0], verts[1], cache.wedges[0], cache.tol.tau):
        return False
    tol = cache.tol
    from .geom import _proper_cross

    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j or i == (j + 1) % n:
                continue
            c, d = verts[j], verts[(j + 1) % n]
            if _proper_cross(a, b, c, d, tol):
                return False
    return True


def _measure_tour(cache: MarginalCache, verts: list[Point]) -> tuple[Tour, float]:
    tour = Tour(verts, depot=cache.s)
    vr = tour.measure_seen(cache.domain, cache.tol)
    return tour, cache.weight_fn(vr.region)


def solve_quota_over_candidates(cache: MarginalCache, A: float, I: float,
                                reduced_quota: float,
                                cell_cap: int = DEFAULT_DP_CELL_CAP,
                                max_validated: int = 200) -> QuotaDPResult:
    """One quota DP pass at bucket width I against `reduced_quota`; the
    returned tour's re-measured weight is guaranteed >= reduced_quota."""
    if reduced_quota <= cache.w0 + 1e-15 * max(1.0, abs(A)):
        t = Tour([cache.s], depot=cache.s)
        vr = t.measure_seen(cache.domain, cache.tol)
        t.metadata["measured_weight"] = cache.weight_fn(vr.region)
        return QuotaDPResult(True, t, 0.0, 0, {"degenerate": True})
    K = int(math.ceil(reduced_quota / I - 1e-12))
    edges, marg_b, val, bp, b0 = _run_quota_dp(cache, I, K, cell_cap)
    close_edges = [e for e in edges.by_head[cache.M - 1]]
    cands = [(float(val[e, K]), e) for e in close_edges if np.isfinite(val[e, K])]
    cands.sort()
    diagnostics = {"buckets": K + 1, "edges": len(edges), "candidates": cache.M}
    for rank, (length, e) in enumerate(cands[:max_validated]):
        chain = _reconstruct_chain(edges, marg_b, val, bp, e, K, K, clamp=True)
        if chain is None:
            continue
        verts = _chain_vertices(cache, chain, edges)
        if not _cycle_valid(cache, verts):
            continue
        tour, measured = _measure_tour(cache, verts)
        tour.metadata.update({"dp_length": length, "dp_rank": rank,
                              "bucket_width": I, "measured_weight": measured})
        residue = sum(cache.marginal(int(edges.tails[c]), int(edges.heads[c]))
                      - int(marg_b[c]) * I for c in chain)
        tour.metadata["rounding_residue"] = residue
        return QuotaDPResult(True, tour, tour.length, K, diagnostics)
    return QuotaDPResult(False, None, INF, K, diagnostics)


# ---------------------------------------------------------------------------
# budget DP (maximize weight subject to bucketed length budget)
# ---------------------------------------------------------------------------

@dataclass
class BudgetDPResult:
    tour: Tour | None
    weight: float
    diagnostics: dict


def solve_budget_over_candidates(cache: MarginalCache, budget_buckets: int, I: float,
                                 cell_cap: int = DEFAULT_DP_CELL_CAP,
                                 max_validated: int = 200) -> BudgetDPResult:
    """One budget DP pass: maximum chain weight over closed tours whose
    rounded-up edge lengths sum to at most `budget_buckets` buckets of I."""
    edges = _build_edges(cache)
    E = len(edges)
    K = max(0, int(budget_buckets))
    if E * (K + 1) > cell_cap:
        raise CandidateCapExceeded(f"DP table {E}x{K + 1} exceeds cell cap {cell_cap}")
    cost_b = np.zeros(E, dtype=np.int64)
    wgt = np.zeros(E, dtype=float)
    for e in range(E):
        u, v = int(edges.tails[e]), int(edges.heads[e])
        cost_b[e] = int(math.ceil(edges.lengths[e] / I - 1e-12))
        wgt[e] = cache.marginal(u, v)
    val = np.full((E, K + 1), -INF)
    bp = np.full((E, K + 1), -1, dtype=np.int32)
    for v in range(1, cache.M):
        for e2 in edges.by_head[v]:
            u = int(edges.tails[e2])
            c = int(cost_b[e2])
            w = float(wgt[e2])
            if c > K:
                continue
            row = val[e2]
            if u == 0:
                if cache.w0 + w > row[c]:
                    row[c] = cache.w0 + w
                    bp[e2, c] = -2
            for e1 in edges.by_head[u]:
                if not _turn_ok(cache, int(edges.tails[e1]), u, v):
                    continue
                src = val[e1]
                cand = np.full(K + 1, -INF)
                if c == 0:
                    cand = src + w
                else:
                    cand[c:] = src[:K + 1 - c] + w
                upd = cand > row + 1e-15
                if np.any(upd):
                    row[upd] = cand[upd]
                    bp[e2, upd] = e2 * 0 + np.int32(e1)
    # answer: best validated closing entry; the stand-still tour is the floor
    best = BudgetDPResult(None, -INF, {"buckets": K + 1, "edges": E, "candidates": cache.M})
    stand = Tour([cache.s], depot=cache.s)
    stand.measure_seen(cache.domain, cache.tol)
    stand.metadata["measured_weight"] = cache.w0
    best = BudgetDPResult(stand, cache.w0, best.diagnostics)
    close = edges.by_head[cache.M - 1]
    if close:
        flat = [(float(val[e, b]), e, b) for e in close for b in range(K + 1)
                if np.isfinite(val[e, b])]
        flat.sort(reverse=True)
        for rank, (w, e, b) in enumerate(flat[:max_validated]):
            if w <= best.weight + 1e-15:
                break
            chain = _reconstruct_chain(edges, cost_b, val, bp, e, b, K, clamp=False)
            if chain is None:
                continue
            verts = _chain_vertices(cache, chain, edges)
            if not _cycle_valid(cache, verts):
                continue
            tour, measured = _measure_tour(cache, verts)
            tour.metadata.update({"dp_weight": w, "dp_rank": rank,
                                  "bucket_width": I, "measured_weight": measured})
            if measured > best.weight + 1e-15:
                best = BudgetDPResult(tour, measured, best.diagnostics)
            break
    return best


# ---------------------------------------------------------------------------
# scale search helpers
# ---------------------------------------------------------------------------

def _diag(domain: Domain) -> float:
    x0, y0, x1, y1 = domain.bbox
    return math.hypot(x1 - x0, y1 - y0)


def _is_interior(domain: Domain, s: Point) -> bool:
    from .visibility import _interior_cone

    return _interior_cone(domain, s) is None


def _interior_probe_points(domain: Domain) -> list[Point]:
    """Coarse probe set for the interior-depot wrapper: domain vertices plus
    triangulation-diagonal midpoints."""
    from .geom import triangulate_domain

    pts = [(float(x), float(y)) for ring in domain.rings() for x, y in ring]
    tri = triangulate_domain(domain)
    for i, j in tri.diagonals:
        a, b = tri.points[i], tri.points[j]
        pts.append(((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0))
    return pts


def _coarsen_grid(domain: Domain, s: Point, delta: float, L: float,
                  dp_candidate_cap: int) -> tuple[GridSpec, float]:
    """Grow delta until the overlay stays within the DP-practical candidate
    cap; the coarsening factor scales the snapping term of the guarantee and
    is reported to the caller."""
    from .discretize import count_candidates

    factor = 1.0
    d = delta
    for _ in range(64):
        grid = GridSpec(s, d, max(L, d))
        if count_candidates(domain, s, grid) <= dp_candidate_cap:
            return grid, factor
        d *= 1.6
        factor *= 1.6
    raise CandidateCapExceeded("cannot coarsen the grid to a solvable size")


def _degenerate_tour(domain: Domain, s: Point, tol: ToleranceConfig,
                     weight_fn=None) -> Tour:
    t = Tour([(float(s[0]), float(s[1]))], depot=(float(s[0]), float(s[1])))
    vr = t.measure_seen(domain, tol)
    if weight_fn is not None:
        t.metadata["measured_weight"] = weight_fn(vr.region)
    else:
        t.metadata["measured_weight"] = vr.region.area
    return t


def _antenna_bound(domain: Domain, s: Point, quota: float, weight_fn, tol) -> tuple[float, Point] | None:
    """Distance to the nearest probe point p with weight(V(s) u V(p)) >= quota.

    The doubled geodesic to p is then a feasible tour, so twice this distance
    upper-bounds the optimum; scale search descends from there."""
    from .geodesic import build_spt

    probes = list(dict.fromkeys(
        [(float(x), float(y)) for ring in domain.rings() for x, y in ring]))
    spt = build_spt(domain, s, probes, tol)
    vs = _point_vis_cached(domain, (float(s[0]), float(s[1])), tol).region
    ranked = sorted(probes, key=lambda p: spt.dist.get(_pkey(p), INF))
    for p in ranked:
        d = spt.dist.get(_pkey(p), INF)
        if not math.isfinite(d):
            continue
        w = weight_fn(vs.union(_point_vis_cached(domain, p, tol).region))
        if w >= quota * (1.0 - 1e-12):
            return d, p
    return None


def _antenna_tour(domain: Domain, s: Point, p: Point, tol) -> Tour:
    path = shortest_path(domain, s, p, tol)
    verts = path.waypoints + path.waypoints[-2:0:-1]
    if len(verts) == 1:
        return Tour(verts, depot=s)
    t = Tour(verts, depot=(float(s[0]), float(s[1])))
    return t


def _domain_vertex_count(domain: Domain) -> int:
    return domain.n


# ---------------------------------------------------------------------------
# anchored QWRP dual approximation
# ---------------------------------------------------------------------------

def solve_qwrp_dual(domain: Domain, s: Point, q: QuotaParams, *,
                    candidates: CandidateSet | None = None,
                    weight_fn=None, total_weight: float | None = None,
                    candidate_cap: int = 20_000,
                    dp_candidate_cap: int = DEFAULT_DP_CANDIDATE_CAP,
                    cell_cap: int = DEFAULT_DP_CELL_CAP,
                    tol: ToleranceConfig | None = None) -> Tour:
    """Shortest-route dual approximation for an area (or measure) quota.

    Returns a tour through `s` seeing at least (1-eps2)*A whose length is at
    most (1+eps1) times the optimal quota-A tour length.  With an explicit
    coarse candidate set the guarantee is relative to the optimum over that
    set and no grid is built.
    """
    tol = tol or domain.tol
    s = (float(s[0]), float(s[1]))
    if not domain.contains(s):
        raise PointOutsideDomain(f"depot {s} outside domain")
    from .errors import InvalidEpsilon
    if not (0 < q.eps1 <= 1) or not (0 < q.eps2 <= 1):
        raise InvalidEpsilon("eps1/eps2 must be in (0, 1]")
    weight_fn = weight_fn or (lambda region: region.area)
    total = total_weight if total_weight is not None else domain.area
    A = float(q.A)
    if A > total * (1 + tol.tau_area) + tol.abs_area(domain.scale):
        raise InfeasibleQuota(f"quota {A} exceeds total weight {total}")
    vs = weight_fn(_point_vis_cached(domain, s, tol).region)
    if A <= vs * (1 + 1e-12) + 1e-15 * max(total, 1.0):
        t = _degenerate_tour(domain, s, tol, weight_fn)
        t.metadata.update({"problem": "qwrp_dual", "reason": "depot sees quota"})
        return t
    if _is_interior(domain, s):
        pts = candidates.points if candidates is not None else _interior_probe_points(domain)
        return interior_depot_wrap(domain, s, q, pts, weight_fn=weight_fn, tol=tol)

    start = time.perf_counter()
    iterations: list[dict] = []

    if candidates is not None:
        cache = MarginalCache(domain, s, candidates, weight_fn, tol)
        e_max = cache.M
        I = q.eps2 * A / e_max
        reduced = A - e_max * I
        res = solve_quota_over_candidates(cache, A, I, reduced, cell_cap)
        if not res.feasible or res.tour is None:
            raise InfeasibleQuota("quota not reachable over the supplied candidate set")
        tour = res.tour
        tour.metadata.update({"problem": "qwrp_dual", "mode": "explicit",
                              "eps1": q.eps1, "eps2": q.eps2,
                              "reduced_quota": reduced,
                              "wall_clock_s": time.perf_counter() - start})
        tour.metadata.update(res.diagnostics)
        return tour

    n = _domain_vertex_count(domain)

    def evaluate(L: float):
        delta, I = choose_parameters_qwrp(n, A, L, q.eps1, q.eps2)
        k_est = max(1, int(math.ceil((1.0 - q.eps2) * A / I)))
        m_cap = min(dp_candidate_cap, int(math.sqrt(2.0 * cell_cap / (k_est + 1))) + 2)
        grid, coarsen = _coarsen_grid(domain, s, delta, L, m_cap)
        cands = build_candidates(domain, s, grid, candidate_cap, tol)
        cache = MarginalCache(domain, s, cands, weight_fn, tol)
        reduced = A - rounding_loss_bound(n, L, grid.delta, I)
        res = solve_quota_over_candidates(cache, A, I, max(reduced, 0.0), cell_cap)
        iterations.append({"L": L, "delta": grid.delta, "I": I,
                           "coarsen_factor": coarsen, "effective_eps1": q.eps1 * coarsen,
                           "candidates": len(cands), "feasible": res.feasible,
                           "length": res.length})
        return res

    best: Tour | None = None
    anchor = _antenna_bound(domain, s, A, weight_fn, tol)
    if anchor is not None:
        d_hat, p_hat = anchor
        best = _antenna_tour(domain, s, p_hat, tol)
        best.measure_seen(domain, tol)
        L = max(2.0 * d_hat, tol.abs_len(domain.scale) * 16)
    else:
        # doubling search upward until a feasible tour fits the window
        L = None
        Lq = _diag(domain) * 2.0 ** -10
        while Lq <= _diag(domain) * 2.0 ** 6:
            res = evaluate(Lq)
            if res.feasible and res.tour is not None:
                if best is None or res.tour.length < best.length:
                    best = res.tour
                if best.length <= Lq:
                    L = Lq
                    break
            Lq *= 2.0
        if L is None and best is None:
            raise InfeasibleQuota("no feasible tour found in the doubling search")
        L = L or Lq

    # halving descent; keep the best feasible tour
    floor_len = max(tol.abs_len(domain.scale) * 8, _diag(domain) * 2.0 ** -14)
    while L >= floor_len:
        res = evaluate(L)
        if res.feasible and res.tour is not None:
            if best is None or res.tour.length < best.length - tol.abs_len(domain.scale):
                best = res.tour
        else:
            break
        if best is not None and L <= best.length / 8.0:
            break
        L /= 2.0
    if best is None:
        raise InfeasibleQuota("scale search found no feasible tour")
    best.metadata.update({"problem": "qwrp_dual", "mode": "grid",
                          "eps1": q.eps1, "eps2": q.eps2,
                          "iterations": iterations,
                          "n_iterations": len(iterations),
                          "wall_clock_s": time.perf_counter() - start})
    return best


# ---------------------------------------------------------------------------
# anchored BWRP
# ---------------------------------------------------------------------------

def solve_bwrp(domain: Domain, s: Point, b: BudgetParams, *,
               candidates: CandidateSet | None = None,
               weight_fn=None,
               candidate_cap: int = 20_000,
               dp_candidate_cap: int = DEFAULT_DP_CANDIDATE_CAP,
               cell_cap: int = DEFAULT_DP_CELL_CAP,
               tol: ToleranceConfig | None = None) -> Tour:
    """Budgeted route: length at most (1+eps)*B, seeing at least as much as
    any tour of length B through the depot (over the same candidate space)."""
    tol = tol or domain.tol
    s = (float(s[0]), float(s[1]))
    if not domain.contains(s):
        raise PointOutsideDomain(f"depot {s} outside domain")
    from .errors import InvalidEpsilon
    if not (0 < b.eps <= 1):
        raise InvalidEpsilon("eps must be in (0, 1]")
    if b.B < 0:
        raise InvalidEpsilon("budget must be nonnegative")
    weight_fn = weight_fn or (lambda region: region.area)
    start = time.perf_counter()
    B = float(b.B)
    if B <= tol.abs_len(domain.scale):
        t = _degenerate_tour(domain, s, tol, weight_fn)
        t.metadata.update({"problem": "bwrp", "reason": "zero budget"})
        return t
    if _is_interior(domain, s):
        pts = candidates.points if candidates is not None else _interior_probe_points(domain)
        return interior_depot_wrap(domain, s, b, pts, weight_fn=weight_fn, tol=tol)

    if candidates is not None:
        cache = MarginalCache(domain, s, candidates, weight_fn, tol)
        e_max = cache.M
        I = b.eps * B / (2.0 * e_max)
        buckets = int(math.floor(B / I + 1e-12)) + e_max
        res = solve_budget_over_candidates(cache, buckets, I, cell_cap)
        tour = res.tour
        tour.metadata.update({"problem": "bwrp", "mode": "explicit", "eps": b.eps,
                              "budget": B, "inflated_budget": buckets * I,
                              "wall_clock_s": time.perf_counter() - start})
        tour.metadata.update(res.diagnostics)
        return tour

    n = _domain_vertex_count(domain)
    delta, I = choose_parameters_bwrp(n, B, b.eps)
    k_est = max(1, int(math.ceil((1.0 + b.eps) * B / I)))
    m_cap = min(dp_candidate_cap, int(math.sqrt(2.0 * cell_cap / (k_est + 1))) + 2)
    grid, coarsen = _coarsen_grid(domain, s, delta, B, m_cap)
    cands = build_candidates(domain, s, grid, candidate_cap, tol)
    cache = MarginalCache(domain, s, cands, weight_fn, tol)
    # keep the hard (1+eps)B length promise even when the grid was coarsened;
    # coarsening then weakens the area-dominance side instead, which the
    # metadata reports via the coarsen factor
    inflated = B + SNAP_LENGTH_COEFF * grid.delta * n + (2.0 * (n - 3) + 2.0 * B / grid.delta) * I
    inflated = min(inflated, (1.0 + b.eps) * B)
    buckets = int(math.floor(inflated / I + 1e-12))
    res = solve_budget_over_candidates(cache, buckets, I, cell_cap)
    tour = res.tour
    tour.metadata.update({"problem": "bwrp", "mode": "grid", "eps": b.eps,
                          "budget": B, "inflated_budget": inflated,
                          "coarsen_factor": coarsen, "effective_eps": b.eps * coarsen,
                          "delta": grid.delta, "I": I, "candidates": len(cands),
                          "wall_clock_s": time.perf_counter() - start})
    tour.metadata.update(res.diagnostics)
    return tour


# ---------------------------------------------------------------------------
# FPTAS for the anchored quota problem
# ---------------------------------------------------------------------------

def solve_qwrp_fptas(domain: Domain, s: Point, A: float, eps: float, *,
                     candidates: CandidateSet | None = None,
                     weight_fn=None, total_weight: float | None = None,
                     candidate_cap: int = 20_000,
                     cell_cap: int = DEFAULT_DP_CELL_CAP,
                     tol: ToleranceConfig | None = None) -> Tour:
    """Hard-quota route: sees at least A (no quota slack) with length at most
    (1+eps) times optimal, by probing budget grid points with the budgeted
    solver at internal slack (1+eps_i)^2 = 1+eps."""
    tol = tol or domain.tol
    s = (float(s[0]), float(s[1]))
    if not domain.contains(s):
        raise PointOutsideDomain(f"depot {s} outside domain")
    from .errors import InvalidEpsilon
    if not (0 < eps <= 1):
        raise InvalidEpsilon("eps must be in (0, 1]")
    weight_fn = weight_fn or (lambda region: region.area)
    total = total_weight if total_weight is not None else domain.area
    A = float(A)
    if A > total * (1 + tol.tau_area) + tol.abs_area(domain.scale):
        raise InfeasibleQuota(f"quota {A} exceeds total weight {total}")
    area_slack = tol.tau_area * max(total, 1.0)
    vs = weight_fn(_point_vis_cached(domain, s, tol).region)
    if A <= vs + area_slack:
        t = _degenerate_tour(domain, s, tol, weight_fn)
        t.metadata.update({"problem": "qwrp_fptas", "reason": "depot sees quota"})
        return t

    eps_i = math.sqrt(1.0 + eps) - 1.0
    K1 = int(math.ceil(2.0 / eps_i))
    start = time.perf_counter()
    probes_log: list[dict] = []

    cache = None
    if candidates is not None:
        cache = MarginalCache(domain, s, candidates, weight_fn, tol)

    def probe(budget: float) -> Tour | None:
        if budget <= 0:
            return None
        if cache is not None:
            e_max = cache.M
            I = eps_i * budget / (2.0 * e_max)
            buckets = int(math.floor(budget / I + 1e-12)) + e_max
            res = solve_budget_over_candidates(cache, buckets, I, cell_cap)
            t = res.tour
        else:
            t = solve_bwrp(domain, s, BudgetParams(budget, eps_i),
                           weight_fn=weight_fn, candidate_cap=candidate_cap,
                           cell_cap=cell_cap, tol=tol)
        w = t.metadata.get("measured_weight")
        if w is None:
            vr = t.seen or t.measure_seen(domain, tol)
            w = weight_fn(vr.region)
            t.metadata["measured_weight"] = w
        probes_log.append({"budget": budget, "weight": w, "length": t.length})
        return t

    def scan_scale(L: float) -> Tour | None:
        """Smallest feasible budget grid point at window scale L."""
        lo, hi = 1, K1
        found: Tour | None = None
        if probe_feasible := probe(L):
            if probe_feasible.metadata["measured_weight"] >= A - area_slack:
                found = probe_feasible
            else:
                return None
        while lo < hi:
            mid = (lo + hi) // 2
            t = probe(mid * L / K1)
            if t is not None and t.metadata["measured_weight"] >= A - area_slack:
                found = t if (found is None or t.length < found.length) else found
                hi = mid
            else:
                lo = mid + 1
        t = probe(lo * L / K1)
        if t is not None and t.metadata["measured_weight"] >= A - area_slack:
            if found is None or t.length < found.length:
                found = t
        return found

    best: Tour | None = None
    anchor = _antenna_bound(domain, s, A, weight_fn, tol)
    if anchor is not None:
        L = max(2.0 * anchor[0], tol.abs_len(domain.scale) * 16)
    else:
        L = _diag(domain) * 2.0 ** -6
        while L <= _diag(domain) * 2.0 ** 6:
            t = scan_scale(L)
            if t is not None:
                best = t
                break
            L *= 2.0
        if best is None:
            raise InfeasibleQuota("no budget scale reaches the quota")

    floor_len = max(tol.abs_len(domain.scale) * 8, _diag(domain) * 2.0 ** -14)
    while L >= floor_len:
        t = scan_scale(L)
        if t is None:
            break
        if best is None or t.length < best.length - tol.abs_len(domain.scale):
            best = t
        if best is not None and L <= best.length / 8.0:
            break
        if best is not None and best.length == 0.0:
            break
        L /= 2.0
    if best is None:
        raise InfeasibleQuota("quota not reachable by any probed budget")
    best.metadata.update({"problem": "qwrp_fptas", "eps": eps, "eps_internal": eps_i,
                          "probes": probes_log, "n_probes": len(probes_log),
                          "wall_clock_s": time.perf_counter() - start})
    return best


# ---------------------------------------------------------------------------
# floating (no-depot) heuristic
# ---------------------------------------------------------------------------

def solve_floating(domain: Domain, params: QuotaParams | BudgetParams, *,
                   anchors: list[Point] | None = None,
                   candidate_points: list[Point] | None = None,
                   weight_fn=None, total_weight: float | None = None,
                   candidate_cap: int = 20_000,
                   tol: ToleranceConfig | None = None) -> Tour:
    """No-depot variant: iterate the anchored solver over all reflex vertices
    (falling back to all boundary vertices when the polygon is convex) and
    keep the best result.

    This is a heuristic for instances whose optimum is strictly convex and
    anchored at no reflex vertex; results carry a `floating_heuristic` flag
    and are upper bounds on the floating optimum in that case.
    """
    tol = tol or domain.tol
    weight_fn = weight_fn or (lambda region: region.area)
    if anchors is None:
        anchors = domain.reflex_vertices()
        exact_anchor_set = bool(anchors)
        if not anchors:
            anchors = list(domain.outer.vertices) if hasattr(domain, "outer") else list(domain.vertices)
    else:
        exact_anchor_set = False
    best: Tour | None = None
    results = []
    for a in anchors:
        try:
            if isinstance(params, QuotaParams):
                cand = (explicit_candidates(domain, a, candidate_points, tol)
                        if candidate_points is not None else None)
                t = solve_qwrp_dual(domain, a, params, candidates=cand,
                                    weight_fn=weight_fn, total_weight=total_weight,
                                    candidate_cap=candidate_cap, tol=tol)
                score = t.length
                better = best is None or score < best.length
            else:
                cand = (explicit_candidates(domain, a, candidate_points, tol)
                        if candidate_points is not None else None)
                t = solve_bwrp(domain, a, params, candidates=cand,
                               weight_fn=weight_fn, candidate_cap=candidate_cap, tol=tol)
                w = t.metadata.get("measured_weight")
                if w is None:
                    vr = t.seen or t.measure_seen(domain, tol)
                    w = weight_fn(vr.region)
                score = w
                better = best is None or score > best.metadata.get("measured_weight", -INF)
            t.metadata["anchor"] = a
            t.metadata.setdefault("measured_weight", score if isinstance(params, BudgetParams) else None)
            results.append((score, a))
            if better:
                best = t
        except InfeasibleQuota:
            continue
    if best is None:
        raise InfeasibleQuota("no anchor admits a feasible tour")
    best.metadata.update({"floating_heuristic": True,
                          "floating_exact_for_reflex_anchored": exact_anchor_set,
                          "anchors_tried": len(anchors)})
    return best


# ---------------------------------------------------------------------------
# interior depot
# ---------------------------------------------------------------------------

def interior_depot_wrap(domain: Domain, s: Point,
                        params: QuotaParams | BudgetParams,
                        candidate_points: list[Point], *,
                        pair_cap: int = 10_000,
                        node_cap: int = 200_000,
                        weight_fn=None,
                        tol: ToleranceConfig | None = None) -> Tour:
    """Anchored solve for a depot strictly inside the polygon.

    An optimal tour (s, w1, ..., wk, s) becomes relatively convex once the
    depot spokes are replaced by the geodesic between w1 and wk, so we try
    all candidate pairs (w1, wk), solve for the best relatively convex chain
    between them with the depot spokes' visibility pre-seeded, and keep the
    best closed tour.  Exhaustive chain search with branch-and-bound; meant
    for coarse candidate sets.
    """
    tol = tol or domain.tol
    s = (float(s[0]), float(s[1]))
    if not domain.contains(s):
        raise PointOutsideDomain(f"depot {s} outside domain")
    weight_fn = weight_fn or (lambda region: region.area)
    is_quota = isinstance(params, QuotaParams)
    quota = params.A if is_quota else None
    budget = None if is_quota else params.B
    area_slack = tol.tau_area * max(domain.area, 1.0)

    pts = []
    seen = set()
    for p in candidate_points:
        k = _pkey(p)
        if k not in seen and segment_inside(domain, s, (float(p[0]), float(p[1]))):
            seen.add(k)
            pts.append((float(p[0]), float(p[1])))
    m = len(pts)
    if m * m > pair_cap:
        raise CandidateCapExceeded(f"{m * m} depot pairs exceed cap {pair_cap}")

    vis_s = _point_vis_cached(domain, s, tol).region
    w_s = weight_fn(vis_s)
    best: Tour | None = None
    best_len = INF
    best_weight = w_s

    def consider(verts: list[Point], weight: float):
        nonlocal best, best_len, best_weight
        t = Tour(verts, depot=s)
        ln = t.length
        if is_quota:
            if weight >= quota - area_slack and ln < best_len - 1e-15:
                best, best_len, best_weight = t, ln, weight
        else:
            if ln <= budget * (1 + params.eps) + 1e-12 and weight > best_weight + 1e-15:
                best, best_len, best_weight = t, ln, weight

    # stand-still tour
    if (is_quota and w_s >= quota - area_slack) or not is_quota:
        best = _degenerate_tour(domain, s, tol, weight_fn)
        best_len = 0.0
        best_weight = w_s
        if is_quota:
            best.metadata["measured_weight"] = w_s
            best.metadata["problem"] = "qwrp_interior"
            return best

    nodes_budget = node_cap
    for i1 in range(m):
        for ik in range(m):
            w1, wk = pts[i1], pts[ik]
            spoke_len = seg_len(s, w1) + seg_len(s, wk)
            if not is_quota and spoke_len > budget * (1 + params.eps):
                continue
            if is_quota and spoke_len >= best_len:
                continue
            r0 = union_all([
                visibility_from_segment(domain, (s, w1), tol).region,
                visibility_from_segment(domain, (s, wk), tol).region], tol)
            if i1 == ik:
                consider([s, w1], weight_fn(r0))
                continue
            gp = shortest_path(domain, w1, wk, tol)
            ref = math.atan2(gp.waypoints[1][1] - w1[1], gp.waypoints[1][0] - w1[0]) if len(gp.waypoints) > 1 else None
            cand = explicit_candidates(domain, w1, pts, tol, reference=ref)
            cache = MarginalCache(domain, w1, cand, weight_fn, tol)
            target_slot = None
            for si in range(1, cache.M - 1):
                if _pkey(cache.pts[si]) == _pkey(wk):
                    target_slot = si
            if target_slot is None:
                continue
            # DFS over increasing, relatively convex slot chains w1 -> wk
            stack = [([0], r0.union(cache.geodesic_visibility(_pkey(w1))), 0.0)]
            while stack and nodes_budget > 0:
                chain, reg, ln = stack.pop()
                nodes_budget -= 1
                last = chain[-1]
                if _pkey(cache.pts[last]) == _pkey(wk) and len(chain) > 1:
                    w = weight_fn(reg)
                    consider([s] + [cache.pts[c] for c in chain], w)
                for nxt in range(last + 1, cache.M - 1):
                    if not cache.visible(last, nxt):
                        continue
                    d = cache.edge_len(last, nxt)
                    if d <= tol.abs_coord(domain.scale):
                        continue
                    nl = ln + d
                    total_if = spoke_len + nl
                    if is_quota and total_if >= best_len:
                        continue
                    if not is_quota and total_if > budget * (1 + params.eps):
                        continue
                    if len(chain) >= 2 and not turn_allows_wedge(
                            cache.pts[chain[-2]], cache.pts[last], cache.pts[nxt],
                            cache.wedges[last], tol.tau):
                        continue
                    nreg = reg.union(visibility_from_segment(
                        domain, (cache.pts[last], cache.pts[nxt]), tol).region)
                    stack.append((chain + [nxt], nreg, nl))
            if nodes_budget <= 0:
                raise CandidateCapExceeded("interior-depot search node cap exhausted")
    if best is None:
        raise InfeasibleQuota("no feasible interior-depot tour found")
    vr = best.measure_seen(domain, tol)
    best.metadata.update({"problem": "qwrp_interior" if is_quota else "bwrp_interior",
                          "measured_weight": weight_fn(vr.region),
                          "interior_depot": True})
    return best
