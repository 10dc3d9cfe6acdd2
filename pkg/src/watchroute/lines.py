"""Exact quota/budget watchman routes on connected arrangements of lines.

A route in an arrangement sees a line iff it touches it, and a line meets a
tour iff it meets the convex hull of the tour's vertices; so the optimum is a
cyclic vertex sequence in convex position minimizing the sum of graph
geodesic distances while its hull meets the quota.  The DP fixes the lowest
hull vertex, sweeps the rest in angular order, and counts newly covered
lines per appended chord via bitmask differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path as csgraph_shortest_path

from .config import DEFAULT_TOL, ToleranceConfig
from .errors import AllParallel, QuotaExceedsLines
from .geom import Point
from .tour import Tour


@dataclass
class LineArrangement:
    """Normalized lines a*x + b*y = c, their pairwise intersection vertices
    (concurrent lines merged), and per-vertex incident line sets."""

    lines: list[tuple[float, float, float]]
    vertices: list[Point]
    incident: list[int]  # bitmask per vertex
    bbox: tuple[float, float, float, float]
    tol: ToleranceConfig = field(default_factory=lambda: DEFAULT_TOL, repr=False)
    scale: float = 1.0

    @property
    def n(self) -> int:
        return len(self.lines)


@dataclass
class ArrangementGraph:
    edges: list[tuple[int, int, float]]
    dist: np.ndarray          # all-pairs geodesic lengths
    predecessors: np.ndarray  # scipy predecessor matrix

    def path(self, i: int, j: int) -> list[int]:
        if i == j:
            return [i]
        out = [j]
        while out[-1] != i:
            p = int(self.predecessors[i, out[-1]])
            if p < 0:
                raise ValueError("disconnected arrangement graph")
            out.append(p)
        out.reverse()
        return out


def _normalize_line(a: float, b: float, c: float) -> tuple[float, float, float]:
    norm = math.hypot(a, b)
    if norm == 0:
        raise ValueError("degenerate line 0x + 0y = c")
    a, b, c = a / norm, b / norm, c / norm
    if a < 0 or (a == 0 and b < 0):
        a, b, c = -a, -b, -c
    return a, b, c


def build_arrangement(lines: list[tuple[float, float, float]],
                      bbox: tuple[float, float, float, float] | None = None,
                      tol: ToleranceConfig = DEFAULT_TOL) -> tuple[LineArrangement, ArrangementGraph]:
    """Intersect all line pairs, merge concurrent intersection points, link
    consecutive vertices along each line, and precompute all-pairs shortest
    paths in the resulting plane graph."""
    norm = [_normalize_line(*ln) for ln in lines]
    n = len(norm)
    if n < 2:
        raise AllParallel("need at least two lines")
    raw: list[Point] = []
    for i in range(n):
        a1, b1, c1 = norm[i]
        for j in range(i + 1, n):
            a2, b2, c2 = norm[j]
            det = a1 * b2 - a2 * b1
            if abs(det) <= 1e-12:
                continue
            x = (c1 * b2 - c2 * b1) / det
            y = (a1 * c2 - a2 * c1) / det
            raw.append((x, y))
    if not raw:
        raise AllParallel("all lines are parallel")
    arr = np.asarray(raw)
    lo = arr.min(axis=0)
    hi = arr.max(axis=0)
    scale = float(np.hypot(*(hi - lo))) or 1.0
    tol_abs = tol.abs_coord(scale)

    verts: list[Point] = []
    for x, y in raw:
        for k, (vx, vy) in enumerate(verts):
            if abs(vx - x) <= tol_abs and abs(vy - y) <= tol_abs:
                break
        else:
            verts.append((float(x), float(y)))

    incident = []
    for vx, vy in verts:
        mask = 0
        for li, (a, b, c) in enumerate(norm):
            if abs(a * vx + b * vy - c) <= tol_abs:
                mask |= 1 << li
        incident.append(mask)

    if bbox is None:
        pad = 0.05 * scale
        bbox = (float(lo[0] - pad), float(lo[1] - pad), float(hi[0] + pad), float(hi[1] + pad))

    edges: list[tuple[int, int, float]] = []
    for li, (a, b, c) in enumerate(norm):
        on_line = [k for k in range(len(verts)) if incident[k] >> li & 1]
        on_line.sort(key=lambda k: (-b * verts[k][0] + a * verts[k][1]))
        for u, v in zip(on_line[:-1], on_line[1:]):
            d = math.hypot(verts[v][0] - verts[u][0], verts[v][1] - verts[u][1])
            edges.append((u, v, d))

    m = len(verts)
    if edges:
        rows = [e[0] for e in edges] + [e[1] for e in edges]
        cols = [e[1] for e in edges] + [e[0] for e in edges]
        data = [e[2] for e in edges] * 2
        g = csr_matrix((data, (rows, cols)), shape=(m, m))
    else:
        g = csr_matrix((m, m))
    ncomp, _ = connected_components(g, directed=False)
    if m > 1 and ncomp != 1:
        raise AllParallel("arrangement graph is disconnected")
    dist, preds = csgraph_shortest_path(g, method="D", directed=False,
                                        return_predecessors=True)
    la = LineArrangement(norm, verts, incident, bbox, tol, scale)
    return la, ArrangementGraph(edges, dist, preds)


# ---------------------------------------------------------------------------
# chord crossing masks
# ---------------------------------------------------------------------------

def crossing_masks(arr: LineArrangement) -> np.ndarray:
    """mask[i, j] = set of lines meeting segment v_i v_j, endpoints included;
    stored as Python ints in an object array."""
    cached = getattr(arr, "_wr_masks", None)
    if cached is not None:
        return cached
    verts = np.asarray(arr.vertices)
    m = len(verts)
    L = np.asarray(arr.lines)
    tol_abs = arr.tol.abs_coord(arr.scale)
    sgn = L[:, 0][None, :] * verts[:, 0][:, None] + L[:, 1][None, :] * verts[:, 1][:, None] - L[:, 2][None, :]
    masks = np.zeros((m, m), dtype=object)
    for i in range(m):
        for j in range(i, m):
            cross = (sgn[i] * sgn[j] <= tol_abs) | (np.abs(sgn[i]) <= tol_abs) | (np.abs(sgn[j]) <= tol_abs)
            bits = 0
            for li in np.nonzero(cross)[0]:
                bits |= 1 << int(li)
            masks[i, j] = bits
            masks[j, i] = bits
    arr._wr_masks = masks
    return masks


# ---------------------------------------------------------------------------
# quota DP
# ---------------------------------------------------------------------------

def _tour_from_sequence(arr: LineArrangement, graph: ArrangementGraph,
                        seq: list[int]) -> Tour:
    """Expand a cyclic convex vertex sequence into the full route through the
    arrangement graph."""
    pts: list[Point] = []
    k = len(seq)
    if k == 1:
        return Tour([arr.vertices[seq[0]]])
    for a, b in zip(seq, seq[1:] + seq[:1]):
        leg = graph.path(a, b)
        for v in leg[:-1]:
            pts.append(arr.vertices[v])
    clean = [pts[0]]
    for p in pts[1:]:
        if p != clean[-1]:
            clean.append(p)
    while len(clean) > 1 and clean[0] == clean[-1]:
        clean.pop()
    return Tour(clean)


def solve_all_quotas(arr: LineArrangement, graph: ArrangementGraph
                     ) -> list[tuple[float, list[int]]]:
    """For every quota Q = 1..n, the optimal tour length and its convex
    vertex sequence; entry Q-1 holds quota Q.  Cached on the arrangement."""
    cached = getattr(arr, "_wr_profile", None)
    if cached is not None:
        return cached
    n = arr.n
    m = len(arr.vertices)
    masks = crossing_masks(arr)
    verts = arr.vertices
    tol_cross = arr.tol.tau

    best: list[tuple[float, list[int]]] = [(math.inf, [])] * n
    # single-vertex tours
    for v in range(m):
        q = bin(arr.incident[v]).count("1")
        for Q in range(1, min(q, n) + 1):
            if 0.0 < best[Q - 1][0] or best[Q - 1][0] == math.inf:
                best[Q - 1] = (0.0, [v])

    for v1 in range(m):
        x1, y1 = verts[v1]
        above = [v for v in range(m)
                 if (verts[v][1], verts[v][0]) > (y1, x1)]
        if not above:
            continue

        def angle_key(v):
            dx = verts[v][0] - x1
            dy = verts[v][1] - y1
            th = math.atan2(dy, dx)
            return (-th, dx * dx + dy * dy)

        above.sort(key=angle_key)
        order = [v1] + above + [v1]
        M = len(order)
        base_mask = masks[v1, v1]

        # edge-state DP: state (directed pair (i,j) of order positions, q);
        # each cell also carries the accumulated turning of its stored chain,
        # since a chain in convex position turns less than a full revolution
        # before closing (near-collinear zigzags wind further and would break
        # the chord-mask coverage accounting)
        edges = []
        for j in range(1, M):
            for i in range(0, j):
                if i == 0 and j == M - 1:
                    continue
                edges.append((i, j))
        E = len(edges)
        val = np.full((E, n + 1), math.inf)
        bp = np.full((E, n + 1), -1, dtype=np.int32)
        bq = np.full((E, n + 1), -1, dtype=np.int16)  # predecessor bucket
        tacc = np.full((E, n + 1), math.inf)

        def gain(i_pos: int, j_pos: int) -> int:
            vi, vj = order[i_pos], order[j_pos]
            new = masks[vi, vj] & ~masks[v1, vi]
            return bin(new).count("1")

        def turn_angle(h_pos: int, i_pos: int, j_pos: int) -> float | None:
            """Unsigned turn at i for a clockwise convex traversal, or None
            when the turn goes left."""
            a, b_, c = verts[order[h_pos]], verts[order[i_pos]], verts[order[j_pos]]
            d_in = (b_[0] - a[0], b_[1] - a[1])
            d_out = (c[0] - b_[0], c[1] - b_[1])
            crs = d_in[0] * d_out[1] - d_in[1] * d_out[0]
            dot = d_in[0] * d_out[0] + d_in[1] * d_out[1]
            lim = tol_cross * (math.hypot(*d_in) * math.hypot(*d_out) + 1e-300)
            if crs > lim:
                return None
            return math.atan2(max(-crs, 0.0), dot)

        by_head: dict[int, list[int]] = {}
        for eid, (i, j) in enumerate(edges):
            by_head.setdefault(j, []).append(eid)

        MAX_TURN = 2.0 * math.pi - 1e-7
        buckets = np.arange(n + 1, dtype=np.int16)
        for j in range(1, M):
            for e2 in by_head.get(j, []):
                i = edges[e2][0]
                g = gain(i, j)
                d = float(graph.dist[order[i], order[j]])
                if not math.isfinite(d):
                    continue
                if i == 0:
                    q0 = min(bin(base_mask | masks[v1, order[j]]).count("1"), n)
                    if d < val[e2, q0] - 1e-15:
                        val[e2, q0] = d
                        bp[e2, q0] = -2
                        bq[e2, q0] = -2
                        tacc[e2, q0] = 0.0
                for e1 in by_head.get(i, []):
                    theta = turn_angle(edges[e1][0], i, j)
                    if theta is None:
                        continue
                    st = tacc[e1] + theta
                    src_eff = np.where(st <= MAX_TURN, val[e1], math.inf)
                    cand = np.full(n + 1, math.inf)
                    cand_t = np.full(n + 1, math.inf)
                    cand_b = np.full(n + 1, -1, dtype=np.int16)
                    if g == 0:
                        cand = src_eff + d
                        cand_t = st
                        cand_b = buckets.copy()
                    else:
                        cand[g:n] = src_eff[:n - g] + d
                        cand_t[g:n] = st[:n - g]
                        cand_b[g:n] = buckets[:n - g]
                        lo = max(0, n - g)
                        k = lo + int(np.argmin(src_eff[lo:]))
                        cand[n] = src_eff[k] + d
                        cand_t[n] = st[k]
                        cand_b[n] = k
                    upd = cand < val[e2] - 1e-15
                    if np.any(upd):
                        val[e2][upd] = cand[upd]
                        bp[e2, upd] = e1
                        bq[e2][upd] = cand_b[upd]
                        tacc[e2][upd] = cand_t[upd]

        close = by_head.get(M - 1, [])
        for Q in range(1, n + 1):
            # entries with clamped quota >= Q, best first
            entries = [(float(val[e, qq]), e, qq)
                       for e in close for qq in range(Q, n + 1)
                       if math.isfinite(val[e, qq])]
            entries.sort()
            for v_best, e, qq in entries:
                if v_best >= best[Q - 1][0] - 1e-15:
                    break
                seq = _reconstruct_lines(edges, bp, bq, e, qq)
                if seq is None:
                    continue
                vseq = [order[p] for p in seq]
                if not _closed_convex_ok(verts, vseq, tol_cross):
                    continue
                cov = 0
                for t, v in enumerate(vseq):
                    cov |= masks[vseq[t - 1], v] if len(vseq) > 1 else arr.incident[v]
                if bin(cov).count("1") < Q:
                    continue
                best[Q - 1] = (v_best, vseq)
                break
    arr._wr_profile = best
    return best


def _reconstruct_lines(edges, bp, bq, e, q) -> list[int] | None:
    seq_pos = []
    guard = 0
    while True:
        guard += 1
        if guard > 10000:
            return None
        i, j = edges[e]
        seq_pos.append(j)
        pe = int(bp[e, q])
        if pe == -2:
            seq_pos.append(i)
            break
        if pe < 0:
            return None
        q = int(bq[e, q])
        if q < 0:
            return None
        e = pe
    seq_pos.reverse()
    return seq_pos[:-1]  # drop the closing copy of v1


def _closed_convex_ok(verts, vseq: list[int], tau: float) -> bool:
    k = len(vseq)
    if k <= 2:
        return True
    for t in range(k):
        a = verts[vseq[t - 1]]
        b = verts[vseq[t]]
        c = verts[vseq[(t + 1) % k]]
        d_in = (b[0] - a[0], b[1] - a[1])
        d_out = (c[0] - b[0], c[1] - b[1])
        crs = d_in[0] * d_out[1] - d_in[1] * d_out[0]
        if crs > tau * (math.hypot(*d_in) * math.hypot(*d_out) + 1e-300):
            return False
    return True


def solve_lines_qwrp(arr: LineArrangement, graph: ArrangementGraph, Q: int) -> Tour:
    """Minimum-length closed route in the arrangement seeing at least Q lines."""
    if not (1 <= Q <= arr.n):
        raise QuotaExceedsLines(f"quota {Q} outside 1..{arr.n}")
    profile = solve_all_quotas(arr, graph)
    length, seq = profile[Q - 1]
    if not math.isfinite(length):
        raise QuotaExceedsLines(f"quota {Q} unreachable (disconnected?)")
    tour = _tour_from_sequence(arr, graph, seq)
    covered = 0
    for i, v in enumerate(seq):
        covered |= crossing_masks(arr)[seq[i - 1], v] if len(seq) > 1 else arr.incident[v]
    tour.metadata.update({"problem": "lines_qwrp", "quota": Q,
                          "hull_sequence": seq, "dp_length": length,
                          "lines_seen": bin(covered).count("1")})
    return tour


def solve_lines_bwrp(arr: LineArrangement, graph: ArrangementGraph, B: float) -> Tour:
    """Maximum number of lines seen by a route of length at most B."""
    if B < 0:
        raise ValueError("budget must be nonnegative")
    profile = solve_all_quotas(arr, graph)
    tol_len = arr.tol.abs_len(arr.scale)
    best_q = 0
    for Q in range(1, arr.n + 1):
        if profile[Q - 1][0] <= B + tol_len:
            best_q = Q
    if best_q == 0:
        raise QuotaExceedsLines("no vertex tour within budget (unexpected)")
    tour = solve_lines_qwrp(arr, graph, best_q)
    tour.metadata.update({"problem": "lines_bwrp", "budget": B, "lines_seen_max": best_q})
    return tour
