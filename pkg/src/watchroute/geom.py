"""Planar geometry kernel: points, polygons, triangulation, containment.

Everything here is pure, double-precision, and tolerance-aware.  Points are
plain ``(x, y)`` tuples in public APIs; numpy arrays are used internally for
batch predicates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOL, ToleranceConfig
from .errors import NonSimplePolygon, PointOutsideDomain

Point = tuple[float, float]


# ---------------------------------------------------------------------------
# scalar predicates
# ---------------------------------------------------------------------------

def cross(ox: float, oy: float, ax: float, ay: float, bx: float, by: float) -> float:
    """Twice the signed area of triangle (o, a, b)."""
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def orientation(a: Point, b: Point, c: Point, tol: ToleranceConfig = DEFAULT_TOL) -> int:
    """Sign of the signed triangle area: +1 CCW, -1 CW, 0 within tolerance.

    The zero band scales with the squared triangle diameter, which keeps the
    predicate scale-invariant and antisymmetric under argument swaps.
    """
    v = cross(a[0], a[1], b[0], b[1], c[0], c[1])
    scale2 = max((b[0] - a[0]) ** 2 + (b[1] - a[1]) ** 2,
                 (c[0] - a[0]) ** 2 + (c[1] - a[1]) ** 2,
                 (c[0] - b[0]) ** 2 + (c[1] - b[1]) ** 2)
    if abs(v) <= tol.tau * scale2:
        return 0
    return 1 if v > 0 else -1


def seg_len(a: Point, b: Point) -> float:
    return math.hypot(b[0] - a[0], b[1] - a[1])


def shoelace(coords: np.ndarray) -> float:
    """Signed area of a closed ring given as an (n, 2) array (no repeat)."""
    x = coords[:, 0]
    y = coords[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


@dataclass(frozen=True)
class Segment:
    a: Point
    b: Point
    degenerate: bool = False

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (*self.a, *self.b)):
            raise ValueError("segment endpoints must be finite")

    @property
    def length(self) -> float:
        return seg_len(self.a, self.b)


# ---------------------------------------------------------------------------
# batch predicates
# ---------------------------------------------------------------------------

def _point_seg_dist2(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Squared distance from each point (k,2) to each segment (m,2)/(m,2) -> (k,m)."""
    ab = b - a  # (m,2)
    ap = pts[:, None, :] - a[None, :, :]  # (k,m,2)
    denom = np.einsum("mi,mi->m", ab, ab)
    denom = np.where(denom == 0.0, 1.0, denom)
    t = np.einsum("kmi,mi->km", ap, ab) / denom
    t = np.clip(t, 0.0, 1.0)
    proj = a[None, :, :] + t[:, :, None] * ab[None, :, :]
    d = pts[:, None, :] - proj
    return np.einsum("kmi,kmi->km", d, d)


def points_in_ring(pts: np.ndarray, ring: np.ndarray, tol_abs: float) -> tuple[np.ndarray, np.ndarray]:
    """Crossing-number membership for points in a ring.

    Returns (inside_strict, on_boundary) boolean arrays.  `inside_strict` is
    the parity test alone; callers combine with `on_boundary` for the closed
    or open convention.
    """
    a = ring
    b = np.roll(ring, -1, axis=0)
    x = pts[:, 0][:, None]
    y = pts[:, 1][:, None]
    ay, by = a[:, 1][None, :], b[:, 1][None, :]
    ax, bx = a[:, 0][None, :], b[:, 0][None, :]
    # half-open rule on y avoids double counting at shared vertices
    opens = (ay <= y) & (by > y) | (by <= y) & (ay > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xs = ax + (y - ay) * (bx - ax) / np.where(by - ay == 0.0, 1.0, by - ay)
    crossings = opens & (xs > x)
    inside = (np.count_nonzero(crossings, axis=1) % 2) == 1
    d2 = _point_seg_dist2(pts, a, b).min(axis=1)
    on_bdy = d2 <= tol_abs * tol_abs
    return inside, on_bdy


def segment_hits_ring(a: Point, b: Point, ring: np.ndarray, tol_abs: float) -> list[float]:
    """Parameters t in [0,1] where segment ab meets the ring boundary.

    Includes touching contacts and the endpoints of collinear overlaps, so
    subdividing at the returned parameters isolates maximal sub-segments that
    are entirely inside or outside the region bounded by the ring.
    """
    p = ring
    q = np.roll(ring, -1, axis=0)
    ax, ay = a
    bx, by = b
    d = (bx - ax, by - ay)
    seg_norm = math.hypot(*d)
    if seg_norm == 0.0:
        return []
    tol_t = tol_abs / seg_norm
    r = q - p  # edge vectors
    denom = d[0] * r[:, 1] - d[1] * r[:, 0]
    pax = p[:, 0] - ax
    pay = p[:, 1] - ay
    ts: list[float] = []
    nonpar = np.abs(denom) > 1e-14 * (seg_norm * np.hypot(r[:, 0], r[:, 1]) + 1e-300)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (pax * r[:, 1] - pay * r[:, 0]) / np.where(nonpar, denom, 1.0)
        u = (pax * d[1] - pay * d[0]) / np.where(nonpar, denom, 1.0)
    edge_norm = np.hypot(r[:, 0], r[:, 1])
    tol_u = np.where(edge_norm > 0, tol_abs / np.where(edge_norm > 0, edge_norm, 1.0), 0.0)
    ok = nonpar & (t >= -tol_t) & (t <= 1 + tol_t) & (u >= -tol_u) & (u <= 1 + tol_u)
    ts.extend(np.clip(t[ok], 0.0, 1.0).tolist())
    # collinear overlaps: project overlapping edge endpoints onto ab
    par = ~nonpar
    if np.any(par):
        # distance from edge endpoints to the ab line
        line_d = np.abs(pax * d[1] - pay * d[0]) / seg_norm
        col = par & (line_d <= tol_abs)
        for i in np.nonzero(col)[0]:
            for ex, ey in (p[i], q[i]):
                t_e = ((ex - ax) * d[0] + (ey - ay) * d[1]) / (seg_norm * seg_norm)
                if -tol_t <= t_e <= 1 + tol_t:
                    ts.append(min(max(t_e, 0.0), 1.0))
    return ts


# ---------------------------------------------------------------------------
# polygons
# ---------------------------------------------------------------------------

def _dedupe_ring(pts: list[Point], tol_abs: float) -> list[Point]:
    out: list[Point] = []
    for p in pts:
        if out and seg_len(out[-1], p) <= tol_abs:
            continue
        out.append((float(p[0]), float(p[1])))
    while len(out) > 1 and seg_len(out[0], out[-1]) <= tol_abs:
        out.pop()
    return out


def _ring_is_simple(coords: np.ndarray, tol_abs: float) -> bool:
    n = len(coords)
    segs = [(tuple(coords[i]), tuple(coords[(i + 1) % n])) for i in range(n)]
    for i in range(n):
        a, b = segs[i]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            c, d = segs[j]
            o1 = orientation(a, b, c)
            o2 = orientation(a, b, d)
            o3 = orientation(c, d, a)
            o4 = orientation(c, d, b)
            if o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4):
                return False
            # collinear touch of non-adjacent edges: overlap check
            if 0 in (o1, o2, o3, o4):
                for p_, (u, v) in ((c, (a, b)), (d, (a, b)), (a, (c, d)), (b, (c, d))):
                    if orientation(u, v, p_) == 0:
                        ux, uy = u
                        vx, vy = v
                        t = ((p_[0] - ux) * (vx - ux) + (p_[1] - uy) * (vy - uy))
                        L2 = (vx - ux) ** 2 + (vy - uy) ** 2
                        if tol_abs * math.sqrt(L2) < t < L2 - tol_abs * math.sqrt(L2):
                            return False
    return True


@dataclass
class SimplePolygon:
    """Simple polygon with CCW boundary.

    `reflex_flags[i]` is true when the interior angle at vertex i is >= 180
    degrees (collinear counts as reflex, matching the closed convention).
    """

    vertices: list[Point]
    tol: ToleranceConfig = field(default_factory=lambda: DEFAULT_TOL, repr=False)
    validate: bool = True

    def __post_init__(self):
        coords = np.asarray(self.vertices, dtype=float)
        if coords.ndim != 2 or coords.shape[1] != 2 or len(coords) < 3:
            raise NonSimplePolygon("polygon needs at least 3 finite 2d vertices")
        if not np.all(np.isfinite(coords)):
            raise NonSimplePolygon("non-finite vertex coordinate")
        bbox = (coords.min(axis=0), coords.max(axis=0))
        self.scale = float(np.hypot(*(bbox[1] - bbox[0]))) or 1.0
        tol_abs = self.tol.abs_coord(self.scale)
        pts = _dedupe_ring([tuple(p) for p in coords], tol_abs)
        if len(pts) < 3:
            raise NonSimplePolygon("degenerate polygon after deduplication")
        coords = np.asarray(pts, dtype=float)
        area = shoelace(coords)
        if area < 0:
            coords = coords[::-1].copy()
            pts = pts[::-1]
            area = -area
        if area <= self.tol.abs_area(self.scale):
            raise NonSimplePolygon("polygon area is zero within tolerance")
        if self.validate and not _ring_is_simple(coords, tol_abs):
            raise NonSimplePolygon("boundary self-intersects")
        self.vertices = pts
        self.coords = coords
        self.n = len(pts)
        self.area = float(area)
        self.bbox = (float(bbox[0][0]), float(bbox[0][1]), float(bbox[1][0]), float(bbox[1][1]))
        prev = np.roll(coords, 1, axis=0)
        nxt = np.roll(coords, -1, axis=0)
        crs = (coords[:, 0] - prev[:, 0]) * (nxt[:, 1] - coords[:, 1]) - (
            coords[:, 1] - prev[:, 1]
        ) * (nxt[:, 0] - coords[:, 0])
        l1 = np.hypot(coords[:, 0] - prev[:, 0], coords[:, 1] - prev[:, 1])
        l2 = np.hypot(nxt[:, 0] - coords[:, 0], nxt[:, 1] - coords[:, 1])
        self.reflex_flags = (crs <= self.tol.tau * l1 * l2).tolist()

    # -- queries ------------------------------------------------------------

    def rings(self) -> list[np.ndarray]:
        return [self.coords]

    def boundary_segments(self) -> np.ndarray:
        a = self.coords
        b = np.roll(self.coords, -1, axis=0)
        return np.stack([a, b], axis=1)

    def contains_points(self, pts: np.ndarray) -> np.ndarray:
        """Closed membership for an array of points (k, 2)."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        inside, on_bdy = points_in_ring(pts, self.coords, self.tol.abs_coord(self.scale))
        return inside | on_bdy

    def contains(self, p: Point) -> bool:
        return bool(self.contains_points(np.array([p]))[0])

    def reflex_vertices(self) -> list[Point]:
        return [v for v, r in zip(self.vertices, self.reflex_flags) if r]

    def perimeter(self) -> float:
        d = np.roll(self.coords, -1, axis=0) - self.coords
        return float(np.hypot(d[:, 0], d[:, 1]).sum())


@dataclass
class PolygonWithHoles:
    """Outer CCW boundary plus pairwise-disjoint CW holes strictly inside."""

    outer: SimplePolygon
    holes: list[SimplePolygon] = field(default_factory=list)

    def __post_init__(self):
        self.tol = self.outer.tol
        self.scale = self.outer.scale
        norm_holes = []
        for h in self.holes:
            if not np.all(self.outer.contains_points(h.coords)):
                raise NonSimplePolygon("hole not inside outer boundary")
            norm_holes.append(h)
        for i in range(len(norm_holes)):
            for j in range(i + 1, len(norm_holes)):
                if np.any(norm_holes[i].contains_points(norm_holes[j].coords)):
                    raise NonSimplePolygon("holes overlap")
        self.holes = norm_holes
        self.n = self.outer.n + sum(h.n for h in self.holes)
        self.area = self.outer.area - sum(h.area for h in self.holes)
        self.bbox = self.outer.bbox

    def rings(self) -> list[np.ndarray]:
        # hole rings reversed so the interior of the domain is on the left
        return [self.outer.coords] + [h.coords[::-1].copy() for h in self.holes]

    def boundary_segments(self) -> np.ndarray:
        out = [self.outer.boundary_segments()]
        for ring in self.rings()[1:]:
            a = ring
            b = np.roll(ring, -1, axis=0)
            out.append(np.stack([a, b], axis=1))
        return np.concatenate(out, axis=0)

    def contains_points(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        tol_abs = self.tol.abs_coord(self.scale)
        ins, on_b = points_in_ring(pts, self.outer.coords, tol_abs)
        ok = ins | on_b
        for h in self.holes:
            hi, hb = points_in_ring(pts, h.coords, tol_abs)
            ok &= ~(hi & ~hb)
        return ok

    def contains(self, p: Point) -> bool:
        return bool(self.contains_points(np.array([p]))[0])

    @property
    def vertices(self) -> list[Point]:
        vs = list(self.outer.vertices)
        for h in self.holes:
            vs.extend(h.vertices)
        return vs

    def reflex_vertices(self) -> list[Point]:
        """Reflex vertices of the domain; every hole vertex with a convex hole
        angle is reflex as seen from the domain interior."""
        out = self.outer.reflex_vertices()
        for ring in self.rings()[1:]:
            n = len(ring)
            for i in range(n):
                a, b, c = ring[i - 1], ring[i], ring[(i + 1) % n]
                if orientation(tuple(a), tuple(b), tuple(c), self.tol) <= 0:
                    out.append((float(b[0]), float(b[1])))
        return out


Domain = SimplePolygon | PolygonWithHoles


def polygon_area(poly) -> float:
    """Positive area of a SimplePolygon or PolygonWithHoles."""
    return poly.area


# ---------------------------------------------------------------------------
# segment containment
# ---------------------------------------------------------------------------

def segment_inside(domain: Domain, a: Point, b: Point) -> bool:
    """True when the closed segment ab lies entirely within the closed domain.

    Robust midpoint rule: split ab at every boundary contact and require all
    sub-segment midpoints (and both endpoints) to pass the closed membership
    test.
    """
    tol_abs = domain.tol.abs_coord(domain.scale)
    if seg_len(a, b) <= tol_abs:
        return domain.contains(a)
    ts = [0.0, 1.0]
    for ring in domain.rings():
        ts.extend(segment_hits_ring(a, b, ring, tol_abs))
    ts = sorted(set(ts))
    mids = []
    for t0, t1 in zip(ts[:-1], ts[1:]):
        tm = 0.5 * (t0 + t1)
        mids.append((a[0] + tm * (b[0] - a[0]), a[1] + tm * (b[1] - a[1])))
    probes = np.array([a, b] + mids)
    return bool(np.all(domain.contains_points(probes)))


def point_sees_point(domain: Domain, a: Point, b: Point) -> bool:
    return segment_inside(domain, a, b)


# ---------------------------------------------------------------------------
# triangulation (ear clipping)
# ---------------------------------------------------------------------------

@dataclass
class Triangulation:
    points: list[Point]
    triangles: list[tuple[int, int, int]]
    diagonals: list[tuple[int, int]]
    adjacency: dict[int, list[int]]

    @property
    def total_area(self) -> float:
        s = 0.0
        for i, j, k in self.triangles:
            a, b, c = self.points[i], self.points[j], self.points[k]
            s += 0.5 * abs(cross(a[0], a[1], b[0], b[1], c[0], c[1]))
        return s

    def triangle_coords(self, t: int) -> tuple[Point, Point, Point]:
        i, j, k = self.triangles[t]
        return self.points[i], self.points[j], self.points[k]

    def locate(self, p: Point, tol_abs: float = 0.0) -> int | None:
        for t, (i, j, k) in enumerate(self.triangles):
            a, b, c = self.points[i], self.points[j], self.points[k]
            if _point_in_triangle(p, a, b, c, tol_abs):
                return t
        return None


def _point_in_triangle(p: Point, a: Point, b: Point, c: Point, tol_abs: float) -> bool:
    d1 = cross(a[0], a[1], b[0], b[1], p[0], p[1])
    d2 = cross(b[0], b[1], c[0], c[1], p[0], p[1])
    d3 = cross(c[0], c[1], a[0], a[1], p[0], p[1])
    slack = tol_abs * (seg_len(a, b) + seg_len(b, c) + seg_len(c, a))
    has_neg = (d1 < -slack) or (d2 < -slack) or (d3 < -slack)
    has_pos = (d1 > slack) or (d2 > slack) or (d3 > slack)
    return not (has_neg and has_pos)


def _ear_clip(ring: list[Point], tol: ToleranceConfig, index_base: list[int]) -> list[tuple[int, int, int]]:
    """Ear-clip a CCW ring; returns triangles as indices into index_base order."""
    n = len(ring)
    if n < 3:
        return []
    idx = list(range(n))
    tris: list[tuple[int, int, int]] = []
    guard = 0
    scale = max(max(p[0] for p in ring) - min(p[0] for p in ring),
                max(p[1] for p in ring) - min(p[1] for p in ring), 1e-300)
    tol_abs = tol.abs_coord(scale)

    def is_ear(k: int, min_orient: int) -> bool:
        m = len(idx)
        i0, i1, i2 = idx[(k - 1) % m], idx[k], idx[(k + 1) % m]
        a, b, c = ring[i0], ring[i1], ring[i2]
        if orientation(a, b, c, tol) < min_orient:
            return False
        for j in idx:
            if j in (i0, i1, i2):
                continue
            p = ring[j]
            if seg_len(p, a) <= tol_abs or seg_len(p, b) <= tol_abs or seg_len(p, c) <= tol_abs:
                continue
            # boundary contact blocks the ear too, else a vertex resting on the
            # ear edge would be stranded outside the remaining chain
            if _point_in_triangle(p, a, b, c, tol_abs):
                return False
        return True

    while len(idx) > 3 and guard < 4 * n * n:
        guard += 1
        clipped = False
        # prefer strictly convex ears; fall back to degenerate (collinear) ones
        for min_orient in (1, 0):
            for k in range(len(idx)):
                if not is_ear(k, min_orient):
                    continue
                m = len(idx)
                i0, i1, i2 = idx[(k - 1) % m], idx[k], idx[(k + 1) % m]
                a, b, c = ring[i0], ring[i1], ring[i2]
                if orientation(a, b, c, tol) > 0:
                    tris.append((index_base[i0], index_base[i1], index_base[i2]))
                idx.pop(k)
                clipped = True
                break
            if clipped:
                break
        if not clipped:
            raise NonSimplePolygon("ear clipping failed; polygon may be non-simple")
    if len(idx) == 3:
        a, b, c = (ring[i] for i in idx)
        if orientation(a, b, c, tol) > 0:
            tris.append((index_base[idx[0]], index_base[idx[1]], index_base[idx[2]]))
    return tris


def _insert_steiner(points: list[Point], tris: list[tuple[int, int, int]],
                    steiner: list[Point], tol: ToleranceConfig, scale: float) -> tuple[list[Point], list[tuple[int, int, int]]]:
    tol_abs = tol.abs_coord(scale)
    pts = list(points)
    cur = list(tris)
    for sp in steiner:
        sp = (float(sp[0]), float(sp[1]))
        if any(seg_len(sp, q) <= tol_abs for q in pts):
            continue
        placed = False
        # on-edge first: split every triangle sharing the carrying edge
        edge_hit = None
        for i, j, k in cur:
            for e0, e1 in ((i, j), (j, k), (k, i)):
                a, b = pts[e0], pts[e1]
                L = seg_len(a, b)
                if L <= tol_abs:
                    continue
                d = abs(cross(a[0], a[1], b[0], b[1], sp[0], sp[1])) / L
                t_par = ((sp[0] - a[0]) * (b[0] - a[0]) + (sp[1] - a[1]) * (b[1] - a[1])) / (L * L)
                if d <= tol_abs and tol_abs / L < t_par < 1 - tol_abs / L:
                    edge_hit = (e0, e1)
                    break
            if edge_hit:
                break
        if edge_hit:
            e0, e1 = edge_hit
            p_new = len(pts)
            pts.append(sp)
            new_tris = []
            for tri in cur:
                if e0 in tri and e1 in tri:
                    opp = [v for v in tri if v not in (e0, e1)][0]
                    new_tris.append(_ccw_tri(pts, (e0, p_new, opp)))
                    new_tris.append(_ccw_tri(pts, (p_new, e1, opp)))
                else:
                    new_tris.append(tri)
            cur = new_tris
            continue
        for t_i, (i, j, k) in enumerate(cur):
            a, b, c = pts[i], pts[j], pts[k]
            if _point_in_triangle(sp, a, b, c, -tol_abs):
                p_new = len(pts)
                pts.append(sp)
                cur.pop(t_i)
                cur.extend([(i, j, p_new), (j, k, p_new), (k, i, p_new)])
                placed = True
                break
        if not placed:
            # boundary-adjacent within tolerance: snap onto nearest triangle
            for t_i, (i, j, k) in enumerate(cur):
                a, b, c = pts[i], pts[j], pts[k]
                if _point_in_triangle(sp, a, b, c, tol_abs):
                    p_new = len(pts)
                    pts.append(sp)
                    cur.pop(t_i)
                    cur.extend([(i, j, p_new), (j, k, p_new), (k, i, p_new)])
                    placed = True
                    break
        if not placed:
            raise PointOutsideDomain(f"steiner point {sp} outside polygon")
    return pts, cur


def _ccw_tri(pts: list[Point], tri: tuple[int, int, int]) -> tuple[int, int, int]:
    a, b, c = (pts[v] for v in tri)
    if cross(a[0], a[1], b[0], b[1], c[0], c[1]) < 0:
        return (tri[0], tri[2], tri[1])
    return tri


def _finish_triangulation(pts: list[Point], tris: list[tuple[int, int, int]],
                          boundary_edges: set[frozenset[int]] | None = None) -> Triangulation:
    tris = [t for t in tris if len(set(t)) == 3]
    edges: dict[frozenset, list[int]] = {}
    for t_i, (i, j, k) in enumerate(tris):
        for e in (frozenset((i, j)), frozenset((j, k)), frozenset((k, i))):
            edges.setdefault(e, []).append(t_i)
    adjacency: dict[int, list[int]] = {t_i: [] for t_i in range(len(tris))}
    diagonals = []
    for e, owners in edges.items():
        if len(owners) == 2:
            adjacency[owners[0]].append(owners[1])
            adjacency[owners[1]].append(owners[0])
            diagonals.append(tuple(sorted(e)))
    return Triangulation(points=pts, triangles=tris, diagonals=diagonals, adjacency=adjacency)


def triangulate(poly: SimplePolygon, steiner: list[Point] | None = None) -> Triangulation:
    """Ear-clipping triangulation of a simple polygon, with optional Steiner
    points inserted as vertices (interior points split a triangle in three)."""
    ring = list(poly.vertices)
    tris = _ear_clip(ring, poly.tol, list(range(len(ring))))
    pts = list(ring)
    if steiner:
        pts, tris = _insert_steiner(pts, tris, list(steiner), poly.tol, poly.scale)
    return _finish_triangulation(pts, tris)


def _bridge_holes(outer: list[Point], holes: list[list[Point]], tol: ToleranceConfig,
                  scale: float) -> list[Point]:
    """Merge CW holes into the CCW outer ring with doubled bridge edges."""
    ring = list(outer)
    tol_abs = tol.abs_coord(scale)
    remaining = sorted(holes, key=lambda h: -max(p[0] for p in h))
    for hole in remaining:
        # hole supplied CW already
        hi = max(range(len(hole)), key=lambda i: hole[i][0])
        m = hole[hi]
        best = None
        for vi, v in enumerate(ring):
            # candidate bridge m-v must not cross any current edge or hole edge
            okay = True
            for chain in [ring] + [hole]:
                nn = len(chain)
                for k in range(nn):
                    c, d = chain[k], chain[(k + 1) % nn]
                    if _proper_cross(m, v, c, d, tol):
                        okay = False
                        break
                if not okay:
                    break
            if okay:
                d2 = (v[0] - m[0]) ** 2 + (v[1] - m[1]) ** 2
                if best is None or d2 < best[0]:
                    best = (d2, vi)
        if best is None:
            raise NonSimplePolygon("cannot bridge hole into outer boundary")
        vi = best[1]
        ring = ring[: vi + 1] + hole[hi:] + hole[: hi + 1] + ring[vi:]
    return ring


def _proper_cross(a: Point, b: Point, c: Point, d: Point, tol: ToleranceConfig) -> bool:
    """Strict transversal crossing of open segments (shared endpoints allowed)."""
    o1 = orientation(a, b, c, tol)
    o2 = orientation(a, b, d, tol)
    o3 = orientation(c, d, a, tol)
    o4 = orientation(c, d, b, tol)
    return o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4)


def triangulate_with_holes(poly: PolygonWithHoles, steiner: list[Point] | None = None) -> Triangulation:
    """Triangulate a polygon with holes by bridging each hole into the outer ring."""
    if not poly.holes:
        return triangulate(poly.outer, steiner)
    outer = list(poly.outer.vertices)
    holes = [list(h.coords[::-1]) for h in poly.holes]  # CW traversal
    holes = [[(float(x), float(y)) for x, y in h] for h in holes]
    merged = _bridge_holes(outer, holes, poly.tol, poly.scale)
    # unique point list with duplicates for bridge endpoints collapsed by id
    pts: list[Point] = []
    key_of: dict[tuple, int] = {}
    idx_base = []
    for p in merged:
        k = (round(p[0], 12), round(p[1], 12))
        if k not in key_of:
            key_of[k] = len(pts)
            pts.append(p)
        idx_base.append(key_of[k])
    tris = _ear_clip(merged, poly.tol, idx_base)
    if steiner:
        pts, tris = _insert_steiner(pts, tris, list(steiner), poly.tol, poly.scale)
    return _finish_triangulation(pts, tris)


def triangulate_domain(domain: Domain, steiner: list[Point] | None = None) -> Triangulation:
    if isinstance(domain, PolygonWithHoles):
        return triangulate_with_holes(domain, steiner)
    return triangulate(domain, steiner)
