"""Visibility polygons of points, segments, and chains, plus marginal visibility.

Point visibility uses an exact angular sweep: event angles are the boundary
vertex directions, and within each wedge between consecutive events the
nearest boundary segment is constant, so one midpoint ray per wedge
identifies the wall and the wedge's boundary arc exactly.

Weak (segment) visibility is the union of point visibility polygons taken at
the segment's critical parameters: between consecutive critical points every
shadow window rotates monotonically about its anchoring reflex vertex, so the
union over the sub-segment equals the union at its two ends.  Critical
parameters are cut out by lines through mutually visible (reflex vertex,
vertex) pairs.  The same construction serves polygons with holes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL, ToleranceConfig
from .errors import PointOutsideDomain, SegmentLeavesDomain
from .geom import (
    Domain,
    Point,
    Segment,
    cross,
    seg_len,
    segment_inside,
    shoelace,
)
from .region import Region, union_all

_ANGLE_EPS = 1e-12


@dataclass
class VisibilityRegion:
    """A visibility polygon with its generator description and cached area."""

    region: Region
    source: tuple
    area: float


# ---------------------------------------------------------------------------
# interior cone at the query point
# ---------------------------------------------------------------------------

def _interior_cone(domain: Domain, x: Point) -> tuple[float, float] | None:
    """(start_angle, ccw_span) of directions pointing into the domain at x,
    or None when x is strictly interior.  Rings carry the domain interior on
    their left, so the cone runs CCW from dir(v->next) to dir(v->prev)."""
    tol_abs = domain.tol.abs_coord(domain.scale)
    for ring in domain.rings():
        n = len(ring)
        d = ring - np.asarray(x)
        dist = np.hypot(d[:, 0], d[:, 1])
        hit = np.argmin(dist)
        if dist[hit] <= tol_abs:
            v_next = ring[(hit + 1) % n]
            v_prev = ring[hit - 1]
            a0 = math.atan2(v_next[1] - x[1], v_next[0] - x[0])
            a1 = math.atan2(v_prev[1] - x[1], v_prev[0] - x[0])
            span = (a1 - a0) % (2 * math.pi)
            if span <= _ANGLE_EPS:
                span = 2 * math.pi
            return a0, span
    for ring in domain.rings():
        n = len(ring)
        a = ring
        b = np.roll(ring, -1, axis=0)
        ab = b - a
        ap = np.asarray(x) - a
        L2 = np.einsum("ij,ij->i", ab, ab)
        t = np.clip(np.einsum("ij,ij->i", ap, ab) / np.where(L2 == 0, 1, L2), 0, 1)
        proj = a + t[:, None] * ab
        dd = np.hypot(proj[:, 0] - x[0], proj[:, 1] - x[1])
        k = int(np.argmin(dd))
        if dd[k] <= tol_abs:
            ang = math.atan2(ab[k, 1], ab[k, 0])
            return ang, math.pi
    return None


# ---------------------------------------------------------------------------
# point visibility
# ---------------------------------------------------------------------------

def _ray_walls(x: Point, dirs: np.ndarray, p: np.ndarray, q: np.ndarray,
               t_min: float) -> tuple[np.ndarray, np.ndarray]:
    """Nearest boundary segment hit per ray direction.

    dirs: (w, 2) unit vectors.  Returns (wall index or -1, hit distance)."""
    r = q - p  # (m,2)
    px = p[:, 0] - x[0]
    py = p[:, 1] - x[1]
    denom = dirs[:, 0][:, None] * r[:, 1][None, :] - dirs[:, 1][:, None] * r[:, 0][None, :]
    seg_norm = np.hypot(r[:, 0], r[:, 1])
    ok = np.abs(denom) > 1e-14 * (seg_norm[None, :] + 1.0)
    denom_safe = np.where(ok, denom, 1.0)
    t = (px[None, :] * r[:, 1][None, :] - py[None, :] * r[:, 0][None, :]) / denom_safe
    u = (px[None, :] * dirs[:, 1][:, None] - py[None, :] * dirs[:, 0][:, None]) / denom_safe
    u_tol = 1e-12
    valid = ok & (t > t_min) & (u >= -u_tol) & (u <= 1 + u_tol)
    t = np.where(valid, t, np.inf)
    wall = np.argmin(t, axis=1)
    t_hit = t[np.arange(len(dirs)), wall]
    wall = np.where(np.isfinite(t_hit), wall, -1)
    return wall, t_hit


def _ray_line_point(x: Point, ang: float, a: Point, b: Point) -> Point | None:
    """Intersection of ray (x, ang) with the line ab; None when near-parallel."""
    d = (math.cos(ang), math.sin(ang))
    r = (b[0] - a[0], b[1] - a[1])
    denom = d[0] * r[1] - d[1] * r[0]
    if abs(denom) <= 1e-13 * (math.hypot(*r) + 1.0):
        return None
    t = ((a[0] - x[0]) * r[1] - (a[1] - x[1]) * r[0]) / denom
    return (x[0] + t * d[0], x[1] + t * d[1])


def visibility_from_point(domain: Domain, x: Point,
                          tol: ToleranceConfig | None = None) -> VisibilityRegion:
    """Visibility polygon of a point inside a (closed) polygonal domain."""
    tol = tol or domain.tol
    x = (float(x[0]), float(x[1]))
    if not domain.contains(x):
        raise PointOutsideDomain(f"{x} is not inside the domain")
    tol_abs = tol.abs_coord(domain.scale)
    segs = domain.boundary_segments()
    p, q = segs[:, 0, :], segs[:, 1, :]

    cone = _interior_cone(domain, x)
    verts = np.concatenate([ring for ring in domain.rings()], axis=0)
    dv = verts - np.asarray(x)
    keep = np.hypot(dv[:, 0], dv[:, 1]) > tol_abs
    angles = np.arctan2(dv[keep, 1], dv[keep, 0])

    if cone is None:
        offs = np.sort(np.mod(angles, 2 * math.pi))
        offs = _dedupe_sorted(offs)
        if len(offs) == 0:
            return VisibilityRegion(Region.empty(tol, domain.scale), ("point", x), 0.0)
        bounds = np.concatenate([offs, [offs[0] + 2 * math.pi]])
        base = 0.0
    else:
        base, span = cone
        rel = np.mod(angles - base, 2 * math.pi)
        rel = rel[rel <= span + _ANGLE_EPS]
        offs = np.sort(np.concatenate([[0.0, span], rel]))
        offs = _dedupe_sorted(offs)
        bounds = offs

    lo = bounds[:-1]
    hi = bounds[1:]
    widths = hi - lo
    active = widths > _ANGLE_EPS
    mids = base + 0.5 * (lo + hi)
    dirs = np.stack([np.cos(mids), np.sin(mids)], axis=1)
    wall, _ = _ray_walls(x, dirs[active], p, q, tol_abs)

    chain: list[Point] = []
    act_lo = lo[active]
    act_hi = hi[active]
    for w_idx, a_lo, a_hi in zip(wall, act_lo, act_hi):
        if w_idx < 0:
            continue
        a_pt = (float(p[w_idx, 0]), float(p[w_idx, 1]))
        b_pt = (float(q[w_idx, 0]), float(q[w_idx, 1]))
        for ang in (base + a_lo, base + a_hi):
            hit = _ray_line_point(x, ang, a_pt, b_pt)
            if hit is None:
                # radial wall endpoint: take the endpoint nearest the ray
                hit = min((a_pt, b_pt), key=lambda e: abs(
                    (e[0] - x[0]) * math.sin(ang) - (e[1] - x[1]) * math.cos(ang)))
            _append_pt(chain, hit, tol_abs)

    if cone is not None:
        ring = [x] + chain
    else:
        ring = chain
    ring = _clean_ring(ring, tol_abs)
    if len(ring) < 3:
        return VisibilityRegion(Region.empty(tol, domain.scale), ("point", x), 0.0)
    region = Region.from_ring(ring, tol, domain.scale)
    return VisibilityRegion(region, ("point", x), region.area)


def _append_pt(chain: list[Point], pt: Point, tol_abs: float):
    if chain and seg_len(chain[-1], pt) <= tol_abs:
        return
    chain.append(pt)


def _clean_ring(ring: list[Point], tol_abs: float) -> list[Point]:
    if len(ring) > 1 and seg_len(ring[0], ring[-1]) <= tol_abs:
        ring = ring[:-1]
    return ring


def _dedupe_sorted(vals: np.ndarray) -> np.ndarray:
    if len(vals) == 0:
        return vals
    keep = np.concatenate([[True], np.diff(vals) > _ANGLE_EPS])
    return vals[keep]


# ---------------------------------------------------------------------------
# segment and chain visibility
# ---------------------------------------------------------------------------

def _critical_lines(domain: Domain) -> list[tuple[Point, Point]]:
    """Mutually visible (reflex vertex, vertex) pairs; cached on the domain."""
    cache = getattr(domain, "_wr_critlines", None)
    if cache is not None:
        return cache
    verts: list[Point] = []
    seen = set()
    for ring in domain.rings():
        for vx, vy in ring:
            k = (round(float(vx), 12), round(float(vy), 12))
            if k not in seen:
                seen.add(k)
                verts.append((float(vx), float(vy)))
    pairs = []
    tol_abs = domain.tol.abs_coord(domain.scale)
    for r in domain.reflex_vertices():
        for v in verts:
            if seg_len(r, v) <= tol_abs:
                continue
            if segment_inside(domain, r, v):
                pairs.append((r, v))
    domain._wr_critlines = pairs
    return pairs


def critical_params_on_segment(domain: Domain, a: Point, b: Point) -> list[float]:
    """Parameters in [0,1] where the combinatorial structure of point
    visibility can change along segment ab (plus the endpoints)."""
    L = seg_len(a, b)
    ts = {0.0, 1.0}
    if L == 0:
        return sorted(ts)
    d = (b[0] - a[0], b[1] - a[1])
    for r, v in _critical_lines(domain):
        rv = (v[0] - r[0], v[1] - r[1])
        denom = d[0] * rv[1] - d[1] * rv[0]
        if abs(denom) <= 1e-14 * (L * seg_len(r, v)):
            continue
        t = ((r[0] - a[0]) * rv[1] - (r[1] - a[1]) * rv[0]) / denom
        if not (1e-9 < t < 1 - 1e-9):
            continue
        # the shadow window through r sweeps past v only when v lies beyond r
        # as seen from the moving point; crossings with v on the near side of
        # r anchor no window event
        px = a[0] + t * d[0]
        py = a[1] + t * d[1]
        if (r[0] - px) * rv[0] + (r[1] - py) * rv[1] >= -1e-12 * L * seg_len(r, v):
            ts.add(float(t))
    return sorted(ts)


def _point_vis_cached(domain: Domain, pt: Point, tol: ToleranceConfig) -> VisibilityRegion:
    cache = getattr(domain, "_wr_pointvis", None)
    if cache is None:
        cache = {}
        domain._wr_pointvis = cache
    key = (round(pt[0], 12), round(pt[1], 12))
    hit = cache.get(key)
    if hit is None:
        hit = visibility_from_point(domain, pt, tol)
        if len(cache) < 100000:
            cache[key] = hit
    return hit


def visibility_from_segment(domain: Domain, seg: Segment | tuple[Point, Point],
                            tol: ToleranceConfig | None = None) -> VisibilityRegion:
    """Weak visibility region of a segment: points seen from at least one
    point of the segment."""
    tol = tol or domain.tol
    if isinstance(seg, Segment):
        a, b = seg.a, seg.b
    else:
        a, b = seg
    tol_abs = tol.abs_coord(domain.scale)
    if seg_len(a, b) <= tol_abs:
        vr = _point_vis_cached(domain, a, tol)
        return VisibilityRegion(vr.region, ("segment", a, b), vr.area)
    cache = getattr(domain, "_wr_segvis", None)
    if cache is None:
        cache = {}
        domain._wr_segvis = cache
    key = frozenset(((round(a[0], 12), round(a[1], 12)), (round(b[0], 12), round(b[1], 12))))
    hit = cache.get(key)
    if hit is not None:
        return VisibilityRegion(hit, ("segment", a, b), hit.area)
    if not segment_inside(domain, a, b):
        raise SegmentLeavesDomain(f"segment {a}-{b} leaves the domain")
    ts = critical_params_on_segment(domain, a, b)
    pieces = []
    for t in ts:
        pt = (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))
        pieces.append(_point_vis_cached(domain, pt, tol).region)
    region = union_all(pieces, tol)
    if len(cache) < 200000:
        cache[key] = region
    return VisibilityRegion(region, ("segment", a, b), region.area)


def visibility_of_chain(domain: Domain, waypoints: list[Point],
                        tol: ToleranceConfig | None = None) -> VisibilityRegion:
    """Visibility of a polyline (union over its edges); a single waypoint
    reduces to point visibility."""
    tol = tol or domain.tol
    if len(waypoints) == 0:
        return VisibilityRegion(Region.empty(tol, domain.scale), ("chain",), 0.0)
    if len(waypoints) == 1:
        vr = _point_vis_cached(domain, waypoints[0], tol)
        return VisibilityRegion(vr.region, ("chain", tuple(waypoints)), vr.area)
    pieces = []
    for u, v in zip(waypoints[:-1], waypoints[1:]):
        pieces.append(visibility_from_segment(domain, (u, v), tol).region)
    region = union_all(pieces, tol)
    return VisibilityRegion(region, ("chain", tuple(waypoints)), region.area)


def marginal_visibility(domain: Domain, seg: Segment | tuple[Point, Point],
                        base_waypoints: list[Point],
                        tol: ToleranceConfig | None = None) -> VisibilityRegion:
    """Region seen by the segment but not by the base chain, V(seg) \\ V(base).

    The base chain is expected to end at the segment's first endpoint; by the
    visibility-overlap substructure this difference is independent of which
    relatively convex chain produced the base, only its geodesic matters.
    """
    tol = tol or domain.tol
    if isinstance(seg, Segment):
        a, b = seg.a, seg.b
    else:
        a, b = seg
    tol_abs = tol.abs_coord(domain.scale)
    if base_waypoints and seg_len(base_waypoints[-1], a) > tol_abs:
        raise ValueError("base chain must end at the segment's first endpoint")
    vis_seg = visibility_from_segment(domain, (a, b), tol)
    vis_base = visibility_of_chain(domain, base_waypoints, tol)
    region = vis_seg.region.difference(vis_base.region)
    return VisibilityRegion(region, ("marginal", a, b), region.area)
