"""Candidate turn-point discretization: grid/triangulation overlay, the
approximation parameter formulas, bucket specs, and tour snapping.

The overlay places a pixel grid of side `delta` (pixel centers aligned on the
depot) over a triangulation of the domain inside an axis-aligned window of
side `L` centered on the depot; every overlay cell within the window then has
diameter at most delta*sqrt(2) and perimeter at most 4*delta, and the cell
vertices form the candidate set from which approximate tours are assembled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOL, ToleranceConfig
from .errors import CandidateCapExceeded, InvalidEpsilon, TourOutsideWindow
from .geodesic import AngularOrder, ShortestPathTree, angular_order, build_spt, relative_convex_hull
from .geom import (
    Domain,
    Point,
    PolygonWithHoles,
    Triangulation,
    seg_len,
    shoelace,
    triangulate_domain,
)
from .tour import Tour

SQRT2 = math.sqrt(2.0)
SNAP_LENGTH_COEFF = 8.0 + 4.0 * SQRT2   # per-vertex snapping overhead factor
DELTA_DENOM_COEFF = 16.0 + 8.0 * SQRT2  # denominator constant of the delta formulas

DEFAULT_CANDIDATE_CAP = 20_000


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned pixel grid of side `delta` inside an L-by-L window
    centered on the depot; pixel centers are aligned with the depot."""

    center: Point
    delta: float
    L: float

    def __post_init__(self):
        if not (self.delta > 0 and self.L >= self.delta):
            raise ValueError("need delta > 0 and L >= delta")

    def lines(self) -> tuple[np.ndarray, np.ndarray]:
        """Grid line coordinates (x-lines, y-lines), window edges included."""
        cx, cy = self.center
        half = self.L / 2.0
        k = int(math.floor((half - self.delta / 2.0) / self.delta))
        offs = self.delta / 2.0 + self.delta * np.arange(0, k + 1)
        offs = offs[offs <= half + 1e-12 * self.L]
        base = np.concatenate([-offs[::-1], offs])
        xs = np.unique(np.concatenate([cx + base, [cx - half, cx + half]]))
        ys = np.unique(np.concatenate([cy + base, [cy - half, cy + half]]))
        return xs, ys

    def in_window(self, p: Point, margin: float = 0.0) -> bool:
        return (abs(p[0] - self.center[0]) <= self.L / 2.0 + margin
                and abs(p[1] - self.center[1]) <= self.L / 2.0 + margin)


@dataclass(frozen=True)
class BucketSpec:
    """Uniform bucketing of a quota (area) or budget (length) axis."""

    I: float
    count: int
    rounding: str  # "down" for area quotas, "up" for lengths

    def __post_init__(self):
        if self.I <= 0:
            raise ValueError("bucket width must be positive")
        if self.rounding not in ("down", "up"):
            raise ValueError("rounding must be 'down' or 'up'")

    def index(self, value: float) -> int:
        q = value / self.I
        if self.rounding == "down":
            return max(0, int(math.floor(q + 1e-12)))
        return max(0, int(math.ceil(q - 1e-12)))


# ---------------------------------------------------------------------------
# parameter formulas
# ---------------------------------------------------------------------------

def _check_eps(*eps: float):
    for e in eps:
        if not (0.0 < e <= 1.0):
            raise InvalidEpsilon(f"epsilon {e} outside (0, 1]")


def choose_parameters_qwrp(n: int, A: float, L: float, eps1: float, eps2: float) -> tuple[float, float]:
    """Pixel size and quota bucket width for the quota-route dual approximation."""
    _check_eps(eps1, eps2)
    if n < 3 or A <= 0 or L <= 0:
        raise ValueError("need n >= 3, A > 0, L > 0")
    delta = eps1 * L / (DELTA_DENOM_COEFF * n)
    I = eps1 * eps2 * A / (2.0 * (n - 3) * eps1 + (32.0 + 16.0 * SQRT2) * n)
    return delta, I


def choose_parameters_bwrp(n: int, B: float, eps: float) -> tuple[float, float]:
    """Pixel size and length bucket width for the budgeted-route approximation.

    The returned values satisfy
    B + (8+4*sqrt2)*delta*n + (2(n-3) + 2B/delta)*I <= (1+eps)*B.
    """
    _check_eps(eps)
    if n < 3 or B <= 0:
        raise ValueError("need n >= 3 and B > 0")
    delta = eps * B / (DELTA_DENOM_COEFF * n)
    I = eps * eps * B / (4.0 * (n - 3) * eps + (64.0 + 32.0 * SQRT2) * n)
    slack = SNAP_LENGTH_COEFF * delta * n + (2.0 * (n - 3) + 2.0 * B / delta) * I
    if B + slack > (1.0 + eps) * B * (1.0 + 1e-9):
        raise AssertionError("bwrp parameter guarantee violated")
    return delta, I


def rounding_loss_bound(n: int, L: float, delta: float, I: float) -> float:
    """Worst-case total value lost to bucket rounding along one tour."""
    return I * (2.0 * (n - 3) + 2.0 * L / delta)


# ---------------------------------------------------------------------------
# overlay construction
# ---------------------------------------------------------------------------

def _clip_cell(cell: list[Point], axis: int, value: float, keep_le: bool,
               eps: float) -> list[Point]:
    """Sutherland-Hodgman clip of a convex cell against an axis-aligned
    half-plane."""
    out: list[Point] = []
    m = len(cell)
    for i in range(m):
        a = cell[i]
        b = cell[(i + 1) % m]
        fa = (value - a[axis]) if keep_le else (a[axis] - value)
        fb = (value - b[axis]) if keep_le else (b[axis] - value)
        if fa >= -eps:
            out.append(a)
        if (fa > eps and fb < -eps) or (fa < -eps and fb > eps):
            t = (value - a[axis]) / (b[axis] - a[axis])
            p = (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))
            out.append(p)
    # dedupe within eps
    clean: list[Point] = []
    for p in out:
        if clean and abs(clean[-1][0] - p[0]) <= eps and abs(clean[-1][1] - p[1]) <= eps:
            continue
        clean.append(p)
    if len(clean) > 2 and abs(clean[0][0] - clean[-1][0]) <= eps and abs(clean[0][1] - clean[-1][1]) <= eps:
        clean.pop()
    return clean if len(clean) >= 3 else []


@dataclass
class CandidateSet:
    """Candidate turn points with their geodesic angular order and the
    overlay cells used for snapping."""

    points: list[Point]
    order: AngularOrder
    spt: ShortestPathTree
    cell_of: dict[tuple, int]
    reflex_ids: list[int]
    grid: GridSpec
    cells: list[list[Point]] = field(default_factory=list, repr=False)
    tri: Triangulation | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.points)

    def locate_cell(self, p: Point, tol_abs: float) -> int | None:
        from .geom import _point_in_triangle

        for ci, cell in enumerate(self.cells):
            m = len(cell)
            inside = True
            for i in range(m):
                a, b = cell[i], cell[(i + 1) % m]
                crs = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
                if crs < -tol_abs * (seg_len(a, b) + 1e-300):
                    inside = False
                    break
            if inside:
                return ci
        return None


def build_candidates(domain: Domain, s: Point, grid: GridSpec,
                     cap: int = DEFAULT_CANDIDATE_CAP,
                     tol: ToleranceConfig | None = None) -> CandidateSet:
    """Materialize the overlay of triangulation, grid lines, and boundary
    edges, and collect cell vertices inside the window as candidates."""
    tol = tol or domain.tol
    est = count_candidates(domain, s, grid)
    if est > cap:
        raise CandidateCapExceeded(
            f"~{est} candidates exceed cap {cap}; increase epsilon or the cap")
    tri = triangulate_domain(domain, steiner=[s])
    xs, ys = grid.lines()
    eps = tol.abs_coord(domain.scale)
    margin = 2.0 * grid.delta
    cells: list[list[Point]] = []
    for t in range(len(tri.triangles)):
        cell0 = list(tri.triangle_coords(t))
        pieces = [cell0]
        for axis, lines in ((0, xs), (1, ys)):
            lo = min(p[axis] for p in cell0)
            hi = max(p[axis] for p in cell0)
            use = lines[(lines > lo + eps) & (lines < hi - eps)]
            for v in use:
                nxt = []
                for cell in pieces:
                    left = _clip_cell(cell, axis, float(v), True, eps)
                    right = _clip_cell(cell, axis, float(v), False, eps)
                    nxt.extend(c for c in (left, right) if c)
                pieces = nxt
        cells.extend(pieces)

    points: list[Point] = []
    key_to_idx: dict[tuple, int] = {}
    cell_of: dict[tuple, int] = {}

    def add_point(p: Point, ci: int | None):
        k = (round(p[0], 9), round(p[1], 9))
        if k not in key_to_idx:
            key_to_idx[k] = len(points)
            points.append((float(p[0]), float(p[1])))
            if ci is not None:
                cell_of[k] = ci

    add_point((float(s[0]), float(s[1])), None)
    for ci, cell in enumerate(cells):
        for p in cell:
            if grid.in_window(p, margin):
                add_point(p, ci)
    if len(points) > cap:
        raise CandidateCapExceeded(f"{len(points)} candidates exceed cap {cap}")

    spt = build_spt(domain, s, points, tol)
    order = angular_order(domain, spt, points)
    reflex_keys = {(round(r[0], 12), round(r[1], 12)) for r in domain.reflex_vertices()}
    reflex_ids = [i for i, p in enumerate(points)
                  if (round(p[0], 12), round(p[1], 12)) in reflex_keys]
    return CandidateSet(points=points, order=order, spt=spt, cell_of=cell_of,
                        reflex_ids=reflex_ids, grid=grid, cells=cells, tri=tri)


def explicit_candidates(domain: Domain, s: Point, points: list[Point],
                        tol: ToleranceConfig | None = None,
                        reference: float | None = None) -> CandidateSet:
    """Candidate set from an explicit coarse point list (no overlay); used for
    oracle-comparable solves and tiny instances."""
    tol = tol or domain.tol
    pts: list[Point] = [(float(s[0]), float(s[1]))]
    seen = {(round(s[0], 9), round(s[1], 9))}
    for p in points:
        k = (round(p[0], 9), round(p[1], 9))
        if k not in seen:
            seen.add(k)
            pts.append((float(p[0]), float(p[1])))
    spt = build_spt(domain, s, pts, tol)
    order = angular_order(domain, spt, pts, reference=reference)
    reflex_keys = {(round(r[0], 12), round(r[1], 12)) for r in domain.reflex_vertices()}
    reflex_ids = [i for i, p in enumerate(pts)
                  if (round(p[0], 12), round(p[1], 12)) in reflex_keys]
    bbox = domain.bbox
    L = 2.0 * max(bbox[2] - bbox[0], bbox[3] - bbox[1], 1e-9)
    grid = GridSpec((float(s[0]), float(s[1])), L / 4.0, L)
    return CandidateSet(points=pts, order=order, spt=spt, cell_of={},
                        reflex_ids=reflex_ids, grid=grid, cells=[], tri=None)


# ---------------------------------------------------------------------------
# exact candidate counting (no materialization)
# ---------------------------------------------------------------------------

def count_candidates(domain: Domain, s: Point, grid: GridSpec) -> int:
    """Exact count of overlay vertices inside the window, computed by
    scanline arithmetic so that the n^2/eps^2 growth law can be measured
    without materializing huge candidate sets.  Coincident overlay vertices
    are counted once per generating pair, so this upper-bounds the deduped
    materialized count."""
    xs, ys = grid.lines()
    cx, cy = grid.center
    half = grid.L / 2.0 + 2.0 * grid.delta
    x_lo, x_hi = cx - half, cx + half
    y_lo, y_hi = cy - half, cy + half

    segs = domain.boundary_segments()
    tri = triangulate_domain(domain, steiner=[s])
    diag_segs = []
    for i, j in tri.diagonals:
        diag_segs.append((tri.points[i], tri.points[j]))

    total = 0
    # grid x grid lattice points inside the domain
    xs_in = xs[(xs >= x_lo) & (xs <= x_hi)]
    for y in ys:
        if not (y_lo <= y <= y_hi):
            continue
        crossings = []
        for (a, b) in segs.reshape(-1, 2, 2):
            ay, by = a[1], b[1]
            if (ay <= y < by) or (by <= y < ay):
                t = (y - ay) / (by - ay)
                crossings.append(a[0] + t * (b[0] - a[0]))
        crossings.sort()
        for k in range(0, len(crossings) - 1, 2):
            lo = max(crossings[k], x_lo)
            hi = min(crossings[k + 1], x_hi)
            if hi >= lo:
                total += int(np.count_nonzero((xs_in >= lo) & (xs_in <= hi)))

    # grid lines x (boundary edges + diagonals)
    def seg_crossings(a, b) -> int:
        c = 0
        for lines, axis in ((xs, 0), (ys, 1)):
            lo, hi = sorted((a[axis], b[axis]))
            use = lines[(lines > lo) & (lines < hi)]
            if len(use) == 0 or hi == lo:
                continue
            other = 1 - axis
            t = (use - a[axis]) / (b[axis] - a[axis])
            w = a[other] + t * (b[other] - a[other])
            u = a[axis] + t * (b[axis] - a[axis])
            if axis == 0:
                px, py = u, w
            else:
                px, py = w, u
            inside = (px >= x_lo) & (px <= x_hi) & (py >= y_lo) & (py <= y_hi)
            c += int(np.count_nonzero(inside))
        return c

    for (a, b) in segs.reshape(-1, 2, 2):
        total += seg_crossings(a, b)
    for a, b in diag_segs:
        total += seg_crossings(np.asarray(a), np.asarray(b))

    # triangulation vertices (domain vertices plus the depot)
    for p in tri.points:
        if x_lo <= p[0] <= x_hi and y_lo <= p[1] <= y_hi:
            total += 1
    return total


# ---------------------------------------------------------------------------
# snapping
# ---------------------------------------------------------------------------

def snap_tour(domain: Domain, tour: Tour, candidates: CandidateSet,
              tol: ToleranceConfig | None = None) -> Tour:
    """Round a relatively convex tour onto candidate vertices: the snapped
    tour bounds the relative convex hull of the overlay cells containing the
    tour's vertices, so it sees everything the original tour saw and is
    longer by at most (8 + 4*sqrt2) * delta * n."""
    tol = tol or domain.tol
    tol_abs = tol.abs_coord(domain.scale)
    if not candidates.cells:
        raise ValueError("candidate set has no overlay cells (explicit set?)")
    corners: list[Point] = []
    for v in tour.vertices:
        if not candidates.grid.in_window(v, 2.0 * candidates.grid.delta):
            raise TourOutsideWindow(f"tour vertex {v} outside the grid window")
        ci = candidates.locate_cell(v, tol_abs)
        if ci is None:
            raise TourOutsideWindow(f"tour vertex {v} not inside any overlay cell")
        corners.extend(candidates.cells[ci])
    hull = relative_convex_hull(domain, corners, tol)
    snapped = Tour(hull.boundary, depot=tour.depot,
                   metadata={"snapped_from_length": tour.length,
                             "degenerate_hull": hull.degenerate})
    return snapped
