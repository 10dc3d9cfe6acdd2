"""Region algebra: possibly-disconnected areas with holes, as oriented rings.

Boolean operations are delegated to shapely (GEOS) behind this interface;
all outputs are re-normalized into ring-list form, dropping slivers below the
area tolerance and recording how much was dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import shapely
from shapely.geometry import MultiPolygon, Polygon as ShPolygon
from shapely.ops import unary_union

from .config import DEFAULT_TOL, ToleranceConfig
from .geom import Point, SimplePolygon, PolygonWithHoles, shoelace


@dataclass
class Region:
    """Union of polygons-with-holes: list of (shell, holes) ring pairs.

    Shells are CCW, holes CW.  `dropped_area` records slivers removed during
    normalization (the DegenerateResult flag of the clip contract).
    """

    parts: list[tuple[list[Point], list[list[Point]]]] = field(default_factory=list)
    tol: ToleranceConfig = field(default_factory=lambda: DEFAULT_TOL, repr=False)
    scale: float = 1.0
    dropped_area: float = 0.0

    def __post_init__(self):
        self._sh = None

    # -- constructors ---------------------------------------------------

    @classmethod
    def empty(cls, tol: ToleranceConfig = DEFAULT_TOL, scale: float = 1.0) -> "Region":
        return cls([], tol, scale)

    @classmethod
    def from_ring(cls, ring: list[Point], tol: ToleranceConfig = DEFAULT_TOL,
                  scale: float | None = None) -> "Region":
        """Region bounded by a single ring; shapely validation is deferred to
        the first boolean operation."""
        arr = np.asarray(ring, dtype=float)
        if scale is None:
            span = arr.max(axis=0) - arr.min(axis=0)
            scale = float(np.hypot(*span)) or 1.0
        if abs(shoelace(arr)) <= tol.abs_area(scale):
            return cls.empty(tol, scale)
        return cls([(_orient_ring(list(map(tuple, arr)), ccw=True), [])], tol, scale)

    @classmethod
    def from_polygon(cls, poly: SimplePolygon | PolygonWithHoles,
                     tol: ToleranceConfig | None = None) -> "Region":
        tol = tol or poly.tol
        if isinstance(poly, PolygonWithHoles):
            shell = poly.outer.vertices
            holes = [list(map(tuple, h.coords[::-1])) for h in poly.holes]
            return cls([(list(shell), holes)], tol, poly.scale)
        return cls([(list(poly.vertices), [])], tol, poly.scale)

    @classmethod
    def _from_shapely(cls, geom, tol: ToleranceConfig, scale: float) -> "Region":
        min_area = tol.abs_area(scale)
        parts: list[tuple[list[Point], list[list[Point]]]] = []
        dropped = 0.0
        polys: list[ShPolygon] = []
        if geom.is_empty:
            pass
        elif isinstance(geom, ShPolygon):
            polys = [geom]
        elif isinstance(geom, MultiPolygon):
            polys = list(geom.geoms)
        else:  # GeometryCollection from make_valid: keep areal parts only
            polys = [g for g in getattr(geom, "geoms", []) if isinstance(g, (ShPolygon, MultiPolygon))]
            polys = [p for g in polys for p in (g.geoms if isinstance(g, MultiPolygon) else [g])]
        for p in polys:
            if p.area <= min_area:
                dropped += p.area
                continue
            shell = _orient_ring(list(p.exterior.coords[:-1]), ccw=True)
            holes = []
            for h in p.interiors:
                ring = list(h.coords[:-1])
                hole_area = abs(shoelace(np.asarray(ring)))
                if hole_area <= min_area:
                    dropped += 0.0  # filled-in hole does not lose region area
                    continue
                holes.append(_orient_ring(ring, ccw=False))
            parts.append((shell, holes))
        out = cls(parts, tol, scale, dropped)
        return out

    # -- shapely bridge ---------------------------------------------------

    def shapely(self):
        if self._sh is None:
            if not self.parts:
                self._sh = ShPolygon()
            else:
                polys = [ShPolygon(shell, holes) for shell, holes in self.parts]
                polys = [p if p.is_valid else shapely.make_valid(p) for p in polys]
                self._sh = unary_union(polys)
        return self._sh

    # -- properties ---------------------------------------------------------

    @property
    def area(self) -> float:
        total = 0.0
        for shell, holes in self.parts:
            total += abs(shoelace(np.asarray(shell)))
            for h in holes:
                total -= abs(shoelace(np.asarray(h)))
        return total

    @property
    def is_empty(self) -> bool:
        return not self.parts

    def rings(self) -> list[list[Point]]:
        out = []
        for shell, holes in self.parts:
            out.append(shell)
            out.extend(holes)
        return out

    def contains_points(self, pts: np.ndarray) -> np.ndarray:
        """Closed membership for an array of points (k, 2)."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.is_empty:
            return np.zeros(len(pts), dtype=bool)
        geoms = shapely.points(pts[:, 0], pts[:, 1])
        return shapely.covers(self.shapely(), geoms)

    # -- set operations -------------------------------------------------

    def _binary(self, other: "Region", op: str) -> "Region":
        scale = max(self.scale, other.scale)
        a, b = self.shapely(), other.shapely()
        if op == "union":
            g = a.union(b)
        elif op == "difference":
            g = a.difference(b)
        elif op == "intersection":
            g = a.intersection(b)
        else:
            raise ValueError(op)
        return Region._from_shapely(g, self.tol, scale)

    def union(self, other: "Region") -> "Region":
        return self._binary(other, "union")

    def difference(self, other: "Region") -> "Region":
        return self._binary(other, "difference")

    def intersection(self, other: "Region") -> "Region":
        return self._binary(other, "intersection")


def _orient_ring(ring: list, ccw: bool) -> list[Point]:
    arr = np.asarray(ring, dtype=float)
    area = shoelace(arr)
    pts = [(float(x), float(y)) for x, y in ring]
    if (area > 0) != ccw:
        pts.reverse()
    return pts


def as_region(obj, tol: ToleranceConfig = DEFAULT_TOL) -> Region:
    if isinstance(obj, Region):
        return obj
    if isinstance(obj, (SimplePolygon, PolygonWithHoles)):
        return Region.from_polygon(obj)
    if isinstance(obj, (list, tuple, np.ndarray)):
        return Region.from_ring(list(obj), tol)
    raise TypeError(f"cannot interpret {type(obj)} as a region")


def clip_union(a, b, tol: ToleranceConfig = DEFAULT_TOL) -> Region:
    """Set union of two regions (any region-like operands)."""
    return as_region(a, tol).union(as_region(b, tol))


def clip_difference(a, b, tol: ToleranceConfig = DEFAULT_TOL) -> Region:
    """Set difference a \\ b of two regions."""
    return as_region(a, tol).difference(as_region(b, tol))


def clip_intersection(a, b, tol: ToleranceConfig = DEFAULT_TOL) -> Region:
    return as_region(a, tol).intersection(as_region(b, tol))


def union_all(regions: list[Region], tol: ToleranceConfig = DEFAULT_TOL) -> Region:
    regions = [r for r in regions if not r.is_empty]
    if not regions:
        return Region.empty(tol)
    scale = max(r.scale for r in regions)
    g = unary_union([r.shapely() for r in regions])
    return Region._from_shapely(g, regions[0].tol, scale)
