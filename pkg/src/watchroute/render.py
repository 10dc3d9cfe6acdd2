"""Deterministic SVG rendering of instances and results: domain gray, seen
region white, holes hatched, tour red, candidates as an optional layer."""

from __future__ import annotations

import math

from .geom import Point
from .instances import InstanceDoc, ResultDoc
from .tour import Tour

_VIEW = 1000.0


def _fmt(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError("non-finite coordinate in rendering")
    return f"{x:.6f}".rstrip("0").rstrip(".")


class _Mapper:
    def __init__(self, bbox, pad=0.05):
        x0, y0, x1, y1 = bbox
        w = max(x1 - x0, 1e-12)
        h = max(y1 - y0, 1e-12)
        size = max(w, h) * (1 + 2 * pad)
        self.sx = _VIEW / size
        self.ox = x0 - (size - w) / 2
        self.oy = y0 - (size - h) / 2
        self.size = size

    def pt(self, p: Point) -> str:
        # flip y so the svg is not mirrored
        x = (p[0] - self.ox) * self.sx
        y = _VIEW - (p[1] - self.oy) * self.sx
        return f"{_fmt(x)},{_fmt(y)}"


def _poly_path(mapper: _Mapper, pts: list[Point]) -> str:
    return " ".join(mapper.pt(p) for p in pts)


def render_svg(instance: InstanceDoc, result: ResultDoc | None = None,
               show_candidates: bool = False) -> str:
    """SVG document for an instance and (optionally) its result tour."""
    parts: list[str] = []
    parts.append(f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {int(_VIEW)} {int(_VIEW)}">')
    parts.append('<defs><pattern id="hatch" width="8" height="8" patternTransform="rotate(45)"'
                 ' patternUnits="userSpaceOnUse"><line x1="0" y1="0" x2="0" y2="8"'
                 ' stroke="#666" stroke-width="2"/></pattern></defs>')
    parts.append(f'<rect width="{int(_VIEW)}" height="{int(_VIEW)}" fill="#fff"/>')

    if instance.kind == "lines":
        arr, _graph = instance.domain()
        mp = _Mapper(arr.bbox)
        x0, y0, x1, y1 = arr.bbox
        for a, b, c in arr.lines:
            # clip line a x + b y = c to the bbox by its two farthest border hits
            pts = []
            for (px, py, qx, qy) in ((x0, y0, x1, y0), (x1, y0, x1, y1),
                                     (x1, y1, x0, y1), (x0, y1, x0, y0)):
                dx, dy = qx - px, qy - py
                den = a * dx + b * dy
                if abs(den) < 1e-15:
                    continue
                t = (c - a * px - b * py) / den
                if -1e-9 <= t <= 1 + 1e-9:
                    pts.append((px + t * dx, py + t * dy))
            if len(pts) >= 2:
                parts.append(f'<line x1="{mp.pt(pts[0]).split(",")[0]}" y1="{mp.pt(pts[0]).split(",")[1]}"'
                             f' x2="{mp.pt(pts[1]).split(",")[0]}" y2="{mp.pt(pts[1]).split(",")[1]}"'
                             ' stroke="#000" stroke-width="2"/>')
        for v in arr.vertices:
            x, y = mp.pt(v).split(",")
            parts.append(f'<circle cx="{x}" cy="{y}" r="4" fill="#444"/>')
    else:
        domain = instance.domain()
        mp = _Mapper(domain.bbox)
        outer = domain.outer.vertices if hasattr(domain, "outer") else domain.vertices
        parts.append(f'<polygon points="{_poly_path(mp, outer)}" fill="#bbb" stroke="none"/>')
        if result is not None:
            tour = Tour(result.tour)
            vr = tour.measure_seen(domain, instance.tol())
            for ring in vr.region.rings():
                parts.append(f'<polygon points="{_poly_path(mp, ring)}" fill="#fff" stroke="none"/>')
        parts.append(f'<polygon points="{_poly_path(mp, outer)}" fill="none" stroke="#000" stroke-width="3"/>')
        for hole in getattr(domain, "holes", []):
            parts.append(f'<polygon points="{_poly_path(mp, hole.vertices)}"'
                         ' fill="url(#hatch)" stroke="#000" stroke-width="2"/>')
        if show_candidates and instance.candidates:
            for p in instance.candidates:
                x, y = mp.pt(p).split(",")
                parts.append(f'<circle cx="{x}" cy="{y}" r="3" fill="#28d"/>')
        if instance.depot is not None:
            x, y = mp.pt(instance.depot).split(",")
            parts.append(f'<circle cx="{x}" cy="{y}" r="6" fill="#070"/>')

    if result is not None and result.tour:
        if len(result.tour) == 1:
            x, y = mp.pt(result.tour[0]).split(",")
            parts.append(f'<circle cx="{x}" cy="{y}" r="6" fill="none" stroke="#d22" stroke-width="3"/>')
        else:
            parts.append(f'<polygon points="{_poly_path(mp, result.tour)}"'
                         ' fill="none" stroke="#d22" stroke-width="3"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
