"""Instance generators: random polygons, line arrangements, comb and L
shapes for solver stress tests, and random priors."""

from __future__ import annotations

import math

import numpy as np

from .geom import Point, PolygonWithHoles, SimplePolygon


def random_simple_polygon(n: int, seed: int, kind: str = "star",
                          min_gap: float = 0.08) -> SimplePolygon:
    """Random simple polygon with n vertices.

    "star": radial jitter around the origin (always simple); "box": star
    polygon stretched anisotropically for skinnier features.
    """
    rng = np.random.default_rng(seed)
    for _ in range(200):
        ang = np.sort(rng.uniform(0, 2 * math.pi, n))
        if n > 2 and (np.min(np.diff(ang)) < min_gap / n * 2 * math.pi
                      or (2 * math.pi - (ang[-1] - ang[0])) < min_gap / n * 2 * math.pi):
            continue
        r = rng.uniform(0.25, 1.0, n)
        xs = np.cos(ang) * r
        ys = np.sin(ang) * r
        if kind == "box":
            xs = xs * rng.uniform(1.0, 2.5)
        pts = [(float(x), float(y)) for x, y in zip(xs, ys)]
        try:
            return SimplePolygon(pts)
        except Exception:
            continue
    raise RuntimeError(f"could not generate a valid polygon (n={n}, seed={seed})")


def random_points_inside(poly: SimplePolygon | PolygonWithHoles, k: int,
                         seed: int) -> list[Point]:
    rng = np.random.default_rng(seed)
    x0, y0, x1, y1 = poly.bbox
    out: list[Point] = []
    guard = 0
    while len(out) < k and guard < 200 * k + 1000:
        guard += 1
        p = (float(rng.uniform(x0, x1)), float(rng.uniform(y0, y1)))
        if poly.contains(p):
            out.append(p)
    if len(out) < k:
        raise RuntimeError("rejection sampling failed")
    return out


def random_boundary_point(poly: SimplePolygon, seed: int) -> Point:
    rng = np.random.default_rng(seed)
    i = int(rng.integers(poly.n))
    t = float(rng.uniform(0.15, 0.85))
    a = poly.vertices[i]
    b = poly.vertices[(i + 1) % poly.n]
    return (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))


def l_shape(scale: float = 1.0) -> SimplePolygon:
    s = scale
    return SimplePolygon([(0, 0), (2 * s, 0), (2 * s, s), (s, s), (s, 2 * s), (0, 2 * s)])


def comb_polygon(teeth: int = 3, tooth_depth: float = 1.5, tooth_width: float = 0.35,
                 gap: float = 0.65, base_height: float = 0.5) -> SimplePolygon:
    """Comb with upward teeth; seeing into each tooth requires standing near
    its opening, which makes quota/budget trade-offs non-trivial."""
    pts: list[Point] = [(0.0, 0.0)]
    x = 0.0
    width = teeth * tooth_width + (teeth + 1) * gap
    pts.append((width, 0.0))
    pts.append((width, base_height))
    x = width - gap
    for _ in range(teeth):
        pts.append((x, base_height))
        pts.append((x, base_height + tooth_depth))
        pts.append((x - tooth_width, base_height + tooth_depth))
        pts.append((x - tooth_width, base_height))
        x -= tooth_width + gap
    pts.append((0.0, base_height))
    return SimplePolygon(pts)


def zigzag_corridor(bends: int = 3, width: float = 0.5, leg: float = 2.0) -> SimplePolygon:
    """Staircase corridor; visibility is blocked around each bend."""
    if bends == 3:
        return SimplePolygon([(0, 0), (leg, 0), (leg, leg), (2 * leg, leg),
                              (2 * leg, leg + width), (leg - width, leg + width),
                              (leg - width, width), (0, width)])
    if bends == 2:
        return SimplePolygon([(0, 0), (leg, 0), (leg, leg), (leg - width, leg),
                              (leg - width, width), (0, width)])
    raise ValueError("zigzag_corridor supports bends in {2, 3}")


def random_arrangement(k: int, seed: int) -> list[tuple[float, float, float]]:
    """k random lines in general-ish position (no two near-parallel)."""
    rng = np.random.default_rng(seed)
    lines: list[tuple[float, float, float]] = []
    guard = 0
    while len(lines) < k and guard < 100 * k:
        guard += 1
        th = float(rng.uniform(0, math.pi))
        c = float(rng.uniform(-1, 1))
        a, b = math.cos(th), math.sin(th)
        if any(abs(a * b2 - b * a2) < 0.05 for a2, b2, _ in lines):
            continue
        lines.append((a, b, c))
    if len(lines) < k:
        raise RuntimeError("could not draw non-parallel lines")
    return lines


def square_with_hole(side: float = 4.0, hole_side: float = 1.0) -> PolygonWithHoles:
    o = SimplePolygon([(0, 0), (side, 0), (side, side), (0, side)])
    c = side / 2.0
    h = hole_side / 2.0
    hole = SimplePolygon([(c - h, c - h), (c + h, c - h), (c + h, c + h), (c - h, c + h)])
    return PolygonWithHoles(o, [hole])


def random_density(domain, seed: int) -> list[float]:
    """Random nonnegative per-triangle densities for the reference
    triangulation (unnormalized)."""
    from .geom import triangulate_domain

    rng = np.random.default_rng(seed)
    tri = triangulate_domain(domain)
    return rng.uniform(0.05, 3.0, len(tri.triangles)).tolist()
