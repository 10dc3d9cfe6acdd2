"""Stochastic target search: probability-measure variants of the quota and
budget solvers.

A static target is distributed over the domain by a prior given as a
piecewise-constant density on a reference triangulation; region probabilities
integrate exactly by clipping against the triangles.  The searcher's solvers
are the area solvers with every region weighed by the measure instead.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from shapely.geometry import Polygon as ShPolygon
from shapely.strtree import STRtree

from .config import ToleranceConfig
from .errors import InfeasibleQuota, RegionOutsideDomain
from .geom import Domain, Point, Triangulation, cross, triangulate_domain
from .region import Region, as_region
from .simple_dp import BudgetParams, QuotaParams, solve_bwrp, solve_qwrp_dual
from .tour import Tour


@dataclass
class MeasureOracle:
    """Prior target distribution: constant density per reference triangle.

    Normalized so the whole domain carries probability one; triangle queries
    are O(1) after construction and general regions integrate by clipping.
    """

    reference: Triangulation
    density: list[float]
    total: float = field(init=False)

    def __post_init__(self):
        if len(self.density) != len(self.reference.triangles):
            raise ValueError("one density value per reference triangle required")
        if any(d < 0 for d in self.density):
            raise ValueError("densities must be nonnegative")
        self._tri_polys = []
        self._tri_prob = []
        for t, (i, j, k) in enumerate(self.reference.triangles):
            a, b, c = (self.reference.points[v] for v in (i, j, k))
            area = 0.5 * abs(cross(a[0], a[1], b[0], b[1], c[0], c[1]))
            self._tri_polys.append(ShPolygon([a, b, c]))
            self._tri_prob.append(self.density[t] * area)
        self.total = float(sum(self._tri_prob))
        self._tree = STRtree(self._tri_polys)

    @classmethod
    def uniform(cls, domain: Domain) -> "MeasureOracle":
        tri = triangulate_domain(domain)
        d = 1.0 / domain.area
        return cls(tri, [d] * len(tri.triangles))

    @classmethod
    def from_densities(cls, domain: Domain, raw_density: list[float],
                       normalize: bool = True, warn_threshold: float = 0.01) -> "MeasureOracle":
        """Build from per-triangle densities of the domain's reference
        triangulation, rescaling to total probability one (warning recorded
        when the input is off by more than the threshold)."""
        tri = triangulate_domain(domain)
        mo = cls(tri, list(raw_density))
        mo.normalization_warning = abs(mo.total - 1.0) > warn_threshold
        if normalize and mo.total > 0:
            scale = 1.0 / mo.total
            return cls(tri, [d * scale for d in raw_density])
        return mo

    def triangle_probability(self, t: int) -> float:
        return self._tri_prob[t]

    def measure(self, region) -> float:
        """Probability mass of a region (clipped against the triangles)."""
        reg = as_region(region)
        if reg.is_empty:
            return 0.0
        g = reg.shapely()
        total = 0.0
        for idx in self._tree.query(g):
            t = int(idx)
            if self.density[t] == 0.0:
                continue
            inter = g.intersection(self._tri_polys[t])
            if not inter.is_empty:
                total += self.density[t] * inter.area
        return total

    def weight_fn(self):
        return lambda region: self.measure(region)


def measure_of_region(mu: MeasureOracle, region, domain: Domain | None = None,
                      tol: ToleranceConfig | None = None) -> float:
    """Probability of a region under the prior; raises when the region pokes
    outside the domain it was built for."""
    reg = as_region(region)
    if domain is not None and not reg.is_empty:
        dom_reg = Region.from_polygon(domain)
        outside = reg.difference(dom_reg)
        if outside.area > (tol or domain.tol).abs_area(domain.scale):
            raise RegionOutsideDomain("region extends outside the domain")
    return mu.measure(reg)


# ---------------------------------------------------------------------------
# search solvers
# ---------------------------------------------------------------------------

def solve_min_time_detection(domain: Domain, s: Point, mu: MeasureOracle,
                             p: float, eps1: float = 0.25, eps2: float = 0.25,
                             speed: float = 1.0, **kw) -> tuple[Tour, float]:
    """Minimum-time search route achieving detection probability at least
    (1-eps2)*p, within (1+eps1) of the optimal time; returns (tour, time)."""
    if not (0.0 <= p <= 1.0 + 1e-12):
        raise InfeasibleQuota(f"probability quota {p} outside [0, 1]")
    if speed <= 0:
        raise ValueError("speed must be positive")
    tour = solve_qwrp_dual(domain, s, QuotaParams(A=p, eps1=eps1, eps2=eps2),
                           weight_fn=mu.weight_fn(), total_weight=mu.total, **kw)
    t = tour.length / speed
    tour.metadata.update({"problem": "min_time_detection", "speed": speed,
                          "time": t, "probability": tour.metadata.get("measured_weight")})
    return tour, t


def solve_max_detection(domain: Domain, s: Point, mu: MeasureOracle,
                        T: float, eps: float = 0.25, speed: float = 1.0,
                        **kw) -> tuple[Tour, float]:
    """Search route maximizing detection probability within time T; returns
    (tour, probability).  Length is at most (1+eps)*speed*T."""
    if T < 0:
        raise ValueError("time budget must be nonnegative")
    if speed <= 0:
        raise ValueError("speed must be positive")
    tour = solve_bwrp(domain, s, BudgetParams(B=T * speed, eps=eps),
                      weight_fn=mu.weight_fn(), **kw)
    prob = tour.metadata.get("measured_weight")
    if prob is None:
        vr = tour.seen or tour.measure_seen(domain)
        prob = mu.measure(vr.region)
        tour.metadata["measured_weight"] = prob
    tour.metadata.update({"problem": "max_detection", "speed": speed,
                          "time_budget": T, "probability": prob})
    return tour, float(prob)


# ---------------------------------------------------------------------------
# density file round trip
# ---------------------------------------------------------------------------

def density_doc(mu: MeasureOracle) -> dict:
    """Serializable form: the reference triangulation plus (index, density)
    pairs, probabilities re-derivable on load."""
    return {
        "schema_version": 1,
        "points": [[f"{x:.17g}", f"{y:.17g}"] for x, y in mu.reference.points],
        "triangles": [list(t) for t in mu.reference.triangles],
        "densities": [[t, f"{d:.17g}"] for t, d in enumerate(mu.density)],
    }


def density_from_doc(doc: dict, tol_warn: float = 0.01) -> MeasureOracle:
    pts = [(float(x), float(y)) for x, y in doc["points"]]
    tris = [tuple(t) for t in doc["triangles"]]
    dens = [0.0] * len(tris)
    for t, d in doc["densities"]:
        dens[int(t)] = float(d)
    tri = Triangulation(points=pts, triangles=tris, diagonals=[], adjacency={})
    mo = MeasureOracle(tri, dens)
    mo.normalization_warning = abs(mo.total - 1.0) > tol_warn
    if abs(mo.total - 1.0) > 1e-12 and mo.total > 0:
        mo = MeasureOracle(tri, [d / mo.total for d in dens])
    return mo
