"""Hardness-gadget instance generators.

Knapsack corridor polygons: a long corridor carries large mandatory chambers
behind deep narrow necks (forcing a full traversal), and between stations
narrow shafts climb to roof chambers whose side wings hold the item values.
Climbing shaft i costs its item weight exactly (twice the shaft height), so
the optimal choice of climbs solves the (inverse) knapsack over the integral
weights and values; these instances give exact end-to-end solver checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import WatchrouteError
from .geom import Point, SimplePolygon
from .instances import InstanceDoc


@dataclass
class GadgetLayout:
    polygon: SimplePolygon
    depot: Point
    quota: float
    base_length: float
    candidates: list[Point]
    shaft_tops: list[Point]
    weights: list[float]
    values: list[float]
    value_quota: float
    meta: dict = field(default_factory=dict)

    def budget_for(self, knapsack_budget: float, margin: float = 0.25) -> float:
        """Route budget granting the base traversal plus a knapsack budget's
        worth of climbs (margin absorbs the diagonal-oscillation slack)."""
        return self.base_length + knapsack_budget + margin


def gen_gadget_qwrp(weights: list[float], values: list[float], value_quota: float,
                    *, corridor_height: float = 0.5,
                    neck_depth: float = 0.5,
                    l0_factor: float = 30.0,
                    chamber_value_factor: float = 4.0,
                    shaft_width_factor: float = 1e-3) -> GadgetLayout:
    """Build the corridor gadget for an inverse-knapsack instance.

    Requirements on the inputs: positive integral weights and values.  The
    emitted quota is the polygon area minus the total wing value plus the
    value quota, so a route is feasible exactly when its climbed shafts carry
    total value at least `value_quota`.
    """
    m = len(weights)
    if m == 0 or m != len(values):
        raise WatchrouteError("need matching nonempty weights and values")
    if any(w <= 0 for w in weights) or any(v <= 0 for v in values):
        raise WatchrouteError("weights and values must be positive")
    if any(abs(x - round(x)) > 1e-9 for x in list(weights) + list(values)):
        raise WatchrouteError("weights and values must be integral for the reduction")

    h = corridor_height
    d_n = neck_depth
    delta = shaft_width_factor * min(weights) / m
    l0 = l0_factor * max(sum(weights), 1.0)
    v_max = chamber_value_factor * sum(values)
    c = math.sqrt(v_max)  # chamber side
    wing_h = h / 4.0
    wing_len = [v / (2.0 * wing_h) for v in values]
    if c + 2.0 * max(wing_len) + delta >= l0 / 2.0:
        raise WatchrouteError("station spacing too small for chambers and wings")
    # oscillation slack must stay below the integral decision margin
    amp = d_n + h + max(weights) / 2.0 + wing_h
    osc_bound = 2.0 * m * amp * amp / l0
    if osc_bound > 0.4:
        raise WatchrouteError("increase l0_factor: oscillation slack too large")

    x0 = c / 2.0 + 1.0
    stations = [x0 + k * l0 for k in range(m + 1)]
    shafts = [x0 + (i + 0.5) * l0 for i in range(m)]
    W = stations[-1] + c / 2.0 + 1.0

    pts: list[Point] = [(0.0, 0.0)]
    # bottom wall, left to right, dipping into each station chamber
    for xk in stations:
        pts.append((xk - delta / 2.0, 0.0))
        pts.append((xk - delta / 2.0, -d_n))
        pts.append((xk - c / 2.0, -d_n))
        pts.append((xk - c / 2.0, -d_n - c))
        pts.append((xk + c / 2.0, -d_n - c))
        pts.append((xk + c / 2.0, -d_n))
        pts.append((xk + delta / 2.0, -d_n))
        pts.append((xk + delta / 2.0, 0.0))
    pts.append((W, 0.0))
    pts.append((W, h))
    # top wall, right to left, climbing each shaft to its roof
    for i in range(m - 1, -1, -1):
        xs = shafts[i]
        H = weights[i] / 2.0
        y_top = h + H
        wl = wing_len[i]
        pts.append((xs + delta / 2.0, h))
        pts.append((xs + delta / 2.0, y_top))
        pts.append((xs + delta / 2.0 + wl, y_top))
        pts.append((xs + delta / 2.0 + wl, y_top + wing_h))
        pts.append((xs - delta / 2.0 - wl, y_top + wing_h))
        pts.append((xs - delta / 2.0 - wl, y_top))
        pts.append((xs - delta / 2.0, y_top))
        pts.append((xs - delta / 2.0, h))
    pts.append((0.0, h))
    poly = SimplePolygon(pts, validate=False)

    depot = (stations[0] - delta / 2.0, 0.0)
    candidates: list[Point] = [depot]
    for xk in stations:
        candidates.append((xk, -d_n))
        candidates.append((xk - delta / 2.0, 0.0))
        candidates.append((xk + delta / 2.0, 0.0))
    shaft_tops = []
    for i, xs in enumerate(shafts):
        H = weights[i] / 2.0
        candidates.append((xs - delta / 2.0, h))
        candidates.append((xs + delta / 2.0, h))
        top = (xs, h + H)
        candidates.append(top)
        shaft_tops.append(top)
    candidates.append((W, 0.0))
    candidates.append((W, h))

    total_wings = 2.0 * sum(wl * wing_h for wl in wing_len)
    quota = poly.area - float(sum(values)) + float(value_quota)
    base = 2.0 * (stations[-1] - depot[0]) + 2.0 * (m + 1) * d_n
    return GadgetLayout(polygon=poly, depot=depot, quota=quota,
                        base_length=base, candidates=candidates,
                        shaft_tops=shaft_tops, weights=list(map(float, weights)),
                        values=list(map(float, values)),
                        value_quota=float(value_quota),
                        meta={"delta": delta, "l0": l0, "chamber_area": v_max,
                              "total_wings": total_wings, "osc_bound": osc_bound,
                              "corridor_height": h, "neck_depth": d_n})


def gadget_instance_doc(layout: GadgetLayout, problem: str = "fptas",
                        eps: float = 0.25, eps2: float = 0.25,
                        knapsack_budget: float | None = None,
                        seed: int = 0) -> InstanceDoc:
    """Instance document for a gadget layout; `bwrp` uses the same geometry
    with the traversal-plus-knapsack budget."""
    if problem == "qwrp":
        params = {"quota": layout.quota, "eps1": eps, "eps2": eps2}
    elif problem == "fptas":
        params = {"quota": layout.quota, "eps": eps}
    elif problem == "bwrp":
        if knapsack_budget is None:
            knapsack_budget = sum(layout.weights)
        params = {"budget": layout.budget_for(knapsack_budget), "eps": eps}
    else:
        raise WatchrouteError(f"gadget does not support problem {problem!r}")
    doc = InstanceDoc.from_domain(layout.polygon, problem, params,
                                  depot=layout.depot,
                                  candidates=layout.candidates, seed=seed)
    # narrow shafts sit far below the default relative tolerances
    doc.tolerance = {"tau": 1e-12, "tau_area": 1e-12, "tau_len": 1e-12}
    return doc


def selected_detours(layout: GadgetLayout, tour_vertices: list[Point]) -> frozenset[int]:
    """Which item shafts a tour climbs: item i counts as selected when a
    tour vertex reaches the upper half of its shaft."""
    chosen = set()
    h = layout.meta.get("corridor_height", 1.0)
    for i, top in enumerate(layout.shaft_tops):
        H = layout.weights[i] / 2.0
        for v in tour_vertices:
            if abs(v[0] - top[0]) <= 1.0 and v[1] >= h + 0.5 * H:
                chosen.add(i)
                break
    return frozenset(chosen)
