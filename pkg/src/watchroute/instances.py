"""Instance and result documents: schema, bit-stable serialization, and
independent re-verification of solver claims.

Coordinates are serialized as decimal strings with 17 significant digits so
that save/load round-trips are bit-identical at double precision.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

from .config import DEFAULT_TOL, ToleranceConfig
from .errors import WatchrouteError
from .geom import Domain, Point, PolygonWithHoles, SimplePolygon, seg_len
from .tour import Tour

SCHEMA_VERSION = 1
SOLVER_VERSION = "0.1.0"

PROBLEMS = ("qwrp", "bwrp", "fptas", "min-time", "max-detect")
KINDS = ("simple", "holes", "lines", "measure")


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _fmt_pt(p) -> list[str]:
    return [_fmt(p[0]), _fmt(p[1])]


def _parse_pt(p) -> Point:
    return (float(p[0]), float(p[1]))


@dataclass
class InstanceDoc:
    kind: str
    geometry: dict
    problem: str
    params: dict
    depot: Point | None = None
    candidates: list[Point] | None = None
    seed: int = 0
    tolerance: dict | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise WatchrouteError(f"unknown kind {self.kind!r}")
        if self.problem not in PROBLEMS:
            raise WatchrouteError(f"unknown problem {self.problem!r}")

    # -- construction ---------------------------------------------------

    @classmethod
    def from_domain(cls, domain: Domain, problem: str, params: dict,
                    depot: Point | None = None,
                    candidates: list[Point] | None = None,
                    seed: int = 0) -> "InstanceDoc":
        if isinstance(domain, PolygonWithHoles):
            geometry = {"outer": [list(v) for v in domain.outer.vertices],
                        "holes": [[list(v) for v in h.vertices] for h in domain.holes]}
            kind = "holes"
        else:
            geometry = {"vertices": [list(v) for v in domain.vertices]}
            kind = "simple"
        return cls(kind=kind, geometry=geometry, problem=problem, params=params,
                   depot=depot, candidates=candidates, seed=seed)

    def tol(self) -> ToleranceConfig:
        if not self.tolerance:
            return DEFAULT_TOL
        return ToleranceConfig(tau=float(self.tolerance.get("tau", DEFAULT_TOL.tau)),
                               tau_area=float(self.tolerance.get("tau_area", DEFAULT_TOL.tau_area)),
                               tau_len=float(self.tolerance.get("tau_len", DEFAULT_TOL.tau_len)))

    def domain(self):
        """Geometry payload as a validated domain object (polygon kinds) or
        (arrangement, graph) for line instances."""
        tol = self.tol()
        if self.kind in ("simple", "measure"):
            return SimplePolygon([_parse_pt(p) for p in self.geometry["vertices"]], tol=tol)
        if self.kind == "holes":
            outer = SimplePolygon([_parse_pt(p) for p in self.geometry["outer"]], tol=tol)
            holes = [SimplePolygon([_parse_pt(p) for p in h], tol=tol)
                     for h in self.geometry.get("holes", [])]
            return PolygonWithHoles(outer, holes)
        if self.kind == "lines":
            from .lines import build_arrangement

            lines = [(float(a), float(b), float(c)) for a, b, c in self.geometry["lines"]]
            bbox = self.geometry.get("bbox")
            bbox = tuple(float(v) for v in bbox) if bbox else None
            return build_arrangement(lines, bbox, tol)
        raise WatchrouteError(f"unhandled kind {self.kind}")

    # -- serialization ----------------------------------------------------

    def to_json_dict(self) -> dict:
        geom: dict[str, Any] = {}
        if self.kind in ("simple", "measure"):
            geom["vertices"] = [_fmt_pt(p) for p in self.geometry["vertices"]]
        elif self.kind == "holes":
            geom["outer"] = [_fmt_pt(p) for p in self.geometry["outer"]]
            geom["holes"] = [[_fmt_pt(p) for p in h] for h in self.geometry.get("holes", [])]
        elif self.kind == "lines":
            geom["lines"] = [[_fmt(a), _fmt(b), _fmt(c)] for a, b, c in self.geometry["lines"]]
            if self.geometry.get("bbox"):
                geom["bbox"] = [_fmt(v) for v in self.geometry["bbox"]]
        if self.kind == "measure" and "density_doc" in self.geometry:
            geom["density_doc"] = self.geometry["density_doc"]
        doc = {
            "schema_version": SCHEMA_VERSION,
            "kind": self.kind,
            "geometry": geom,
            "depot": _fmt_pt(self.depot) if self.depot is not None else None,
            "problem": self.problem,
            "params": {k: (_fmt(v) if isinstance(v, float) else v)
                       for k, v in self.params.items()},
            "seed": self.seed,
        }
        if self.candidates is not None:
            doc["candidates"] = [_fmt_pt(p) for p in self.candidates]
        if self.tolerance:
            doc["tolerance"] = {k: _fmt(v) for k, v in self.tolerance.items()}
        return doc

    @classmethod
    def from_json_dict(cls, doc: dict) -> "InstanceDoc":
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise WatchrouteError(f"unsupported schema version {doc.get('schema_version')}")
        kind = doc["kind"]
        geom_in = doc["geometry"]
        geometry: dict[str, Any] = {}
        if kind in ("simple", "measure"):
            geometry["vertices"] = [[p[0], p[1]] for p in geom_in["vertices"]]
        elif kind == "holes":
            geometry["outer"] = [[p[0], p[1]] for p in geom_in["outer"]]
            geometry["holes"] = [[[p[0], p[1]] for p in h] for h in geom_in.get("holes", [])]
        elif kind == "lines":
            geometry["lines"] = [[v[0], v[1], v[2]] for v in geom_in["lines"]]
            if geom_in.get("bbox"):
                geometry["bbox"] = list(geom_in["bbox"])
        if kind == "measure" and "density_doc" in geom_in:
            geometry["density_doc"] = geom_in["density_doc"]
        params = {k: (float(v) if isinstance(v, str) else v)
                  for k, v in doc["params"].items()}
        cands = doc.get("candidates")
        tolerance = doc.get("tolerance")
        return cls(kind=kind, geometry=geometry, problem=doc["problem"], params=params,
                   depot=_parse_pt(doc["depot"]) if doc.get("depot") else None,
                   candidates=[_parse_pt(p) for p in cands] if cands else None,
                   seed=int(doc.get("seed", 0)),
                   tolerance={k: float(v) for k, v in tolerance.items()} if tolerance else None)

    def save(self, path: str):
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_json_dict(), f, indent=1, sort_keys=True)
            f.write("\n")

    @classmethod
    def load(cls, path: str) -> "InstanceDoc":
        with open(path, encoding="utf-8") as f:
            return cls.from_json_dict(json.load(f))


@dataclass
class ResultDoc:
    tour: list[Point]
    length: float
    seen_value: float
    seen_kind: str  # "area" | "probability" | "lines"
    guarantees: dict = field(default_factory=dict)
    wall_clock_s: float = 0.0
    solver_version: str = SOLVER_VERSION

    @classmethod
    def from_tour(cls, tour: Tour, seen_kind: str, seen_value: float,
                  guarantees: dict | None = None) -> "ResultDoc":
        g = dict(guarantees or {})
        wall = float(tour.metadata.get("wall_clock_s", 0.0))
        for key in ("eps", "eps1", "eps2", "n_iterations", "rounding_residue",
                    "coarsen_factor", "effective_eps", "effective_eps1",
                    "floating_heuristic", "k", "depth", "beta", "guarantee_factor",
                    "buckets", "candidates", "quota", "budget", "lines_seen_max"):
            if key in tour.metadata:
                g[key] = tour.metadata[key]
        return cls(tour=list(tour.vertices), length=tour.length,
                   seen_value=seen_value, seen_kind=seen_kind, guarantees=g,
                   wall_clock_s=wall)

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "tour": [_fmt_pt(p) for p in self.tour],
            "length": _fmt(self.length),
            "seen_value": _fmt(self.seen_value),
            "seen_kind": self.seen_kind,
            "guarantees": _jsonable(self.guarantees),
            "wall_clock_s": self.wall_clock_s,
            "solver_version": self.solver_version,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "ResultDoc":
        return cls(tour=[_parse_pt(p) for p in doc["tour"]],
                   length=float(doc["length"]),
                   seen_value=float(doc["seen_value"]),
                   seen_kind=doc["seen_kind"],
                   guarantees=doc.get("guarantees", {}),
                   wall_clock_s=float(doc.get("wall_clock_s", 0.0)),
                   solver_version=doc.get("solver_version", "unknown"))

    def save(self, path: str):
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_json_dict(), f, indent=1, sort_keys=True)
            f.write("\n")

    @classmethod
    def load(cls, path: str) -> "ResultDoc":
        with open(path, encoding="utf-8") as f:
            return cls.from_json_dict(json.load(f))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float):
        return _fmt(obj)
    if isinstance(obj, (int, str, bool)) or obj is None:
        return obj
    return str(obj)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

def verify_result(instance: InstanceDoc, result: ResultDoc,
                  rel_tol: float = 1e-6) -> list[str]:
    """Recompute every claim of a result document; returns mismatch strings
    (empty means the result verifies)."""
    problems: list[str] = []
    tol = instance.tol()
    if instance.kind == "lines":
        arr, graph = instance.domain()
        verts = result.tour
        n_len = 0.0
        for a, b in zip(verts, verts[1:] + verts[:1]):
            n_len += seg_len(a, b)
        if len(verts) == 1:
            n_len = 0.0
        if abs(n_len - result.length) > rel_tol * max(1.0, result.length) + tol.abs_len(arr.scale):
            problems.append(f"length mismatch: doc {result.length} vs recomputed {n_len}")
        seen = 0
        tol_abs = tol.abs_coord(arr.scale)
        for a, b, c in arr.lines:
            touched = False
            for u, v in zip(verts, verts[1:] + verts[:1]):
                s_u = a * u[0] + b * u[1] - c
                s_v = a * v[0] + b * v[1] - c
                if s_u * s_v <= tol_abs or abs(s_u) <= tol_abs or abs(s_v) <= tol_abs:
                    touched = True
                    break
            seen += int(touched)
        if seen + 1e-9 < result.seen_value:
            problems.append(f"lines seen mismatch: doc {result.seen_value} vs recomputed {seen}")
        return problems

    domain = instance.domain()
    tour = Tour(result.tour)
    if abs(tour.length - result.length) > rel_tol * max(1.0, result.length) + tol.abs_len(domain.scale):
        problems.append(f"length mismatch: doc {result.length} vs recomputed {tour.length}")
    vr = tour.measure_seen(domain, tol)
    if result.seen_kind == "probability":
        from .measure import MeasureOracle, density_from_doc

        dd = instance.geometry.get("density_doc")
        mu = density_from_doc(dd) if dd else MeasureOracle.uniform(domain)
        value = mu.measure(vr.region)
    else:
        value = vr.region.area
    slack = rel_tol * max(1.0, abs(result.seen_value)) + tol.abs_area(domain.scale)
    if value + slack < result.seen_value:
        problems.append(f"seen value mismatch: doc {result.seen_value} vs recomputed {value}")
    return problems
