"""Command-line interface: solve, verify, gen, render, bench.

Exit codes: 0 ok, 1 infeasible/verification failure, 2 invalid input,
3 resource cap exceeded.  Every flag has a WATCHROUTE_* environment override.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .errors import (CandidateCapExceeded, CapExceeded, InfeasibleQuota,
                     QuotaExceedsLines, WatchrouteError)
from .instances import InstanceDoc, ResultDoc, verify_result

ENV_PREFIX = "WATCHROUTE_"

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_INVALID = 2
EXIT_RESOURCE = 3


def _env_default(name: str, fallback=None, cast=str):
    raw = os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"))
    if raw is None:
        return fallback
    return cast(raw)


def solve_instance(doc: InstanceDoc, *, candidate_cap: int | None = None,
                   beta: int | None = None) -> ResultDoc:
    """Dispatch an instance document to its solver and wrap the result."""
    from .discretize import explicit_candidates
    from .simple_dp import (BudgetParams, QuotaParams, solve_bwrp,
                            solve_qwrp_dual, solve_qwrp_fptas)

    tol = doc.tol()
    params = doc.params
    if doc.kind == "lines":
        from .lines import solve_lines_bwrp, solve_lines_qwrp

        arr, graph = doc.domain()
        if doc.problem == "qwrp":
            tour = solve_lines_qwrp(arr, graph, int(params["quota"]))
            seen = tour.metadata["lines_seen"]
        elif doc.problem == "bwrp":
            tour = solve_lines_bwrp(arr, graph, float(params["budget"]))
            seen = tour.metadata["lines_seen_max"]
        else:
            raise WatchrouteError(f"problem {doc.problem} unsupported on line arrangements")
        return ResultDoc.from_tour(tour, "lines", float(seen))

    domain = doc.domain()
    depot = doc.depot
    if depot is None and doc.problem in ("qwrp", "bwrp", "fptas"):
        from .simple_dp import solve_floating

        if doc.problem in ("qwrp", "fptas"):
            p = QuotaParams(float(params["quota"]), float(params.get("eps1", params.get("eps", 0.25))),
                            float(params.get("eps2", 0.25)))
        else:
            p = BudgetParams(float(params["budget"]), float(params.get("eps", 0.25)))
        tour = solve_floating(domain, p, candidate_points=doc.candidates, tol=tol)
        vr = tour.seen or tour.measure_seen(domain, tol)
        return ResultDoc.from_tour(tour, "area", vr.region.area)

    cands = None
    if doc.candidates:
        cands = explicit_candidates(domain, depot, doc.candidates, tol)

    kw = {}
    if candidate_cap is not None:
        kw["candidate_cap"] = candidate_cap

    if doc.kind == "holes" and doc.problem == "bwrp":
        from .holes import solve_bwrp_holes

        tour = solve_bwrp_holes(domain, depot, float(params["budget"]),
                                float(params.get("eps", 0.25)),
                                beta=beta or int(params.get("beta", 2)),
                                candidate_points=doc.candidates, tol=tol)
        return ResultDoc.from_tour(tour, "area", tour.metadata["measured_weight"])
    if doc.kind == "holes":
        raise WatchrouteError("only the budgeted problem is supported with holes")

    if doc.kind == "measure":
        from .measure import (MeasureOracle, density_from_doc,
                              solve_max_detection, solve_min_time_detection)

        dd = doc.geometry.get("density_doc")
        mu = density_from_doc(dd) if dd else MeasureOracle.uniform(domain)
        speed = float(params.get("speed", 1.0))
        if doc.problem == "min-time":
            tour, t = solve_min_time_detection(
                domain, depot, mu, float(params["probability"]),
                float(params.get("eps1", 0.25)), float(params.get("eps2", 0.25)),
                speed, candidates=cands, tol=tol, **kw)
            return ResultDoc.from_tour(tour, "probability",
                                       float(tour.metadata["measured_weight"]),
                                       {"time": t})
        if doc.problem == "max-detect":
            tour, prob = solve_max_detection(
                domain, depot, mu, float(params["time"]),
                float(params.get("eps", 0.25)), speed, candidates=cands, tol=tol, **kw)
            return ResultDoc.from_tour(tour, "probability", prob,
                                       {"time_budget": params["time"]})
        raise WatchrouteError(f"problem {doc.problem} needs kind 'measure'")

    if doc.problem == "qwrp":
        tour = solve_qwrp_dual(domain, depot,
                               QuotaParams(float(params["quota"]),
                                           float(params.get("eps1", 0.25)),
                                           float(params.get("eps2", 0.25))),
                               candidates=cands, tol=tol, **kw)
    elif doc.problem == "fptas":
        tour = solve_qwrp_fptas(domain, depot, float(params["quota"]),
                                float(params.get("eps", 0.25)),
                                candidates=cands, tol=tol, **kw)
    elif doc.problem == "bwrp":
        tour = solve_bwrp(domain, depot,
                          BudgetParams(float(params["budget"]),
                                       float(params.get("eps", 0.25))),
                          candidates=cands, tol=tol, **kw)
    else:
        raise WatchrouteError(f"unsupported problem {doc.problem} for kind {doc.kind}")
    return ResultDoc.from_tour(tour, "area", float(tour.metadata["measured_weight"]))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_solve(args) -> int:
    doc = InstanceDoc.load(args.instance)
    if args.problem:
        doc.problem = args.problem
    if args.quota is not None:
        doc.params["quota"] = args.quota
    if args.budget is not None:
        doc.params["budget"] = args.budget
    for name in ("eps", "eps1", "eps2"):
        v = getattr(args, name)
        if v is not None:
            doc.params[name] = v
    result = solve_instance(doc, candidate_cap=args.candidate_cap, beta=args.beta)
    out = args.out or (args.instance + ".result.json")
    result.save(out)
    print(f"solved: length={result.length:.9g} seen={result.seen_value:.9g} -> {out}")
    if args.svg:
        from .render import render_svg

        with open(args.svg, "w", encoding="utf-8") as f:
            f.write(render_svg(doc, result))
        print(f"rendered -> {args.svg}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    doc = InstanceDoc.load(args.instance)
    result = ResultDoc.load(args.result)
    problems = verify_result(doc, result)
    if problems:
        for p in problems:
            print(f"MISMATCH: {p}", file=sys.stderr)
        return EXIT_INFEASIBLE
    print("verified: all claims reproduce")
    return EXIT_OK


def _cmd_gen(args) -> int:
    seed = args.seed
    if args.kind == "gadget":
        from .gadgets import gadget_instance_doc, gen_gadget_qwrp

        weights = [int(w) for w in args.weights.split(",")]
        values = [int(v) for v in args.values.split(",")]
        lay = gen_gadget_qwrp(weights, values, args.quota or sum(values) // 2)
        doc = gadget_instance_doc(lay, problem=args.problem or "qwrp", seed=seed)
    elif args.kind == "random-simple":
        from .generators import random_simple_polygon, random_boundary_point

        poly = random_simple_polygon(args.n or 12, seed)
        depot = random_boundary_point(poly, seed + 1)
        doc = InstanceDoc.from_domain(poly, args.problem or "bwrp",
                                      {"budget": args.budget or poly.perimeter() / 4,
                                       "eps": args.eps or 0.5},
                                      depot=depot, seed=seed)
    elif args.kind == "lines":
        from .generators import random_arrangement

        lines = random_arrangement(args.n or 5, seed)
        doc = InstanceDoc(kind="lines", geometry={"lines": [list(l) for l in lines]},
                          problem=args.problem or "qwrp",
                          params={"quota": args.quota or (args.n or 5)}, seed=seed)
    else:
        print(f"unknown generator kind {args.kind}", file=sys.stderr)
        return EXIT_INVALID
    doc.save(args.out)
    print(f"generated -> {args.out}")
    return EXIT_OK


def _cmd_render(args) -> int:
    from .render import render_svg

    doc = InstanceDoc.load(args.instance)
    result = ResultDoc.load(args.result) if args.result else None
    svg = render_svg(doc, result, show_candidates=args.candidates)
    with open(args.out, "w", encoding="utf-8") as f:
        f.write(svg)
    print(f"rendered -> {args.out}")
    return EXIT_OK


def _bench_one(path: str) -> dict:
    doc = InstanceDoc.load(path)
    t0 = time.perf_counter()
    try:
        res = solve_instance(doc)
        ok = True
        length = res.length
        seen = res.seen_value
    except WatchrouteError as e:
        ok = False
        length = seen = float("nan")
    return {"instance": path, "ok": ok, "length": length, "seen": seen,
            "seconds": time.perf_counter() - t0}


def _cmd_bench(args) -> int:
    rows = []
    if args.threads > 1:
        import multiprocessing as mp

        with mp.Pool(args.threads) as pool:
            rows = pool.map(_bench_one, args.instances)
    else:
        rows = [_bench_one(p) for p in args.instances]
    table = {"schema_version": 1, "rows": rows}
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            json.dump(table, f, indent=1)
    for r in rows:
        print(f"{r['instance']}: ok={r['ok']} length={r['length']:.6g} "
              f"seen={r['seen']:.6g} {r['seconds']:.3f}s")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="watchroute",
                                 description="visibility route optimization in polygonal domains")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="solve an instance file")
    sp.add_argument("--instance", required=True, default=_env_default("instance"))
    sp.add_argument("--problem", default=_env_default("problem"))
    sp.add_argument("--quota", type=float, default=_env_default("quota", cast=float))
    sp.add_argument("--budget", type=float, default=_env_default("budget", cast=float))
    sp.add_argument("--eps", type=float, default=_env_default("eps", cast=float))
    sp.add_argument("--eps1", type=float, default=_env_default("eps1", cast=float))
    sp.add_argument("--eps2", type=float, default=_env_default("eps2", cast=float))
    sp.add_argument("--beta", type=int, default=_env_default("beta", cast=int))
    sp.add_argument("--seed", type=int, default=_env_default("seed", 0, int))
    sp.add_argument("--candidate-cap", type=int,
                    default=_env_default("candidate_cap", cast=int))
    sp.add_argument("--out", default=_env_default("out"))
    sp.add_argument("--svg", default=_env_default("svg"))
    sp.set_defaults(func=_cmd_solve)

    vp = sub.add_parser("verify", help="re-verify a result against its instance")
    vp.add_argument("--instance", required=True)
    vp.add_argument("--result", required=True)
    vp.set_defaults(func=_cmd_verify)

    gp = sub.add_parser("gen", help="generate instances")
    gp.add_argument("--kind", required=True,
                    choices=["gadget", "random-simple", "lines"])
    gp.add_argument("--out", required=True)
    gp.add_argument("--seed", type=int, default=_env_default("seed", 0, int))
    gp.add_argument("--n", type=int)
    gp.add_argument("--problem")
    gp.add_argument("--quota", type=float)
    gp.add_argument("--budget", type=float)
    gp.add_argument("--eps", type=float)
    gp.add_argument("--weights", default="2,3")
    gp.add_argument("--values", default="3,2")
    gp.set_defaults(func=_cmd_gen)

    rp = sub.add_parser("render", help="render instance (and result) to svg")
    rp.add_argument("--instance", required=True)
    rp.add_argument("--result")
    rp.add_argument("--out", required=True)
    rp.add_argument("--candidates", action="store_true")
    rp.set_defaults(func=_cmd_render)

    bp = sub.add_parser("bench", help="time a batch of instance files")
    bp.add_argument("instances", nargs="+")
    bp.add_argument("--threads", type=int, default=_env_default("threads", 1, int))
    bp.add_argument("--out")
    bp.set_defaults(func=_cmd_bench)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (InfeasibleQuota, QuotaExceedsLines) as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (CandidateCapExceeded, CapExceeded) as e:
        print(f"resource cap: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except (WatchrouteError, FileNotFoundError, KeyError, ValueError, json.JSONDecodeError) as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
