"""rotolab command line.

    rotolab rotation --map twist --band 0 1 --n 1000
    rotolab entropy --map twist --n 1024
    rotolab pipeline --config configs/pipeline.toml --out report.json --svg attractor.svg

Exit status: 0 when every clause holds, 2 when a clause fails, 1 on errors.
Reports are deterministic for a given config and seed except for the
"metadata" block (start time, wall-clock seconds, versions).
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import os
import platform
import sys
import time
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .config import MAP_FAMILIES, VERBS, RunConfig, load, validate
from .errors import ConfigError, RotolabError

EXIT_OK, EXIT_ERROR, EXIT_CLAUSE = 0, 1, 2

DEFAULT_FAMILY = {"horseshoe": "synthetic", "chains": "f2"}


def _jsonable(obj):
    """Plain-JSON view of reports: numpy scalars and arrays, tuples, dataclass dicts."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    return obj


def dumps(report: dict) -> str:
    return json.dumps(_jsonable(report), indent=2, sort_keys=True)


# maps ------------------------------------------------------------------------------

def pipeline_params(cfg: RunConfig):
    from .theorem_b import PipelineParams, dissipative_params
    over = dict(cfg["pipeline"]["params"])
    over.setdefault("seed", cfg.seed)
    if cfg["pipeline"]["variant"] == "D":
        return dissipative_params(**over)
    return PipelineParams(**over)


def build_map(cfg: RunConfig, family: str):
    """The lift named by ``family`` with the parameters of the [map] section."""
    from .maps import (BoundaryParams, Strip, boundary_morse_smale, compose, connector_shear,
                       integrable_twist)
    m = cfg["map"]
    if family == "twist":
        return integrable_twist()
    if family == "boundary":
        slope = 0.03 if m["slope"] is None else m["slope"]
        return boundary_morse_smale(BoundaryParams(slope0=slope, slope1=slope, width=m["width"],
                                                   exterior_rate=m["exterior_rate"]))
    if family == "standard":
        F = compose(integrable_twist(), connector_shear([Strip(*row) for row in m["strips"]]))
        F.label = "kicked-twist"
        return F
    if family == "synthetic":
        from .horseshoe import synthetic_horseshoe
        return synthetic_horseshoe(m["contraction"])
    from .theorem_b import build_dissipative, build_f1, build_f2, build_final
    params = pipeline_params(cfg)
    f1, _ = build_f1(params)
    if family == "f1":
        return f1
    f2, _ = build_f2(f1, params)
    if family == "f2":
        return f2
    if family == "f":
        return build_final(f2, params)[0]
    if family == "dissipative":
        return build_dissipative(f2, m["n"], params)[0]
    raise ConfigError(f"map.family: unknown family '{family}'")


def _trap_rows(cfg: RunConfig):
    lo, hi = cfg.band
    t0, t1 = cfg["attractor"]["trap"]
    if not lo <= t0 < t1 <= hi:
        raise ConfigError(f"attractor.trap [{t0}, {t1}] must lie inside band [{lo}, {hi}]")
    return t0, t1


def _region(cfg: RunConfig, F, depth: int, on_attractor: bool):
    from .attractor import attractor_approx
    from .cover import Band
    from .grid import GridSet
    lo, hi = cfg.band
    if not on_attractor:
        return GridSet.full(Band(lo, hi), depth)
    a = cfg["attractor"]
    A = GridSet.horizontal_band(Band(lo, hi), a["depth_start"], *_trap_rows(cfg))
    return attractor_approx(F, A, depth, box_cap=a["max_boxes"], lipschitz_margin=a["lipschitz_margin"])


# verbs -----------------------------------------------------------------------------

def cmd_rotation(cfg: RunConfig, F):
    from .cover import AnnulusPoint
    from .rotation import find_periodic, rotation_interval
    r = cfg["rotation"]
    K = _region(cfg, F, r["depth"], r["on_attractor"])
    rot = rotation_interval(F, K, r["n"], r["samples"], cfg.seed, r["tol"], check_band=r["check_band"])
    result = {"interval": rot.to_dict(), "region_boxes": len(K)}
    clauses = {"stabilized": rot.stabilized}
    if r["witnesses"]:
        lo, hi = cfg.band
        seeds = [AnnulusPoint(a, b) for a in np.linspace(0, 1, 12, endpoint=False)
                 for b in np.linspace(lo, hi, 12)]
        found = {}
        for p, q in r["witnesses"]:
            w = find_periodic(F, int(p), int(q), seeds)
            found[f"{int(p)}/{int(q)}"] = w.to_dict() if w is not None else None
            clauses[f"witness_{int(p)}/{int(q)}"] = w is not None
        result["witnesses"] = found
    return result, clauses, K


def cmd_attractor(cfg: RunConfig, F):
    from .attractor import AttractorTrace, analyze_complement, attractor_approx, check_trap
    from .cover import Band
    from .grid import GridSet
    a = cfg["attractor"]
    A = GridSet.horizontal_band(Band(*cfg.band), a["depth_start"], *_trap_rows(cfg))
    trap = check_trap(F, A, a["lipschitz_margin"])
    result = {"trap": trap}
    clauses = {"trap": trap}
    if not trap:
        return result, clauses, A
    trace = AttractorTrace()
    S = attractor_approx(F, A, a["depth"], box_cap=a["max_boxes"], lipschitz_margin=a["lipschitz_margin"],
                         trace=trace)
    comp = analyze_complement(S)
    result.update({"depth": S.depth, "boxes": len(S), "area": S.area, "y_extent": list(S.y_extent() or []),
                   "trace": trace.__dict__, "complement": comp.summary()})
    clauses["essential"] = comp.essential
    return result, clauses, S


def cmd_entropy(cfg: RunConfig, F):
    from .entropy import bracket
    e = cfg["entropy"]
    K = _region(cfg, F, e["depth"], e["on_attractor"])
    est = (e["separated_n"], e["separated_eps"]) if e["separated_n"] and e["separated_eps"] else None
    b = bracket(F, K, None, e["n"], max_samples=e["samples"], estimator=est, seed=cfg.seed)
    return {"bracket": b.to_dict(), "region_boxes": len(K)}, {}, K


def cmd_horseshoe(cfg: RunConfig, F):
    from .horseshoe import (adapted_rectangle, markov_cross_check, robustness_probe, synthetic_setup,
                            verify_itineraries)
    h = cfg["horseshoe"]
    if h["model"] == "stable":
        from .theorem_b import stable_set_horseshoe
        params = pipeline_params(cfg)
        params.n_max = h["n_max"]
        params.horseshoe_depth = h["depth"]
        cert, info = stable_set_horseshoe(F, params)
        return {"certificate": cert.to_dict() if cert else None, "search": info}, \
            {"certificate": cert is not None}, None
    A, D0, D1 = synthetic_setup(h["depth"])
    R = adapted_rectangle(D0, D1, A)
    cert = markov_cross_check(F, R, h["n"], h["j"])
    result = {"certificate": cert.to_dict() if cert else None,
              "rectangle": {"x": list(R.x_hull()), "y": list(R.y_hull()), "kappa": R.kappa}}
    clauses = {"certificate": cert is not None}
    if cert is not None:
        it = verify_itineraries(F, R, cert, h["itinerary_depth"], h["samples"], h["check"], cfg.seed)
        result["itineraries"] = it
        clauses["all_cylinders"] = it["cylinders_found"] == it["cylinders_expected"]
        clauses["displacement_bound"] = it["bound_violations"] == 0
        if h["robustness"]:
            result["robustness"] = robustness_probe(F, R, h["n"], h["j"], h["eta_max"])
    return result, clauses, R.cells


def chain_pairs(F, K, domain_band, count: int, steps: int, candidates: int, seed: int):
    """Random z whose forward orbit and w whose backward orbit enter K."""
    from .horseshoe import first_entry
    rng = np.random.default_rng(seed)
    lo, hi = domain_band
    x, y = rng.random(candidates), lo + (hi - lo) * rng.random(candidates)
    fz = first_entry(F, x, y, K, steps)
    x2, y2 = rng.random(candidates), lo + (hi - lo) * rng.random(candidates)
    bw = first_entry(F, x2, y2, K, steps, backward=True)
    zs = np.flatnonzero(fz > 0)[:count]
    ws = np.flatnonzero(bw > 0)[:count]
    k = min(len(zs), len(ws))
    return [((float(x[a]), float(y[a])), (float(x2[b]), float(y2[b]))) for a, b in zip(zs[:k], ws[:k])]


def cmd_chains(cfg: RunConfig, F):
    from .cover import AnnulusPoint, Band
    from .grid import GridSet
    from .horseshoe import chain_graph, chain_reachable, chain_reachable_pairs
    c = cfg["chains"]
    band = Band(*cfg.band)
    domain = GridSet.full(band, c["depth"])
    D = GridSet.horizontal_band(band, c["depth"], *c["strip"])
    K = domain.like() if c["no_jump"] else D
    eps = domain.diagonal if c["eps"] is None else c["eps"]
    graph = chain_graph(F, domain, K, eps)
    want = c["expect"] == "reachable"
    result = {"eps": eps, "strip": c["strip"], "no_jump": c["no_jump"], "depth": c["depth"]}
    if c["z"] is not None and c["w"] is not None:
        ok = chain_reachable(F, AnnulusPoint(*c["z"]), AnnulusPoint(*c["w"]), K, eps, domain, graph,
                             c["steps"])
        result["pairs"] = [{"z": c["z"], "w": c["w"], "reachable": ok}]
        return result, {f"expected_{c['expect']}": ok == want}, D
    pairs = chain_pairs(F, D, cfg.band, c["pairs"], c["steps"], c["candidates"], cfg.seed)
    pts = [(AnnulusPoint(*z), AnnulusPoint(*w)) for z, w in pairs]
    found = chain_reachable_pairs(F, pts, K, eps, domain, graph, c["steps"])
    rows = [{"z": list(z), "w": list(w), "reachable": ok} for (z, w), ok in zip(pairs, found)]
    hits = sum(r["reachable"] for r in rows)
    result.update({"pairs": rows, "reachable": hits, "tested": len(rows), "requested": c["pairs"]})
    clauses = {"enough_pairs": len(rows) == c["pairs"],
               f"expected_{c['expect']}": hits == (len(rows) if want else 0)}
    return result, clauses, D


def cmd_pipeline(cfg: RunConfig, F=None):
    from .theorem_b import run_dissipative, run_pipeline
    params = pipeline_params(cfg)
    rep = run_dissipative(params) if cfg["pipeline"]["variant"] == "D" else run_pipeline(params)
    d = rep.to_dict()
    timings = d.pop("timings", None)
    if d.get("attractor") and d["attractor"].get("trace"):
        d["attractor"]["trace"].pop("seconds", None)
    if rep.error:
        raise RotolabError(rep.error)
    return d, dict(rep.clauses), rep.attractor, timings


COMMANDS = {"rotation": cmd_rotation, "attractor": cmd_attractor, "entropy": cmd_entropy,
            "horseshoe": cmd_horseshoe, "chains": cmd_chains, "pipeline": cmd_pipeline}


# front end -------------------------------------------------------------------------

def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rotolab", description=__doc__.split("\n")[0],
                                formatter_class=argparse.RawDescriptionHelpFormatter,
                                epilog="Exit status: 0 all clauses hold, 2 a clause failed, 1 error.")
    p.add_argument("--version", action="version", version=f"rotolab {__version__}")
    sub = p.add_subparsers(dest="verb", metavar="VERB")
    helps = {"rotation": "rotation interval from Birkhoff averages (plus periodic witnesses)",
             "attractor": "trap check and set-oriented attractor cover",
             "horseshoe": "rotational horseshoe certificate and itinerary check",
             "entropy": "entropy upper bound from derivative norm growth",
             "chains": "eps-chain reachability with jumps restricted to a strip",
             "pipeline": "construct the low-entropy example and validate every clause"}
    for verb in VERBS:
        s = sub.add_parser(verb, help=helps[verb])
        s.add_argument("--config", help="TOML configuration file")
        s.add_argument("--map", choices=MAP_FAMILIES, help="map family (overrides map.family)")
        s.add_argument("--band", nargs=2, type=float, metavar=("LO", "HI"), help="height range")
        s.add_argument("--n", type=int, help="orbit length or iterate count of the verb")
        s.add_argument("--depth", type=int, help="grid depth of the verb")
        s.add_argument("--seed", type=int)
        s.add_argument("--out", help="JSON report path (default: stdout)")
        s.add_argument("--svg", help="SVG figure path")
        s.add_argument("--threads", type=int, help="upper bound on worker threads")
    return p


def resolve(args) -> RunConfig:
    """Config file (if any) with command-line overrides applied, validated again."""
    raw = {}
    if args.config:
        cfg = load(args.config)
        raw = cfg.to_dict()
        if cfg.command is not None and cfg.command != args.verb:
            raise ConfigError(f"config is for '{cfg.command}' but the verb is '{args.verb}'")
    raw = {k: v for k, v in raw.items() if v is not None}
    for k, v in list(raw.items()):
        if isinstance(v, dict):
            raw[k] = {a: b for a, b in v.items() if b is not None}
    raw["command"] = args.verb
    if args.map:
        raw.setdefault("map", {})["family"] = args.map
    if args.band:
        raw["band"] = list(args.band)
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.threads is not None:
        raw["threads"] = args.threads
    verb_n = {"rotation": ("rotation", "n"), "entropy": ("entropy", "n"), "horseshoe": ("horseshoe", "n")}
    verb_depth = {"rotation": ("rotation", "depth"), "entropy": ("entropy", "depth"),
                  "attractor": ("attractor", "depth"), "horseshoe": ("horseshoe", "depth"),
                  "chains": ("chains", "depth")}
    if args.n is not None:
        if args.verb not in verb_n:
            raise ConfigError(f"--n does not apply to '{args.verb}'")
        sec, key = verb_n[args.verb]
        raw.setdefault(sec, {})[key] = args.n
    if args.depth is not None:
        if args.verb == "pipeline":
            raw.setdefault("pipeline", {}).setdefault("params", {})["depth"] = args.depth
        else:
            sec, key = verb_depth[args.verb]
            raw.setdefault(sec, {})[key] = args.depth
    if args.out:
        raw.setdefault("output", {})["report"] = args.out
    if args.svg:
        raw.setdefault("output", {})["svg"] = args.svg
    return validate(raw, args.config)


def _relevant_config(cfg: RunConfig, verb: str, family: str) -> dict:
    """The sections that influenced this run."""
    full = cfg.to_dict()
    keep = {verb, "output"}
    if verb != "pipeline":
        keep.add("map")
    if family in ("f1", "f2", "f", "dissipative") or verb == "pipeline" or (
            verb == "horseshoe" and cfg["horseshoe"]["model"] == "stable"):
        keep.add("pipeline")
    if verb == "attractor" or cfg[verb].get("on_attractor"):
        keep.add("attractor")
    return {k: v for k, v in full.items() if not isinstance(v, dict) or k in keep}


def _limit_threads(n: int):
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ[var] = str(n)


def run(argv: Optional[list] = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    if args.verb is None:
        parser.print_help(sys.stderr)
        return EXIT_ERROR
    started = _dt.datetime.now(_dt.timezone.utc)
    t0 = time.perf_counter()
    try:
        cfg = resolve(args)
        _limit_threads(cfg[""]["threads"])
        family = cfg["map"]["family"] or DEFAULT_FAMILY.get(args.verb, "twist")
        F = None if args.verb == "pipeline" else build_map(cfg, family)
        out = COMMANDS[args.verb](cfg, F)
        result, clauses, figure = out[:3]
        timings = out[3] if len(out) > 3 else None
    except (RotolabError, ValueError) as exc:
        print(f"rotolab {args.verb}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    passed = all(clauses.values())
    report = {"command": args.verb, "map": None if args.verb == "pipeline" else family,
              "config": _relevant_config(cfg, args.verb, family), "result": result, "clauses": clauses, "pass": passed,
              "failed": [k for k, v in clauses.items() if not v]}
    meta = {"started": started.isoformat(), "seconds": time.perf_counter() - t0, "version": __version__,
            "python": platform.python_version(), "config_file": cfg.source}
    if timings:
        meta["stage_seconds"] = timings
    report["metadata"] = meta
    report_path = cfg["output"]["report"]
    text = dumps(report)
    if report_path:
        Path(report_path).write_text(text + "\n")
    else:
        print(text)
    svg = cfg["output"]["svg"]
    if svg:
        if figure is None:
            print(f"rotolab {args.verb}: no figure for this run; {svg} not written", file=sys.stderr)
        else:
            Path(svg).write_text(figure.to_svg() + "\n")
    if not passed:
        print(f"rotolab {args.verb}: failed clauses: {', '.join(report['failed'])}", file=sys.stderr)
        return EXIT_CLAUSE
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
