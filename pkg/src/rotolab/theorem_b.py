"""End-to-end construction and validation of low-entropy, large-rotation examples.

Stages: f1 (boundary dynamics and exterior dissipation), f2 = f1 o C (C the
connector kicks), f = b1 o b0 o f2 (bump pushes at z0 and z1), and the
dissipative variant g_n = h_n o f2.  Every stage verifies what it can at
desk scale and the pipeline reports a pass/fail ledger per clause.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .attractor import AttractorTrace, analyze_complement, attractor_approx, check_trap
from .cover import AnnulusPoint, Band
from .entropy import bracket
from .errors import ConstructionError, RotolabError
from .grid import GridSet
from .horseshoe import (adapted_rectangle, chain_reachable, classify_joining, search_certificate,
                        stable_continuum)
from .maps import (BoundaryParams, BumpProfile, LiftedMap, Strip, boundary_morse_smale, bump_push,
                   compose, compose_all, connector_shear, identity, integrable_twist, vertical_contraction)
from .smooth import bump
from .rotation import find_periodic, rotation_interval

# fixed split of the C1 budget between the three perturbation stages
SHARE_F1, SHARE_CONNECTOR, SHARE_BUMPS = 0.4, 0.4, 0.2

_MU_SLOPE = float(np.max(np.abs(bump(np.linspace(0.0, 1.0, 200001))[1])))


@dataclass
class PipelineParams:
    """Parameters of the construction and of its validation.

    ``boundary_slope`` and ``strips`` override the amounts derived from
    ``c1_budget`` when given; strips are (lo, hi, kick, phase, ramp) rows.
    """

    epsilon_target: float = 0.1
    delta_margin: float = 0.05
    c1_budget: float = 0.5
    bump_radius: float = 0.001
    strip_bounds: tuple = (0.2, 0.8)
    seed: int = 0
    depth_start: int = 4
    depth: int = 8
    n_max: int = 64
    band: tuple = (-3.0, 4.0)
    trap_band: tuple = (-1.0, 2.0)
    x0: float = 0.0
    p0: float = 0.5
    x1: float = 0.5
    p1: float = 0.0
    z0: float = 0.25
    z1: float = 0.75
    boundary_width: float = 0.3
    exterior_rate: float = 0.5
    exterior_ramp: float = 0.3
    boundary_slope: Optional[float] = None
    strips: Optional[list] = None
    rotation_n: int = 500
    rotation_samples: int = 4000
    rotation_tol: float = 0.02
    entropy_n: int = 512
    entropy_samples: int = 10000
    witness_tol: float = 1e-8
    wandering_horizon: int = 10000
    escape_steps: int = 1000
    horseshoe_search: bool = False
    horseshoe_depth: int = 7
    horseshoe_horizon: int = 200
    dissipative_n: int = 16
    max_boxes: int = 4_000_000

    def __post_init__(self):
        if not 0 < self.delta_margin < 0.5:
            raise ConstructionError("delta_margin must lie in (0, 1/2)")
        if self.c1_budget <= 0:
            raise ConstructionError("c1_budget must be positive")
        r1, r2 = self.strip_bounds
        if not 0 < r1 < r2 < 1 and self.strips is None:
            raise ConstructionError("strip bounds must satisfy 0 < r1 < r2 < 1")
        if self.depth < self.depth_start:
            raise ConstructionError("depth must be at least depth_start")

    @property
    def band_obj(self) -> Band:
        return Band(*self.band)

    def boundary(self) -> BoundaryParams:
        slope = self.boundary_slope
        if slope is None:
            # the C1 distance of f1 to the twist is linear in the slope to
            # first order; calibrate it once at a small reference slope
            ref = 0.01
            bp = BoundaryParams(self.x0, self.p0, self.x1, self.p1, ref, ref, self.boundary_width,
                                self.exterior_rate, self.exterior_ramp)
            per_slope = c1_distance(boundary_morse_smale(bp), integrable_twist()) / ref
            slope = min(0.15, SHARE_F1 * self.c1_budget / per_slope)
        return BoundaryParams(self.x0, self.p0, self.x1, self.p1, slope, slope, self.boundary_width,
                              self.exterior_rate, self.exterior_ramp)

    def connector_strips(self) -> list:
        if self.strips is not None:
            return [Strip(*row) for row in self.strips]
        r1, r2 = self.strip_bounds
        mid = 0.5 * (r1 + r2)
        gap = 0.04 * (r2 - r1)
        shape = [Strip(r1, mid - gap, 1.0, 0.0), Strip(mid + gap, r2, 1.0, 0.5)]
        # calibrate the C1 size per unit kick at a small reference kick
        ref = 0.01
        probe = connector_shear([Strip(s.lo, s.hi, ref, s.phase) for s in shape])
        kick = SHARE_CONNECTOR * self.c1_budget / (c1_distance(probe, identity()) / ref)
        return [Strip(s.lo, s.hi, kick, s.phase) for s in shape]

    def bump_amplitude(self) -> float:
        return SHARE_BUMPS * self.c1_budget * self.bump_radius / _MU_SLOPE

    def to_dict(self) -> dict:
        d = asdict(self)
        d["strip_bounds"] = list(self.strip_bounds)
        d["band"] = list(self.band)
        d["trap_band"] = list(self.trap_band)
        return d


# the dissipative variant needs kicks of order one across the whole band; a
# wide ramp keeps the twist condition alive
DISSIPATIVE_STRIPS = [[-0.8, 1.8, 0.28, 0.0, 0.4]]


def dissipative_params(**overrides) -> PipelineParams:
    """Defaults for g_n = h_n o f2: strong kicks, n = 16 and a 0.1 margin."""
    base = {"delta_margin": 0.1, "strips": [list(r) for r in DISSIPATIVE_STRIPS], "dissipative_n": 16}
    base.update(overrides)
    return PipelineParams(**base)


def c1_distance(F: LiftedMap, G: LiftedMap, lo: float = 0.0, hi: float = 1.0, samples: int = 4000,
                seed: int = 0) -> float:
    """Sampled C1 distance between two lifts on S^1 x [lo, hi]."""
    rng = np.random.default_rng(seed)
    x, y = rng.random(samples), lo + (hi - lo) * rng.random(samples)
    X1, Y1, J1 = F.step(x, y)
    X2, Y2, J2 = G.step(x, y)
    c0 = max(np.max(np.abs(X1 - X2)), np.max(np.abs(Y1 - Y2)))
    c1 = np.max(np.linalg.norm(J1 - J2, ord=2, axis=(-2, -1)))
    return float(max(c0, c1))


def _det(F: LiftedMap, x, y):
    return np.linalg.det(F.step(x, y)[2])


def _band_samples(lo, hi, count, seed):
    rng = np.random.default_rng(seed)
    return rng.random(count), lo + (hi - lo) * rng.random(count)


def build_f1(params: PipelineParams):
    """f1 with verification of circle invariance, area preservation and trapping."""
    f1 = boundary_morse_smale(params.boundary())
    xs = np.random.default_rng(params.seed).random(1000)
    _, y0 = f1.eval(xs, np.zeros_like(xs))
    _, y1 = f1.eval(xs, np.ones_like(xs))
    bx, by = _band_samples(0.0, 1.0, 2000, params.seed)
    A = GridSet.horizontal_band(params.band_obj, params.depth_start, *params.trap_band)
    checks = {
        "c0_invariance": float(np.max(np.abs(y0))),
        "c1_invariance": float(np.max(np.abs(y1 - 1.0))),
        "det_defect_band": float(np.max(np.abs(_det(f1, bx, by) - 1.0))),
        "trap": bool(check_trap(f1, A)),
        "c1_distance_to_twist": c1_distance(f1, integrable_twist()),
    }
    if checks["c0_invariance"] > 1e-10 or checks["c1_invariance"] > 1e-10:
        raise ConstructionError(f"boundary circles not invariant: {checks}")
    if not checks["trap"]:
        raise ConstructionError("f1 does not trap the enclosing band")
    return f1, checks


def _unstable_direction(F: LiftedMap, x, y):
    J = F.jacobian(np.array([x]), np.array([y]))[0]
    w, v = np.linalg.eig(J)
    k = int(np.argmax(np.abs(w)))
    vec = np.real(v[:, k])
    return float(np.abs(w[k])), vec / np.linalg.norm(vec)


def transport_probe(F: LiftedMap, point, upward: bool, steps: int = 2000, count: int = 200):
    """Iterate a short segment on the local unstable arc of a boundary point.

    Returns the first iterate at which some segment point crosses the middle
    of the band (None if never) and the extreme height reached.
    """
    lam, v = _unstable_direction(F, *point)
    if (v[1] < 0) == upward:
        v = -v
    s = np.geomspace(1e-6, 1e-3, count)
    x = point[0] + s * v[0]
    y = point[1] + s * v[1]
    first = None
    extreme = float(y.max() if upward else y.min())
    for k in range(1, steps + 1):
        x, y = F.eval(x, y)
        ext = float(y.max() if upward else y.min())
        extreme = max(extreme, ext) if upward else min(extreme, ext)
        if first is None and (ext > 0.5 if upward else ext < 0.5):
            first = k
            break
    return {"eigenvalue": lam, "first_cross": first, "extreme_height": extreme}


def build_f2(f1: LiftedMap, params: PipelineParams, strict: bool = False):
    """f2 = f1 o C with the connector kicks, plus connection diagnostics.

    The transport of the unstable arcs of p0 and p1 across the band is
    reported; it is an error only when ``strict`` is set.
    """
    strips = params.connector_strips()
    budget = None if params.strips is not None else SHARE_CONNECTOR * params.c1_budget
    C = connector_shear(strips, budget)
    f2 = compose(f1, C)
    f2.label = "f2"
    f2.params = {**f1.params, **C.params}
    f2.strips = strips
    bx, by = _band_samples(0.0, 1.0, 10000, params.seed + 1)
    lo = min(s.lo for s in strips)
    hi = max(s.hi for s in strips)
    ox, oy = _band_samples(-0.5, 1.5, 4000, params.seed + 2)
    off = (oy < lo) | (oy > hi)
    X1, Y1 = f1.eval(ox[off], oy[off])
    X2, Y2 = f2.eval(ox[off], oy[off])
    up = transport_probe(f2, (params.p0, 0.0), upward=True)
    down = transport_probe(f2, (params.p1, 1.0), upward=False)
    grid = GridSet.full(Band(0.0, 1.0), 5)
    K = GridSet.horizontal_band(Band(0.0, 1.0), 5, 0.0625, 0.9375)
    chains = chain_reachable(f2, AnnulusPoint(0.3, 0.01), AnnulusPoint(0.7, 0.99), K, grid.diagonal, grid,
                             follow=1000)
    checks = {
        "det_defect_band": float(np.max(np.abs(_det(f2, bx, by) - 1.0))),
        "equals_f1_off_strips": bool(np.array_equal(X1, X2) and np.array_equal(Y1, Y2)),
        "transport_up": up,
        "transport_down": down,
        "connected": up["first_cross"] is not None and down["first_cross"] is not None,
        "chain_c0_to_c1": bool(chains),
        "c1_distance_to_twist": c1_distance(f2, integrable_twist()),
        "connector_c1_size": c1_distance(C, identity()),
    }
    if strict and not checks["connected"]:
        raise ConstructionError(f"unstable arcs were not transported across the band: {up}, {down}")
    return f2, checks


def build_final(f2: LiftedMap, params: PipelineParams):
    """f = b1 o b0 o f2 with wandering-interval and escape checks."""
    delta, amp = params.bump_radius, params.bump_amplitude()
    z0, z1 = AnnulusPoint(params.z0 % 1.0, 0.0), AnnulusPoint(params.z1 % 1.0, 1.0)
    b0 = bump_push(BumpProfile(z0, delta, amp), "up")
    b1 = bump_push(BumpProfile(z1, delta, amp), "down")
    f = compose_all(b1, b0, f2)
    f.label = "f"
    f.params = {**f2.params, "bump_radius": delta, "bump_amplitude": amp}
    checks = {"bump_amplitude": amp,
              "wandering_I0": _wandering(f2, z0, delta, params.wandering_horizon),
              "wandering_I1": _wandering(f2, z1, delta, params.wandering_horizon)}
    rng = np.random.default_rng(params.seed + 3)
    for name, z, b, sign, target in (("escape_L0", z0, b0, 1.0, params.band[0] + 1.0),
                                     ("escape_L1", z1, b1, -1.0, params.band[1] - 1.0)):
        t = rng.uniform(-0.9, 0.9, 200) * delta
        lift = b.eval(z.x + t, np.full_like(t, z.y))[1] - z.y
        lx = z.x + t
        ly = z.y + lift * rng.uniform(0.05, 0.95, 200)
        x, y = lx, ly
        for _ in range(params.escape_steps):
            x, y = f.inverse_eval(x, y)
            y = np.clip(y, -1e6, 1e6)
        checks[name] = {"final_extreme": float(y.max() if sign > 0 else y.min()),
                        "target": target,
                        "escaped": bool(np.all(y < target) if sign > 0 else np.all(y > target))}
    ox, oy = _band_samples(-0.5, 1.5, 4000, params.seed + 4)
    far = ((np.hypot(np.abs((ox - z0.x + 0.5) % 1 - 0.5), oy - z0.y) > delta)
           & (np.hypot(np.abs((ox - z1.x + 0.5) % 1 - 0.5), oy - z1.y) > delta))
    X1, Y1 = f2.eval(ox[far], oy[far])
    Xf, Yf = compose(b1, b0).eval(X1, Y1)
    checks["equals_f2_off_balls"] = bool(np.array_equal(np.asarray(X1), Xf))
    A = GridSet.horizontal_band(params.band_obj, params.depth_start, *params.trap_band)
    checks["trap"] = bool(check_trap(f, A))
    checks["c1_distance_to_twist"] = c1_distance(f, integrable_twist())
    checks["within_c1_budget"] = checks["c1_distance_to_twist"] <= params.c1_budget
    return f, checks


def _wandering(F: LiftedMap, z: AnnulusPoint, delta: float, horizon: int) -> dict:
    """Do forward and backward images of the arc of the circle through z within
    delta of z avoid the arc for n <= horizon?  Checked on 64 arc samples."""
    t = np.linspace(-delta, delta, 64)
    lo, hi = z.x - delta, z.x + delta
    ok = True
    first = None
    for inverse in (False, True):
        x, y = z.x + t, np.full_like(t, z.y)
        step = F.inverse_eval if inverse else F.eval
        for n in range(1, horizon + 1):
            x, y = step(x, y)
            r = np.mod(x - lo, 1.0)
            if np.any(r <= hi - lo):
                ok = False
                first = -n if inverse else n
                break
        if not ok:
            break
    return {"wandering": ok, "horizon": horizon, "first_return": first}


def build_dissipative(f2: LiftedMap, n: int, params: Optional[PipelineParams] = None):
    """g_n = h_n o f2 with determinant, twist and trapping checks."""
    params = params or PipelineParams()
    g = compose(vertical_contraction(n), f2)
    g.label = f"g_{n}"
    bx, by = _band_samples(-1.0, 2.0, 20000, params.seed + 5)
    J = g.step(bx, by)[2]
    det = np.linalg.det(J)
    A = GridSet.horizontal_band(params.band_obj, params.depth_start, -1.0, 2.0)
    checks = {
        "n": n,
        "det_max": float(det.max()),
        "det_bound": 1.0 - 1.0 / (2 * n),
        "det_ok": bool(np.all(det < 1.0 - 1.0 / (2 * n))),
        "twist_min": float(J[:, 0, 1].min()),
        "twist_ok": bool(np.all(J[:, 0, 1] > 0)),
        "trap": bool(check_trap(g, A)),
    }
    return g, checks


def unstable_set_cover(F: LiftedMap, point: AnnulusPoint, grid: GridSet, steps: int = 300,
                       count: int = 400) -> Optional[GridSet]:
    """Boxes visited by a short unstable segment of a saddle, or None if the
    point is not a saddle."""
    lam, v = _unstable_direction(F, point.x, point.y)
    if lam <= 1.0 + 1e-9:
        return None
    s = np.concatenate([-np.geomspace(1e-7, 1e-3, count), np.geomspace(1e-7, 1e-3, count)])
    x, y = point.x + s * v[0], point.y + s * v[1]
    S = grid.like()
    for _ in range(steps):
        x, y = F.eval(x, y)
        S = S | GridSet.from_points(grid.band, grid.depth, x, y)
    return S


@dataclass
class PipelineReport:
    params: PipelineParams
    stages: dict = field(default_factory=dict)
    trap: bool = False
    attractor: Optional[GridSet] = None
    attractor_trace: Optional[AttractorTrace] = None
    complement: Optional[object] = None
    rotation: Optional[object] = None
    witnesses: dict = field(default_factory=dict)
    entropy: Optional[object] = None
    certificate: Optional[object] = None
    extra: dict = field(default_factory=dict)
    clauses: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return bool(self.clauses) and all(self.clauses.values()) and self.error is None

    def failed_clauses(self) -> list:
        return [k for k, v in self.clauses.items() if not v]

    def to_dict(self) -> dict:
        d = {
            "params": self.params.to_dict(),
            "stages": self.stages,
            "trap": self.trap,
            "attractor": None,
            "complement": self.complement.summary() if self.complement is not None else None,
            "rotation": self.rotation.to_dict() if self.rotation is not None else None,
            "witnesses": {k: (w.to_dict() if w is not None else None) for k, w in self.witnesses.items()},
            "entropy": self.entropy.to_dict() if self.entropy is not None else None,
            "certificate": self.certificate.to_dict() if self.certificate is not None else None,
            "extra": self.extra,
            "clauses": self.clauses,
            "pass": self.passed,
            "failed": self.failed_clauses(),
            "error": self.error,
            "enclosure_policy": "sampled Jacobian norm times box diagonal, at least one box; no directed rounding",
        }
        if self.attractor is not None:
            a = self.attractor
            d["attractor"] = {"depth": a.depth, "boxes": len(a), "area": a.area,
                              "y_extent": list(a.y_extent() or []),
                              "trace": asdict(self.attractor_trace) if self.attractor_trace else None}
        return d


def _witness_seeds(x, y, spread=0.02, count=9):
    return [AnnulusPoint((x + dx) % 1.0, y) for dx in np.linspace(-spread, spread, count)]


def stable_set_horseshoe(f: LiftedMap, params: PipelineParams):
    """Wall candidates from the stable sets of x0 (shift 0) and x1 (shift 1)."""
    A = GridSet.horizontal_band(params.band_obj, params.horseshoe_depth, *params.trap_band)
    W0 = stable_continuum(f, AnnulusPoint(params.x0 % 1.0, 0.0), 0, A, params.horseshoe_horizon)
    W1 = stable_continuum(f, AnnulusPoint(params.x1 % 1.0, 1.0), 1, A, params.horseshoe_horizon)
    info = {"wall0_boxes": len(W0), "wall1_boxes": len(W1)}
    D0, D1 = classify_joining(W0, A), classify_joining(W1, A)
    info["wall0_joining"] = D0 is not None
    info["wall1_joining"] = D1 is not None
    cert = None
    if D0 is not None and D1 is not None and not np.any(W0.mask & W1.mask):
        R = adapted_rectangle(D0, D1, A)
        info["rectangle"] = R is not None
        if R is not None:
            cert = search_certificate(f, R, params.n_max)
    info["found"] = cert is not None
    info["searched_n_max"] = params.n_max
    return cert, info


def run_pipeline(params: PipelineParams) -> PipelineReport:
    """Build f and validate trap, essentialness, rotation interval and entropy."""
    rep = PipelineReport(params)
    clock = time.perf_counter
    t0 = clock()
    try:
        f1, c1 = build_f1(params)
        f2, c2 = build_f2(f1, params)
        f, c3 = build_final(f2, params)
        rep.stages = {"f1": c1, "f2": c2, "f": c3}
        rep.timings["build"] = clock() - t0
        A = GridSet.horizontal_band(params.band_obj, params.depth_start, *params.trap_band)
        rep.trap = check_trap(f, A)
        rep.clauses["trap"] = rep.trap
        if not rep.trap:
            return rep
        t = clock()
        rep.attractor_trace = AttractorTrace()
        rep.attractor = attractor_approx(f, A, params.depth, box_cap=params.max_boxes,
                                         trace=rep.attractor_trace)
        rep.timings["attractor"] = clock() - t
        rep.complement = analyze_complement(rep.attractor)
        rep.clauses["essential"] = rep.complement.essential
        t = clock()
        rep.rotation = rotation_interval(f, rep.attractor, params.rotation_n, params.rotation_samples,
                                         params.seed, params.rotation_tol)
        d = params.delta_margin
        rep.clauses["rotation"] = rep.rotation.contains(d, 1.0 - d)
        rep.witnesses["0/1"] = find_periodic(f, 0, 1, _witness_seeds(params.x0, 0.0), params.witness_tol)
        rep.witnesses["1/1"] = find_periodic(f, 1, 1, _witness_seeds(params.x1, 1.0), params.witness_tol)
        rep.clauses["endpoint_witnesses"] = all(w is not None for w in rep.witnesses.values())
        rep.timings["rotation"] = clock() - t
        if params.horseshoe_search:
            t = clock()
            rep.certificate, rep.extra["horseshoe"] = stable_set_horseshoe(f, params)
            rep.timings["horseshoe"] = clock() - t
        t = clock()
        rep.entropy = bracket(f, rep.attractor, rep.certificate, params.entropy_n,
                              max_samples=params.entropy_samples, seed=params.seed)
        rep.timings["entropy"] = clock() - t
        rep.clauses["entropy"] = rep.entropy.upper < params.epsilon_target
    except RotolabError as exc:
        rep.error = f"{type(exc).__name__}: {exc}"
    rep.timings["total"] = clock() - t0
    return rep


def run_dissipative(params: PipelineParams) -> PipelineReport:
    """Dissipative variant g_n = h_n o f2: determinant, twist, trap and rotation clauses."""
    rep = PipelineReport(params)
    clock = time.perf_counter
    t0 = clock()
    try:
        f1, c1 = build_f1(params)
        f2, c2 = build_f2(f1, params)
        n = params.dissipative_n
        g, c3 = build_dissipative(f2, n, params)
        rep.stages = {"f1": c1, "f2": c2, "g": c3}
        rep.clauses["determinant"] = c3["det_ok"]
        rep.clauses["twist"] = c3["twist_ok"]
        rep.trap = c3["trap"]
        rep.clauses["trap"] = rep.trap
        if not rep.trap:
            return rep
        A = GridSet.horizontal_band(params.band_obj, params.depth_start, -1.0, 2.0)
        t = clock()
        rep.attractor_trace = AttractorTrace()
        rep.attractor = attractor_approx(g, A, params.depth, box_cap=params.max_boxes,
                                         trace=rep.attractor_trace)
        rep.complement = analyze_complement(rep.attractor)
        rep.timings["attractor"] = clock() - t
        t = clock()
        rep.rotation = rotation_interval(g, rep.attractor, params.rotation_n, params.rotation_samples,
                                         params.seed, params.rotation_tol)
        d = params.delta_margin
        rep.clauses["rotation"] = rep.rotation.contains(d, 1.0 - d)
        seeds = [AnnulusPoint(a, b) for a in np.linspace(0, 1, 12, endpoint=False)
                 for b in np.linspace(0.02, 0.98, 12)]
        for p in (0, 1):
            rep.witnesses[f"{p}/1"] = find_periodic(g, p, 1, seeds, params.witness_tol)
        rep.timings["rotation"] = clock() - t
        # the closure of an unstable set, reported next to the full cover
        saddle = None
        for w in rep.witnesses.values():
            if w is not None and _unstable_direction(g, w.lift_x, w.point.y)[0] > 1.0 + 1e-9:
                saddle = w
                break
        if saddle is not None:
            U = unstable_set_cover(g, saddle.point, rep.attractor)
            rep.extra["unstable_set"] = {"from": saddle.to_dict(), "boxes": len(U),
                                         "inside_cover": bool(U.issubset(rep.attractor.dilate(1)))}
        else:
            rep.extra["unstable_set"] = None
        rep.entropy = bracket(g, rep.attractor, None, params.entropy_n,
                              max_samples=params.entropy_samples, seed=params.seed)
    except RotolabError as exc:
        rep.error = f"{type(exc).__name__}: {exc}"
    rep.timings["total"] = clock() - t0
    return rep


def budget_sweep(params: PipelineParams, budgets, depth: int = 6, n: int = 256, samples: int = 2000) -> list:
    """Entropy upper bound and rotation-interval length of f across C1 budgets."""
    rows = []
    for b in budgets:
        p = PipelineParams(**{**asdict(params), "c1_budget": float(b), "depth": depth,
                              "entropy_n": n, "entropy_samples": samples})
        f1 = boundary_morse_smale(p.boundary())
        f2, _ = build_f2(f1, p)
        f, _ = build_final(f2, PipelineParams(**{**asdict(p), "wandering_horizon": 1, "escape_steps": 1}))
        A = GridSet.horizontal_band(p.band_obj, p.depth_start, *p.trap_band)
        S = attractor_approx(f, A, depth)
        rot = rotation_interval(f, S, p.rotation_n // 2, samples, p.seed)
        ent = bracket(f, S, None, n, max_samples=samples, seed=p.seed)
        rows.append({"c1_budget": float(b), "entropy_upper": ent.upper, "rotation_length": rot.length,
                     "rotation": [rot.rho_min, rot.rho_max], "cover_y_extent": list(S.y_extent())})
    return rows
