"""Acceptance checks, one test per criterion.

Each test records a PASS/FAIL line in ``RESULTS``; the lines are printed as
they happen (visible with ``-s``) and again in the terminal summary.

    pytest tests/test_acceptance.py -v
"""

import math
import time

import numpy as np
import pytest

from rotolab.attractor import attractor_approx
from rotolab.cli import chain_pairs
from rotolab.cover import AnnulusPoint, Band
from rotolab.entropy import norm_growth_upper, region_samples
from rotolab.grid import GridSet
from rotolab.horseshoe import (adapted_rectangle, chain_graph, chain_reachable, chain_reachable_pairs,
                               markov_cross_check, robustness_probe, synthetic_horseshoe, synthetic_setup,
                               verify_itineraries)
from rotolab.maps import integrable_twist, orbit_arrays
from rotolab.rotation import orbit_rotation_number
from rotolab.theorem_b import PipelineParams, dissipative_params, run_dissipative, run_pipeline

RESULTS = {}
UNIT = Band(0.0, 1.0)


def record(number: int, ok: bool, detail: str):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[number] = line
    print(line)
    return ok


@pytest.fixture(scope="module")
def pipeline():
    t0 = time.perf_counter()
    rep = run_pipeline(PipelineParams(epsilon_target=0.1, delta_margin=0.05, depth=8))
    return rep, time.perf_counter() - t0


@pytest.fixture(scope="module")
def synthetic():
    A, D0, D1 = synthetic_setup(7)
    return synthetic_horseshoe(), adapted_rectangle(D0, D1, A)


def test_criterion_1_twist_rotation():
    T = integrable_twist()
    t0 = time.perf_counter()
    errors = [abs(orbit_rotation_number(T, AnnulusPoint(0.3, h), 1000) - h) for h in (0, 1 / 3, 0.5, 1)]
    dt = time.perf_counter() - t0
    ok = record(1, max(errors) < 1e-9 and dt < 1.0, f"max error {max(errors):.1e}, {dt:.3f} s")
    assert ok


def test_criterion_2_entropy_decay():
    T = integrable_twist()
    region = GridSet.full(UNIT, 6)
    t0 = time.perf_counter()
    ns = [8 * 2 ** k for k in range(8)]
    values = [norm_growth_upper(T, region, n) for n in ns]
    dt = time.perf_counter() - t0
    closed = 2.0 / 1024 * math.log((1024 + math.sqrt(1024 ** 2 + 4)) / 2)
    decreasing = all(a > b for a, b in zip(values, values[1:]))
    err = abs(values[-1] - closed)
    ok = record(2, decreasing and err < 1e-6 and dt < 5.0,
                f"decreasing={decreasing}, value {values[-1]:.10f} vs {closed:.10f}, {dt:.2f} s")
    assert ok


def test_criterion_3_synthetic_horseshoe(synthetic):
    F, R = synthetic
    t0 = time.perf_counter()
    cert = markov_cross_check(F, R, 1, 1)
    it = verify_itineraries(F, R, cert, depth=10, samples=2_000_000, check=1000) if cert else {}
    control = markov_cross_check(integrable_twist(), R, 1, 1)
    dt = time.perf_counter() - t0
    ok = (cert is not None and cert.m == 2 and sorted(cert.displacements) == [0, 1]
          and abs(cert.entropy_lower - math.log(2)) < 1e-12
          and it["cylinders_found"] == it["cylinders_expected"] == 1024
          and it["itineraries_checked"] == 1000 and it["bound_violations"] == 0
          and control is None and dt < 10.0)
    detail = (f"m={cert.m}, displacements {sorted(cert.displacements)}, cylinders "
              f"{it['cylinders_found']}/{it['cylinders_expected']}, violations {it['bound_violations']}, "
              f"twist control {'none' if control is None else 'FOUND'}, {dt:.2f} s") if cert else "no certificate"
    assert record(3, ok, detail)


def test_criterion_4_low_entropy_pipeline(pipeline):
    rep, dt = pipeline
    w = rep.witnesses
    residuals = [x.residual for x in w.values() if x is not None]
    ok = (rep.passed and rep.attractor.depth >= 8 and rep.rotation.contains(0.05, 0.95)
          and len(residuals) == 2 and max(residuals) < 1e-8 and rep.entropy.upper < 0.1 and dt < 600)
    detail = (f"clauses {rep.clauses}, rotation [{rep.rotation.rho_min:.4f}, {rep.rotation.rho_max:.4f}], "
              f"entropy < {rep.entropy.upper:.4f}, {dt:.0f} s") if rep.error is None else rep.error
    assert record(4, ok, detail)


def test_criterion_5_dissipative_variant():
    t0 = time.perf_counter()
    p = dissipative_params(depth=8)
    rep = run_dissipative(p)
    dt = time.perf_counter() - t0
    g = rep.stages.get("g", {})
    ok = (rep.error is None and p.dissipative_n == 16 and g.get("det_max", 1.0) < 1 - 1 / 32
          and g.get("twist_min", 0.0) > 0 and rep.trap and rep.rotation.contains(0.1, 0.9) and dt < 600)
    detail = (f"det max {g['det_max']:.5f}, twist min {g['twist_min']:.3f}, trap {rep.trap}, rotation "
              f"[{rep.rotation.rho_min:.4f}, {rep.rotation.rho_max:.4f}], {dt:.0f} s") \
        if rep.error is None and rep.rotation is not None else str(rep.error or rep.clauses)
    assert record(5, ok, detail)


def test_criterion_6_chain_reachability(stages):
    f2 = stages["f2"]
    t0 = time.perf_counter()
    domain = GridSet.full(UNIT, 7)
    D = GridSet.horizontal_band(UNIT, 7, 0.3, 0.4)
    eps = domain.diagonal
    graph = chain_graph(f2, domain, D, eps)
    pairs = chain_pairs(f2, D, (0.0, 1.0), 20, 1000, 1000, seed=0)
    pts = [(AnnulusPoint(*z), AnnulusPoint(*w)) for z, w in pairs]
    hits = sum(chain_reachable_pairs(f2, pts, D, eps, domain, graph, follow=1000))
    T = integrable_twist()
    control = chain_reachable(T, AnnulusPoint(0.1, 0.2), AnnulusPoint(0.5, 0.7), domain.like(), eps, domain)
    dt = time.perf_counter() - t0
    ok = len(pairs) == 20 and hits == 20 and not control and dt < 30.0
    assert record(6, ok, f"{hits}/{len(pairs)} reachable, no-jump control {control}, {dt:.1f} s")


def _escapes(F, S, count=1000, steps=100):
    x0, y0 = region_samples(S, count, seed=7)
    xs, ys = orbit_arrays(F, x0, y0, steps)
    return int(np.count_nonzero(~S.dilate(1).contains_points(xs.ravel(), ys.ravel())))


def test_criterion_7_attractor_soundness(stages, params, pipeline):
    rep, _ = pipeline
    A = GridSet.horizontal_band(params.band_obj, params.depth_start, *params.trap_band)
    S1 = attractor_approx(stages["f1"], A, 8)
    e1 = _escapes(stages["f1"], S1)
    ef = _escapes(stages["f"], rep.attractor)
    ok = e1 == 0 and ef == 0 and rep.attractor.depth == 8
    assert record(7, ok, f"escapes f1 {e1}, f {ef} (1000 orbits x 100 steps, depth 8 cover dilated 1 box)")


def test_criterion_8_robustness(synthetic):
    F, R = synthetic
    probe = robustness_probe(F, R, 1, 1, eta_max=0.25)
    eta = probe["eta_star"]
    ok = probe["certified_at_zero"] and eta > 0
    assert record(8, ok, f"eta* = {eta:.4f} (first failure at {probe.get('eta_fail', float('nan')):.4f})")
