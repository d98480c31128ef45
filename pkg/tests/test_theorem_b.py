from dataclasses import asdict

import numpy as np
import pytest

from rotolab.cover import AnnulusPoint
from rotolab.errors import ConstructionError
from rotolab.maps import identity, integrable_twist
from rotolab.rotation import orbit_rotation_number
from rotolab.theorem_b import (SHARE_CONNECTOR, PipelineParams, budget_sweep, build_dissipative, build_f1,
                               build_f2, build_final, c1_distance, dissipative_params, run_pipeline,
                               transport_probe)

LIGHT = dict(depth=6, entropy_n=128, entropy_samples=2000, rotation_samples=1000, wandering_horizon=100,
             escape_steps=10)


def test_params_validation():
    with pytest.raises(ConstructionError):
        PipelineParams(delta_margin=0.6)
    with pytest.raises(ConstructionError):
        PipelineParams(c1_budget=0.0)
    with pytest.raises(ConstructionError):
        PipelineParams(strip_bounds=(0.8, 0.2))
    with pytest.raises(ConstructionError):
        PipelineParams(depth=3, depth_start=4)


def test_c1_distance_of_twist_to_itself():
    assert c1_distance(integrable_twist(), integrable_twist()) == 0.0
    assert c1_distance(integrable_twist(), identity()) == pytest.approx(1.0, abs=1e-6)


# stage 1 ------------------------------------------------------------------------------

def test_f1_checks(stages):
    c = stages["checks"]["f1"]
    assert c["c0_invariance"] < 1e-10 and c["c1_invariance"] < 1e-10
    assert c["det_defect_band"] < 1e-8
    assert c["trap"]


def test_f1_endpoint_rotation(stages, params):
    f1 = stages["f1"]
    assert orbit_rotation_number(f1, AnnulusPoint(params.x0, 0.0), 1000) == 0.0
    assert orbit_rotation_number(f1, AnnulusPoint(params.x1, 1.0), 1000) == pytest.approx(1.0, abs=1e-12)


def test_f1_uses_its_budget_share(stages, params):
    assert stages["checks"]["f1"]["c1_distance_to_twist"] <= 0.4 * params.c1_budget * 1.05


# stage 2 ------------------------------------------------------------------------------

def test_f2_area_and_locality(stages):
    c = stages["checks"]["f2"]
    assert c["det_defect_band"] < 1e-8
    assert c["equals_f1_off_strips"]
    assert c["connector_c1_size"] <= SHARE_CONNECTOR * 0.5 * 1.05


def test_f2_unstable_arc_diagnostics_are_reported(stages):
    up = stages["checks"]["f2"]["transport_up"]
    assert up["eigenvalue"] > 1.0
    assert set(up) == {"eigenvalue", "first_cross", "extreme_height"}


@pytest.mark.xfail(strict=True, reason="invariant circles near C0 block the transport at this kick size; "
                                        "the builder reports it as a diagnostic")
def test_f2_transports_unstable_arc_across_the_band(stages, params):
    probe = transport_probe(stages["f2"], (params.p0, 0.0), upward=True)
    assert probe["first_cross"] is not None


@pytest.mark.xfail(strict=True, reason="same obstruction: orbits near C0 never enter the jump strip")
def test_f2_chains_from_c0_to_c1(stages):
    assert stages["checks"]["f2"]["chain_c0_to_c1"]


# stage 3 ------------------------------------------------------------------------------

def test_final_checks(stages, params):
    c = stages["checks"]["f"]
    assert c["wandering_I0"]["wandering"] and c["wandering_I1"]["wandering"]
    assert c["wandering_I0"]["horizon"] == params.wandering_horizon
    assert c["equals_f2_off_balls"]
    assert c["trap"]
    assert c["within_c1_budget"]


@pytest.mark.xfail(strict=True, reason="the exterior dissipation is flat at the boundary circles, so "
                                        "backward orbits from the pushed arcs drift too slowly to reach "
                                        "y < -2 in 1000 steps")
def test_pushed_arc_escapes_backward(stages):
    assert stages["checks"]["f"]["escape_L0"]["escaped"]


def test_stage_rebuild_is_bit_identical(params, stages, rng):
    p2 = PipelineParams(**asdict(params))
    f1, _ = build_f1(p2)
    f2, _ = build_f2(f1, p2)
    x, y = rng.random(500), rng.uniform(-1, 2, 500)
    X1, Y1 = stages["f2"].eval(x, y)
    X2, Y2 = f2.eval(x, y)
    assert np.array_equal(X1, X2) and np.array_equal(Y1, Y2)


# dissipative variant ----------------------------------------------------------------

def test_dissipative_checks():
    p = dissipative_params(depth=6)
    f1, _ = build_f1(p)
    f2, _ = build_f2(f1, p)
    g, c = build_dissipative(f2, 16, p)
    assert c["det_max"] < 1 - 1 / 32 and c["det_ok"]
    assert c["twist_ok"] and c["twist_min"] > 0
    assert c["trap"]


def test_dissipative_default_kicks_break_twist_nowhere_near_n():
    # with the pipeline's weak kicks g_n is a tiny contraction of f2 and keeps
    # the twist condition too
    p = PipelineParams(depth=6)
    f1, _ = build_f1(p)
    f2, _ = build_f2(f1, p)
    _, c = build_dissipative(f2, 8, p)
    assert c["det_ok"] and c["twist_ok"]


# pipeline failure paths -------------------------------------------------------------

def test_gross_budget_fails_the_entropy_clause():
    rep = run_pipeline(PipelineParams(c1_budget=2.0, **LIGHT))
    assert rep.error is None
    assert rep.failed_clauses() == ["entropy"]
    assert not rep.to_dict()["pass"]


def test_absurd_budget_reports_the_construction_error():
    rep = run_pipeline(PipelineParams(c1_budget=5.0, **LIGHT))
    assert not rep.passed and "ConstructionError" in rep.error


def test_wide_margin_still_passes():
    rep = run_pipeline(PipelineParams(delta_margin=0.4, c1_budget=0.01, bump_radius=1e-4, **LIGHT))
    assert rep.clauses["rotation"]


def test_degenerate_sampling_fails_the_rotation_clause():
    rep = run_pipeline(PipelineParams(**{**LIGHT, "rotation_samples": 2}))
    assert rep.clauses["rotation"] is False
    assert "rotation" in rep.failed_clauses()


@pytest.mark.slow
def test_budget_sweep_tradeoff():
    d = 0.05
    rows = budget_sweep(PipelineParams(delta_margin=d), [0.1, 0.25, 0.5, 1.0], depth=6, n=256, samples=2000)
    ent = [r["entropy_upper"] for r in rows]
    assert all(a <= b for a, b in zip(ent, ent[1:]))
    for r in rows:
        lo, hi = r["cover_y_extent"]
        # rotation never exceeds the height range of the cover (the map is the
        # twist up to a small perturbation there), and covers [d, 1 - d]
        assert r["rotation_length"] >= 1 - 2 * d
        assert lo - 0.01 <= r["rotation"][0] and r["rotation"][1] <= hi + 0.01
