import math

import numpy as np
import pytest

from rotolab.cover import Band
from rotolab.entropy import (bracket, log_norm_growth, norm_growth_upper, region_samples,
                             separated_set_estimate)
from rotolab.errors import InconsistentBracket, OrbitEscape
from rotolab.grid import GridSet
from rotolab.horseshoe import adapted_rectangle, markov_cross_check, synthetic_horseshoe, synthetic_setup
from rotolab.maps import LiftedMap, compose, identity, integrable_twist

UNIT = GridSet.full(Band(0.0, 1.0), 4)


def twist_closed_form(n):
    # largest singular value of [[1, n], [0, 1]]
    return 2.0 / n * math.log((n + math.sqrt(n * n + 4)) / 2)


@pytest.mark.parametrize("n", [1, 100, 1024])
def test_twist_norm_growth_matches_closed_form(n):
    assert norm_growth_upper(integrable_twist(), UNIT, n) == pytest.approx(twist_closed_form(n), abs=1e-12)


def test_twist_example_value():
    assert norm_growth_upper(integrable_twist(), UNIT, 100) == pytest.approx(0.0922, abs=1e-4)


def test_twist_growth_decreases_with_n():
    vals = [norm_growth_upper(integrable_twist(), UNIT, n) for n in (8, 16, 32, 64, 128, 256, 512, 1024)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_identity_has_zero_growth():
    assert norm_growth_upper(identity(), UNIT, 50) == 0.0


def test_long_products_do_not_overflow():
    # expansion 3 for 2000 steps overflows a naive product
    F = synthetic_horseshoe()
    g = log_norm_growth(F, np.array([0.5]), np.array([0.5]), 2000)
    assert np.isfinite(g[0])
    assert g[0] / 2000 <= math.log(3) + 1e-9


def test_band_check():
    up = compose(integrable_twist(), integrable_twist())

    def fwd(x, y):
        return x.copy(), y + 1.0

    def jac(x, y):
        J = np.zeros(np.shape(x) + (2, 2))
        J[..., 0, 0] = J[..., 1, 1] = 1.0
        return J

    with pytest.raises(OrbitEscape):
        norm_growth_upper(LiftedMap(fwd, jac, None), UNIT, 3)
    assert norm_growth_upper(up, UNIT, 3) > 0


def test_region_samples_subsampling():
    x, y = region_samples(UNIT)
    assert len(x) == 5 * len(UNIT)
    x2, y2 = region_samples(UNIT, 100, seed=3)
    x3, y3 = region_samples(UNIT, 100, seed=3)
    assert len(x2) == 100 and np.array_equal(x2, x3)


def test_separated_estimates_for_zero_entropy_maps():
    region = GridSet.full(Band(0.0, 1.0), 5)
    for F in (identity(), integrable_twist()):
        rows = separated_set_estimate(F, region, [4, 16, 64], [0.05], cloud=3000)
        rates = [r.rate for r in rows]
        assert rates[0] > rates[1] > rates[2]
        assert rates[-1] < 0.15
        assert not rows[0].to_dict()["certified"]


def test_separated_estimates_for_the_two_symbol_model():
    F = synthetic_horseshoe()
    A, D0, D1 = synthetic_setup(7)
    R = adapted_rectangle(D0, D1, A)
    rows = separated_set_estimate(F, R.cells, [2, 4, 6, 8], [0.05], cloud=20_000)
    rates = [r.rate for r in rows]
    # the eps-resolution constant decays like 1/n, so rates fall towards log 2
    assert all(a > b for a, b in zip(rates, rates[1:]))
    assert rates[-1] - math.log(2) < rates[0] - math.log(2)
    assert rates[-1] > math.log(2) - 0.1


def test_bracket_identity_and_synthetic():
    b = bracket(identity(), UNIT, None, 10)
    assert (b.lower, b.upper) == (0.0, 0.0)
    F = synthetic_horseshoe()
    A, D0, D1 = synthetic_setup(7)
    R = adapted_rectangle(D0, D1, A)
    cert = markov_cross_check(F, R, 1, 1)
    b = bracket(F, R.cells, cert, 16)
    assert b.lower == pytest.approx(math.log(2))
    assert b.lower <= b.upper <= 2 * math.log(3) + 1e-12
    assert b.to_dict()["certificate_ref"]["m"] == 2


def test_bracket_inconsistency_raises():
    class Fake:
        entropy_lower = 1.0

        def to_dict(self):
            return {}

    with pytest.raises(InconsistentBracket):
        bracket(identity(), UNIT, Fake(), 10)
