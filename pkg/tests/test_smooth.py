import numpy as np
import pytest
from hypothesis import given, strategies as st

from rotolab.smooth import Plateau, bump, smoothstep, smoothstep_integral, symmetric_cutoff


def test_smoothstep_endpoints_are_flat_to_second_order():
    s, ds, d2s = smoothstep(np.array([0.0, 1.0]))
    assert list(s) == [0.0, 1.0]
    assert np.all(ds == 0) and np.all(d2s == 0)


@given(st.floats(-2, 3))
def test_smoothstep_derivatives_match_finite_differences(t):
    h = 1e-6
    s, ds, d2s = smoothstep(t)
    assert (smoothstep(t + h)[0] - smoothstep(t - h)[0]) / (2 * h) == pytest.approx(ds, abs=1e-6)
    assert (smoothstep(t + h)[1] - smoothstep(t - h)[1]) / (2 * h) == pytest.approx(d2s, abs=1e-4)


def test_smoothstep_integral_matches_quadrature():
    t = np.linspace(-1, 2.5, 3501)
    s = smoothstep(t)[0]
    cumulative = np.concatenate([[0.0], np.cumsum(0.5 * (s[1:] + s[:-1]) * np.diff(t))])
    assert np.max(np.abs(cumulative - smoothstep_integral(t))) < 1e-6


def test_plateau_values_and_mass():
    P = Plateau(0.2, 0.8, 0.1)
    v = P(np.array([0.05, 0.15, 0.5, 0.85, 0.95]))[0]
    assert v[0] == 0 and v[2] == 1 and v[4] == 0
    assert 0 < v[1] < 1 and 0 < v[3] < 1
    assert P.integral(np.array([5.0]))[0] == pytest.approx(P.mass)
    with pytest.raises(ValueError):
        Plateau(1, 0, 0.1)


def test_symmetric_cutoff_is_even():
    s = np.linspace(-1.2, 1.2, 241)
    v, d, _ = symmetric_cutoff(s)
    assert np.allclose(v, v[::-1])
    assert np.all(v[np.abs(s) <= 0.5] == 1) and np.all(v[np.abs(s) >= 1] == 0)


def test_bump_peak_support_and_derivative():
    r = np.linspace(0, 1.2, 1201)
    v, dv = bump(r)
    assert v[0] == 1.0
    assert np.all(v[r >= 1] == 0)
    assert np.all(np.diff(v[r < 1]) <= 0)
    h = 1e-6
    mid = np.array([0.3, 0.6, 0.9])
    fd = (bump(mid + h)[0] - bump(mid - h)[0]) / (2 * h)
    assert np.allclose(fd, bump(mid)[1], atol=1e-6)
    # flat at the rim
    assert abs(bump(np.array([0.99]))[1][0]) < 1e-15
