import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rotolab.cover import (AnnulusPoint, Band, CoverPoint, DeckShift, annulus_distance, circle_coord,
                           circle_distance, displacement, lift_near, project)

finite = st.floats(-1e6, 1e6, allow_nan=False)


@pytest.mark.parametrize("p, expected", [((2.25, 0.5), (0.25, 0.5)), ((-0.25, 1.0), (0.75, 1.0)),
                                         ((3.0, -2.0), (0.0, -2.0))])
def test_project_examples(p, expected):
    a = project(CoverPoint(*p))
    assert (a.x, a.y) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("a, base, expected", [((0.9, 0.0), (0.0, 0.0), (-0.1, 0.0)),
                                               ((0.1, 0.0), (5.0, 0.0), (5.1, 0.0)),
                                               ((0.5, 0.0), (0.0, 0.0), (0.5, 0.0))])
def test_lift_near_examples(a, base, expected):
    q = lift_near(AnnulusPoint(*a), CoverPoint(*base))
    assert (q.x, q.y) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("p, q, expected", [((0, 0), (3.5, 1), 3.5), ((1, 2), (1, 5), 0.0),
                                            ((2, 0), (-1, 0), -3.0)])
def test_displacement_examples(p, q, expected):
    assert displacement(CoverPoint(*p), CoverPoint(*q)) == expected


@given(finite, finite)
def test_project_lands_in_fundamental_domain(x, y):
    a = project(CoverPoint(x, y))
    assert 0.0 <= a.x < 1.0
    assert a.y == y
    # the difference to the original abscissa is an integer up to rounding
    k = x - a.x
    assert abs(k - round(k)) <= 1e-9 * max(1.0, abs(x))


@given(st.floats(0, 1, exclude_max=True), st.floats(-1e3, 1e3), st.floats(-5, 5))
def test_lift_near_is_nearest(ax, bx, y):
    q = lift_near(AnnulusPoint(ax, y), CoverPoint(bx, 0.0))
    assert -0.5 <= q.x - bx <= 0.5 + 1e-9
    assert circle_distance(q.x, ax) < 1e-9


@given(st.integers(-50, 50), finite)
def test_deck_shift_commutes_with_projection(k, x):
    # compare on the circle: 0.0 and 0.9999999999999998 are the same point
    p = CoverPoint(x, 0.3)
    assert circle_distance(project(p + DeckShift(k)).x, project(p).x) < 1e-6


def test_circle_coord_vectorized_and_edge():
    v = circle_coord(np.array([-1e-18, 1.0, 2.5]))
    assert np.all((v >= 0) & (v < 1))
    assert v[2] == 0.5


def test_distances():
    assert circle_distance(0.95, 0.05) == pytest.approx(0.1)
    assert annulus_distance(0.95, 0.0, 0.05, 0.0) == pytest.approx(0.1)
    assert annulus_distance(0.0, 0.0, 0.0, 2.0) == 2.0


def test_invalid_points_rejected():
    with pytest.raises(ValueError):
        AnnulusPoint(1.0, 0.0)
    with pytest.raises(ValueError):
        CoverPoint(math.nan, 0.0)
    with pytest.raises(ValueError):
        Band(1.0, 0.0)


def test_band_contains():
    b = Band(0.0, 1.0)
    assert b.height == 1.0
    assert list(b.contains(np.array([-0.1, 0.0, 1.0, 1.1]))) == [False, True, True, False]
