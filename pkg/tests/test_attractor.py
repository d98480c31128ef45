import numpy as np
import pytest

from rotolab.attractor import (AttractorTrace, analyze_complement, attractor_approx, check_trap,
                               components, image_cover)
from rotolab.cover import Band
from rotolab.errors import PreconditionError
from rotolab.grid import GridSet
from rotolab.maps import LiftedMap, compose, identity, integrable_twist, orbit_arrays

WIDE = Band(-3.0, 4.0)


def contraction_to_zero(c=0.5):
    """(x, y) -> (x, c y), composed with the twist below."""
    def fwd(x, y):
        return x.copy(), c * y

    def jac(x, y):
        J = np.zeros(np.shape(x) + (2, 2))
        J[..., 0, 0] = 1.0
        J[..., 1, 1] = c
        return J

    return LiftedMap(fwd, jac, None, label="contract")


def test_image_cover_identity_is_one_ring():
    S = GridSet.from_indices(Band(0, 1), 4, [(5, 5), (9, 2)])
    assert image_cover(identity(), S, lipschitz_margin=0.0) == S.dilate(1)


def test_image_cover_twist_keeps_the_bottom_circle():
    S = GridSet.from_indices(Band(-1, 1), 4, [(0, 16)])
    img = image_cover(integrable_twist(), S)
    assert img.mask[0, 16]
    lo, hi = img.y_extent()
    assert lo >= -0.25 and hi <= 0.25


def test_image_cover_contains_images(rng):
    F = compose(integrable_twist(), contraction_to_zero(0.7))
    S = GridSet.horizontal_band(WIDE, 5, -1, 2)
    img = image_cover(F, S)
    x, y = rng.random(20_000), rng.uniform(-1, 2, 20_000)
    assert np.all(img.contains_points(*F.eval(x, y)))


def test_check_trap_examples(stages):
    A = GridSet.horizontal_band(WIDE, 6, -1.0, 2.0)
    assert check_trap(stages["f1"], A)
    band01 = GridSet.full(Band(0.0, 1.0), 6)
    assert not check_trap(integrable_twist(), band01)
    assert not check_trap(identity(), A)


def test_attractor_rejects_non_trapping_region():
    A = GridSet.full(Band(0.0, 1.0), 4)
    with pytest.raises(PreconditionError):
        attractor_approx(integrable_twist(), A, 6)


def test_contraction_cover_is_thin():
    c = 0.5
    F = compose(integrable_twist(), contraction_to_zero(c))
    A = GridSet.horizontal_band(Band(-2, 2), 3, -1, 1)
    trace = AttractorTrace()
    S = attractor_approx(F, A, 8, trace=trace)
    # enclosure oracle: the top row satisfies t <= c t + m + h with m = L diag
    h = S.h
    m = trace.max_lipschitz * S.diagonal
    bound = (m + h) / (1 - c) + h
    lo, hi = S.y_extent()
    assert hi <= bound and lo >= -bound
    assert S.mask[:, S.locate(0.0, 0.0)[1]].all()
    assert analyze_complement(S).essential


def test_f1_cover_contains_boundary_circles(stages):
    A = GridSet.horizontal_band(WIDE, 4, -1.0, 2.0)
    S = attractor_approx(stages["f1"], A, 7)
    for y in (0.0, 1.0, 0.5):
        j = S.locate(0.0, y)[1]
        assert S.mask[:, j].all()
    lo, hi = S.y_extent()
    assert -0.6 < lo <= 0.0 and 1.0 <= hi < 1.6
    assert analyze_complement(S).essential


def test_f1_cover_is_sound(stages, rng):
    """Monte-Carlo: long orbits started in A stay in the cover dilated by one box."""
    A = GridSet.horizontal_band(WIDE, 4, -1.0, 2.0)
    S = attractor_approx(stages["f1"], A, 7).dilate(1)
    x0, y0 = rng.random(300), rng.uniform(-1, 2, 300)
    xs, ys = orbit_arrays(stages["f1"], x0, y0, 300)
    assert np.all(S.contains_points(xs[-100:].ravel(), ys[-100:].ravel()))


def test_complement_examples():
    band = Band(0.0, 1.0)
    ring = GridSet.horizontal_band(band, 5, 0.4, 0.6)
    ca = analyze_complement(ring)
    assert ca.essential and not ca.bounded_components
    disk = GridSet.from_predicate(band, 5, lambda x, y: (x - 0.5) ** 2 + (y - 0.5) ** 2 < 0.04)
    assert not analyze_complement(disk).essential
    annulus_with_hole = ring - GridSet.from_indices(band, 5, [(3, 15)])
    ca = analyze_complement(annulus_with_hole)
    assert ca.essential and ca.interior == "undetermined"
    # a closed loop of boxes encloses one bounded component
    loop = GridSet.from_predicate(band, 5, lambda x, y: np.abs(np.hypot(x - 0.5, y - 0.5) - 0.2) < 0.04)
    ca = analyze_complement(loop | ring)
    assert len(ca.bounded_components) >= 1 and ca.bounded_area > 0


def test_components_wrap_around():
    g = GridSet.from_indices(Band(0, 1), 3, [(0, 3), (7, 3)])
    assert len(components(g)) == 1
    diag = GridSet.from_indices(Band(0, 1), 3, [(0, 3), (7, 4)])
    assert len(components(diag, 4)) == 2 and len(components(diag, 8)) == 1
