"""Smooth profile templates shared by the map families.

Cutoffs use the quintic smoothstep (C^2, which is all the Jacobians need);
the bump used by the wandering-interval pushes is the C^inf exponential bump.
"""

from __future__ import annotations

import numpy as np


def smoothstep(t):
    """Quintic smoothstep with value, first and second derivative."""
    t = np.clip(t, 0.0, 1.0)
    s = t * t * t * (t * (6.0 * t - 15.0) + 10.0)
    ds = 30.0 * t * t * (t - 1.0) ** 2
    d2s = 60.0 * t * (t - 1.0) * (2.0 * t - 1.0)
    return s, ds, d2s


def smoothstep_integral(t):
    """Antiderivative of the smoothstep, vanishing for t <= 0."""
    t = np.asarray(t, dtype=float)
    c = np.clip(t, 0.0, 1.0)
    inner = c ** 4 * (c * (c - 3.0) + 2.5)
    return inner + np.maximum(t - 1.0, 0.0)


class Plateau:
    """Function equal to 1 on [a, b], 0 outside (a - ramp, b + ramp)."""

    def __init__(self, a: float, b: float, ramp: float):
        if not b >= a:
            raise ValueError("plateau needs a <= b")
        if ramp <= 0:
            raise ValueError("ramp must be positive")
        self.a, self.b, self.ramp = float(a), float(b), float(ramp)

    @property
    def support(self):
        return self.a - self.ramp, self.b + self.ramp

    def __call__(self, y):
        """Value, first and second derivative."""
        r = self.ramp
        s1, d1, e1 = smoothstep((y - self.a + r) / r)
        s2, d2, e2 = smoothstep((y - self.b) / r)
        return s1 - s2, (d1 - d2) / r, (e1 - e2) / (r * r)

    def integral(self, y):
        """Integral from -inf to y."""
        r = self.ramp
        return r * (smoothstep_integral((y - self.a + r) / r) - smoothstep_integral((y - self.b) / r))

    @property
    def mass(self) -> float:
        return self.b - self.a + self.ramp


def symmetric_cutoff(s):
    """1 on |s| <= 1/2, 0 on |s| >= 1; value and two derivatives in s."""
    a = np.abs(s)
    v, d, e = smoothstep((a - 0.5) / 0.5)
    sign = np.sign(s)
    return 1.0 - v, -2.0 * d * sign, -4.0 * e


def bump(r):
    """exp(1 - 1/(1 - r^2)) on r < 1, zero outside; peak value 1 at r = 0.

    Returns the value and the radial derivative.
    """
    r = np.asarray(r, dtype=float)
    inside = r < 1.0
    rr = np.where(inside, r, 0.0)
    q = 1.0 - rr * rr
    val = np.where(inside, np.exp(1.0 - 1.0 / np.where(inside, q, 1.0)), 0.0)
    dval = np.where(inside, val * (-2.0 * rr / np.where(inside, q, 1.0) ** 2), 0.0)
    return val, dval
