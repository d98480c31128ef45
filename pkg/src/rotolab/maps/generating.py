"""Exact area-preserving maps from mixed generating functions.

A function W(x, y') periodic in x defines the map (x, y) -> (x', y') by

    y  = y' + W_x(x, y'),    x' = x + W_y'(x, y'),

which preserves area exactly and is the identity wherever W vanishes near
(x, y').  The implicit equation for y' is solved by Newton's method.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ConstructionError
from ..smooth import Plateau, symmetric_cutoff
from .base import LiftedMap

_NEWTON_TOL = 1e-15
_NEWTON_MAX = 60


class BoundaryCircleTerm:
    """Cotangent lift of the circle map x -> x + psi(x), localized near the circle y = c.

    psi(x) = A sin(pi (x - x_rep)) sin(pi (x_att - x)) vanishes at the repelling
    point ``x_rep`` (slope +``slope``) and at the attracting point ``x_att``.
    """

    def __init__(self, c: float, x_rep: float, x_att: float, slope: float, width: float):
        gap = math.sin(math.pi * (x_att - x_rep))
        if abs(gap) < 1e-9:
            raise ConstructionError("repelling and attracting points coincide on the circle")
        if not 0 < slope < 1:
            raise ConstructionError(f"circle-map slope {slope} outside (0, 1)")
        if width <= 0:
            raise ConstructionError("width must be positive")
        self.c, self.x_rep, self.x_att, self.slope, self.width = c, x_rep, x_att, slope, width
        self.amp = slope / (math.pi * gap)
        # 1 + W_xy' >= 1 - slope * max|k'|; max|k'| < 4.8 for the quintic cutoff
        if slope * 4.8 >= 0.9:
            raise ConstructionError(f"slope {slope} too large for an invertible boundary lift")

    @property
    def support(self):
        return self.c - self.width, self.c + self.width

    def psi(self, x):
        a = math.pi * (np.asarray(x) - self.x_rep)
        b = math.pi * (self.x_att - np.asarray(x))
        return self.amp * np.sin(a) * np.sin(b)

    def dpsi(self, x):
        return self.amp * math.pi * np.sin(math.pi * (self.x_att + self.x_rep - 2 * np.asarray(x)))

    def d2psi(self, x):
        return -2 * self.amp * math.pi ** 2 * np.cos(math.pi * (self.x_att + self.x_rep - 2 * np.asarray(x)))

    def derivs(self, x, yp):
        w = self.width
        s = (yp - self.c) / w
        chi, chi_s, chi_ss = symmetric_cutoff(s)
        u = yp - self.c
        k = u * chi
        k1 = chi + s * chi_s
        k2 = (2 * chi_s + s * chi_ss) / w
        p, p1, p2 = self.psi(x), self.dpsi(x), self.d2psi(x)
        return p1 * k, p * k1, p2 * k, p1 * k1, p * k2


class StripKickTerm:
    """Localized standard-map kick: y' = y + (K / 2 pi) sin(2 pi (x - phase)) chi(y')."""

    def __init__(self, lo: float, hi: float, kick: float, phase: float = 0.0, ramp=None):
        if not hi > lo:
            raise ConstructionError(f"empty strip ({lo}, {hi})")
        ramp = ramp if ramp is not None else (hi - lo) / 2
        if 2 * ramp > hi - lo + 1e-12:
            raise ConstructionError("strip ramps overlap")
        self.lo, self.hi, self.kick, self.phase = lo, hi, kick, phase
        self.profile = Plateau(lo + ramp, hi - ramp, ramp)
        if abs(kick) / (2 * math.pi) * 1.875 / ramp >= 0.9:
            raise ConstructionError(f"kick {kick} exceeds the invertibility bound for this strip")

    @property
    def support(self):
        return self.lo, self.hi

    def derivs(self, x, yp):
        K = self.kick
        th = 2 * math.pi * (x - self.phase)
        c, s = np.cos(th), np.sin(th)
        chi, chi1, chi2 = self.profile(yp)
        q = K / (4 * math.pi ** 2)
        h = K / (2 * math.pi)
        return -h * s * chi, q * c * chi1, -K * c * chi, -h * s * chi1, q * c * chi2


class GeneratingMap:
    """Builds the LiftedMap for a sum of generating terms with y-supports."""

    def __init__(self, terms, label="generating"):
        self.terms = list(terms)
        self.label = label

    def _derivs(self, x, yp):
        acc = [np.zeros_like(yp) for _ in range(5)]
        for t in self.terms:
            lo, hi = t.support
            m = (yp > lo) & (yp < hi)
            if not np.any(m):
                continue
            parts = t.derivs(x[m], yp[m])
            for a, p in zip(acc, parts):
                a[m] += p
        return acc

    def _mask(self, y):
        m = np.zeros(y.shape, dtype=bool)
        for t in self.terms:
            lo, hi = t.support
            m |= (y > lo) & (y < hi)
        return m

    def _solve(self, x, y):
        yp = y.copy()
        for _ in range(_NEWTON_MAX):
            Wx, _, _, Wxy, _ = self._derivs(x, yp)
            step = (yp + Wx - y) / (1.0 + Wxy)
            yp -= step
            if np.all(np.abs(step) <= _NEWTON_TOL * np.maximum(1.0, np.abs(y))):
                break
        return yp

    def forward(self, x, y):
        X, Y = x.astype(float, copy=True), y.astype(float, copy=True)
        m = self._mask(y)
        if np.any(m):
            xm = x[m]
            yp = self._solve(xm, y[m])
            _, Wy, _, _, _ = self._derivs(xm, yp)
            X[m] = xm + Wy
            Y[m] = yp
        return X, Y

    def jacobian(self, x, y):
        return self.step(x, y)[2]

    def step(self, x, y):
        X, Y = x.astype(float, copy=True), y.astype(float, copy=True)
        J = np.zeros(x.shape + (2, 2))
        J[..., 0, 0] = 1.0
        J[..., 1, 1] = 1.0
        m = self._mask(y)
        if np.any(m):
            xm = x[m]
            yp = self._solve(xm, y[m])
            _, Wy, Wxx, Wxy, Wyy = self._derivs(xm, yp)
            X[m] = xm + Wy
            Y[m] = yp
            den = 1.0 + Wxy
            dyp_dx = -Wxx / den
            dyp_dy = 1.0 / den
            Jm = np.empty(xm.shape + (2, 2))
            Jm[..., 0, 0] = 1.0 + Wxy + Wyy * dyp_dx
            Jm[..., 0, 1] = Wyy * dyp_dy
            Jm[..., 1, 0] = dyp_dx
            Jm[..., 1, 1] = dyp_dy
            J[m] = Jm
        return X, Y, J

    def inverse(self, X, Y):
        x, y = X.astype(float, copy=True), Y.astype(float, copy=True)
        m = self._mask(Y)
        if np.any(m):
            Xm, yp = X[m], Y[m]
            xm = Xm.copy()
            for _ in range(_NEWTON_MAX):
                _, Wy, _, Wxy, _ = self._derivs(xm, yp)
                step = (xm + Wy - Xm) / (1.0 + Wxy)
                xm -= step
                if np.all(np.abs(step) <= _NEWTON_TOL * np.maximum(1.0, np.abs(Xm))):
                    break
            Wx, _, _, _, _ = self._derivs(xm, yp)
            x[m] = xm
            y[m] = yp + Wx
        return x, y

    def lifted(self, params=None) -> LiftedMap:
        return LiftedMap(self.forward, self.jacobian, self.inverse, label=self.label, params=params,
                         step=self.step)
