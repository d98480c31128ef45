"""Lifted annulus maps on the universal cover and their calculus."""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from ..cover import CoverPoint
from ..errors import OrbitOverflow

FD_STEP = 1e-6
OVERFLOW = 1e12

Forward = Callable[[np.ndarray, np.ndarray], tuple]
Jacobian = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _as_arrays(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.broadcast_arrays(x, y)


def fd_jacobian(forward: Forward, x, y, h: float = FD_STEP) -> np.ndarray:
    """Central-difference Jacobian, shape ``x.shape + (2, 2)``."""
    x, y = _as_arrays(x, y)
    xp, yp = forward(x + h, y)
    xm, ym = forward(x - h, y)
    xq, yq = forward(x, y + h)
    xr, yr = forward(x, y - h)
    J = np.empty(x.shape + (2, 2))
    J[..., 0, 0] = (xp - xm) / (2 * h)
    J[..., 1, 0] = (yp - ym) / (2 * h)
    J[..., 0, 1] = (xq - xr) / (2 * h)
    J[..., 1, 1] = (yq - yr) / (2 * h)
    return J


class LiftedMap:
    """A lift F: R^2 -> R^2 of an annulus map, with F(x + 1, y) = F(x, y) + (1, 0).

    ``forward`` and ``jacobian`` act on broadcastable coordinate arrays.
    When no analytic Jacobian is supplied, central differences with step
    ``fd_step`` are used.
    """

    def __init__(
        self,
        forward: Forward,
        jacobian: Optional[Jacobian] = None,
        inverse: Optional[Forward] = None,
        label: str = "map",
        params: Optional[dict] = None,
        fd_step: float = FD_STEP,
        step: Optional[Callable] = None,
    ):
        self._forward = forward
        self._jacobian = jacobian
        self._step = step
        self._inverse = inverse
        self.label = label
        self.params = dict(params or {})
        self.fd_step = fd_step

    def __repr__(self):
        return f"LiftedMap({self.label!r})"

    @property
    def analytic_jacobian(self) -> bool:
        return self._jacobian is not None

    @property
    def invertible(self) -> bool:
        return self._inverse is not None

    def eval(self, x, y):
        x, y = _as_arrays(x, y)
        return self._forward(x, y)

    def jacobian(self, x, y) -> np.ndarray:
        x, y = _as_arrays(x, y)
        if self._jacobian is not None:
            return self._jacobian(x, y)
        return fd_jacobian(self._forward, x, y, self.fd_step)

    def step(self, x, y):
        """Image and Jacobian in one pass: ``(X, Y, J)``."""
        x, y = _as_arrays(x, y)
        if self._step is not None:
            return self._step(x, y)
        X, Y = self._forward(x, y)
        return X, Y, self.jacobian(x, y)

    def fd_jacobian(self, x, y, h: Optional[float] = None) -> np.ndarray:
        return fd_jacobian(self._forward, x, y, h or self.fd_step)

    def inverse_eval(self, x, y):
        if self._inverse is None:
            raise NotImplementedError(f"{self.label} has no inverse")
        x, y = _as_arrays(x, y)
        return self._inverse(x, y)

    def __call__(self, p: CoverPoint) -> CoverPoint:
        X, Y = self.eval(p.x, p.y)
        return CoverPoint(float(X), float(Y))

    def inverse(self) -> "LiftedMap":
        if self._inverse is None:
            raise NotImplementedError(f"{self.label} has no inverse")
        fwd = self._forward

        def jac(x, y):
            X, Y = self._inverse(x, y)
            return np.linalg.inv(self.jacobian(X, Y))

        return LiftedMap(self._inverse, jac, fwd, label=f"{self.label}^-1", params=self.params)

    def shifted(self, k: float) -> "LiftedMap":
        """The lift F + (k, 0); another lift of the same annulus map when k is integral."""
        fwd, inv = self._forward, self._inverse

        def forward(x, y):
            X, Y = fwd(x, y)
            return X + k, Y

        inverse = None
        if inv is not None:
            def inverse(x, y):
                return inv(x - k, y)

        step = None
        if self._step is not None:
            def step(x, y):
                X, Y, J = self._step(x, y)
                return X + k, Y, J

        return LiftedMap(forward, self._jacobian, inverse, label=f"{self.label}+{k}",
                         params=self.params, fd_step=self.fd_step, step=step)

    def power(self, n: int) -> "LiftedMap":
        """F^n as a single map (chain-rule Jacobian)."""
        if n < 0:
            raise ValueError("negative power; use inverse()")
        result = identity()
        for _ in range(n):
            result = compose(self, result)
        result.label = f"{self.label}^{n}"
        return result


def identity() -> LiftedMap:
    def forward(x, y):
        return x.copy(), y.copy()

    def jac(x, y):
        J = np.zeros(np.shape(x) + (2, 2))
        J[..., 0, 0] = 1.0
        J[..., 1, 1] = 1.0
        return J

    return LiftedMap(forward, jac, forward, label="identity")


def compose(outer: LiftedMap, inner: LiftedMap) -> LiftedMap:
    """outer o inner, with the chain-rule Jacobian."""

    def forward(x, y):
        return outer._forward(*inner._forward(x, y))

    def jac(x, y):
        X, Y = inner._forward(x, y)
        return outer.jacobian(X, Y) @ inner.jacobian(x, y)

    inverse = None
    if outer._inverse is not None and inner._inverse is not None:
        def inverse(x, y):
            return inner._inverse(*outer._inverse(x, y))

    def step(x, y):
        X, Y, J1 = inner.step(x, y)
        X2, Y2, J2 = outer.step(X, Y)
        return X2, Y2, J2 @ J1

    analytic = outer.analytic_jacobian and inner.analytic_jacobian
    return LiftedMap(forward, jac if analytic else None, inverse,
                     label=f"{outer.label}o{inner.label}",
                     params={**inner.params, **outer.params},
                     step=step if analytic else None)


def compose_all(*maps: LiftedMap) -> LiftedMap:
    """compose_all(f, g, h) = f o g o h."""
    if not maps:
        raise ValueError("compose_all needs at least one map")
    result = maps[-1]
    for m in reversed(maps[:-1]):
        result = compose(m, result)
    return result


def orbit_arrays(F: LiftedMap, x, y, n: int, inverse: bool = False):
    """Orbit of a batch of points; returns arrays of shape ``(n + 1,) + x.shape``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    x, y = _as_arrays(x, y)
    step = F.inverse_eval if inverse else F.eval
    xs = np.empty((n + 1,) + x.shape)
    ys = np.empty((n + 1,) + x.shape)
    xs[0], ys[0] = x, y
    for k in range(n):
        xs[k + 1], ys[k + 1] = step(xs[k], ys[k])
        if not (np.all(np.abs(xs[k + 1]) < OVERFLOW) and np.all(np.abs(ys[k + 1]) < OVERFLOW)):
            raise OrbitOverflow(f"orbit exceeded {OVERFLOW:g} at step {k + 1} under {F.label}")
    return xs, ys


def iterate(F: LiftedMap, p: CoverPoint, n: int) -> list:
    """[p, F(p), ..., F^n(p)] on the cover; abscissas are never reduced mod 1."""
    xs, ys = orbit_arrays(F, p.x, p.y, n)
    return [CoverPoint(float(a), float(b)) for a, b in zip(xs, ys)]


def deck_defect(F: LiftedMap, x, y) -> float:
    """max |F(p + (1,0)) - F(p) - (1,0)| over the given sample points."""
    X0, Y0 = F.eval(x, y)
    X1, Y1 = F.eval(np.asarray(x) + 1.0, y)
    return float(max(np.max(np.abs(X1 - X0 - 1.0)), np.max(np.abs(Y1 - Y0))))
