"""The explicit map families: twist, boundary dynamics, connectors, pushes, contractions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..cover import AnnulusPoint
from ..errors import ConstructionError
from ..smooth import Plateau, bump, smoothstep, smoothstep_integral
from .base import LiftedMap, compose_all
from .generating import BoundaryCircleTerm, GeneratingMap, StripKickTerm

_NEWTON_MAX = 60


def integrable_twist() -> LiftedMap:
    """T(x, y) = (x + y, y): the circle at height y rotates by y."""

    def forward(x, y):
        return x + y, y.copy()

    def inverse(x, y):
        return x - y, y.copy()

    def jac(x, y):
        J = np.zeros(np.shape(x) + (2, 2))
        J[..., 0, 0] = J[..., 0, 1] = J[..., 1, 1] = 1.0
        return J

    return LiftedMap(forward, jac, inverse, label="twist")


def _vertical_map(h, dh, label, params, h_inverse):
    def forward(x, y):
        return x.copy(), h(y)

    def jac(x, y):
        J = np.zeros(np.shape(x) + (2, 2))
        J[..., 0, 0] = 1.0
        J[..., 1, 1] = dh(y)
        return J

    def inverse(x, y):
        return x.copy(), h_inverse(y)

    return LiftedMap(forward, jac, inverse, label=label, params=params)


def _newton_invert(h, dh, target):
    y = np.array(target, dtype=float, copy=True)
    for _ in range(_NEWTON_MAX):
        step = (h(y) - target) / dh(y)
        y -= step
        if np.all(np.abs(step) <= 1e-15 * np.maximum(1.0, np.abs(target))):
            break
    return y


def exterior_dissipation(rate: float, ramp: float = 0.3, lower: float = 0.0, upper: float = 1.0) -> LiftedMap:
    """Vertical map equal to the identity on [lower, upper] that contracts outside.

    The derivative ramps from 1 at the band edges down to ``1 - rate``.
    """
    if not 0 < rate < 1:
        raise ConstructionError(f"exterior contraction rate {rate} outside (0, 1)")
    if ramp <= 0:
        raise ConstructionError("ramp must be positive")

    def h(y):
        return (y - rate * ramp * smoothstep_integral((y - upper) / ramp)
                + rate * ramp * smoothstep_integral((lower - y) / ramp))

    def dh(y):
        return 1.0 - rate * smoothstep((y - upper) / ramp)[0] - rate * smoothstep((lower - y) / ramp)[0]

    return _vertical_map(h, dh, "dissipation", {"rate": rate, "ramp": ramp},
                         lambda t: _newton_invert(h, dh, t))


@dataclass(frozen=True)
class BoundaryParams:
    """Positions and strengths of the boundary circle dynamics on C_0 and C_1.

    ``x0``/``p0`` are the saddle and the attracting point on C_0, ``x1``/``p1``
    their counterparts on C_1.  ``slope`` is the expansion rate minus one of
    the saddles along their circle.
    """

    x0: float = 0.0
    p0: float = 0.5
    x1: float = 0.5
    p1: float = 0.0
    slope0: float = 0.03
    slope1: float = 0.03
    width: float = 0.15
    exterior_rate: float = 0.5
    exterior_ramp: float = 0.3


def boundary_terms(bp: BoundaryParams):
    if not 0 < bp.width < 0.5:
        raise ConstructionError(f"boundary width {bp.width} must lie in (0, 1/2) so the neighborhoods stay disjoint")
    return [
        BoundaryCircleTerm(0.0, bp.x0, bp.p0, bp.slope0, bp.width),
        BoundaryCircleTerm(1.0, bp.x1, bp.p1, bp.slope1, bp.width),
    ]


def boundary_morse_smale(bp: BoundaryParams = BoundaryParams()) -> LiftedMap:
    """f1 = T o G o E.

    G is the exact area-preserving cotangent lift of the boundary circle maps
    near C_0 and C_1; E is the exterior dissipation. The map preserves area on
    the band [C_0, C_1] and both boundary circles are invariant.
    """
    terms = boundary_terms(bp)
    G = GeneratingMap(terms, label="boundary").lifted()
    E = exterior_dissipation(bp.exterior_rate, bp.exterior_ramp)
    f1 = compose_all(integrable_twist(), G, E)
    f1.label = "f1"
    f1.params = {f"boundary.{k}": v for k, v in bp.__dict__.items()}
    f1.terms = terms
    return f1


@dataclass(frozen=True)
class Strip:
    """Support (lo, hi) of one kick, its strength and phase; ``ramp`` is the
    width of the smooth cutoff at each end (half the strip when omitted)."""

    lo: float
    hi: float
    kick: float
    phase: float = 0.0
    ramp: Optional[float] = None


def connector_shear(strips, c1_budget=None) -> LiftedMap:
    """Area-preserving localized vertical shears, identity outside the strips."""
    strips = sorted(strips, key=lambda s: s.lo)
    for a, b in zip(strips, strips[1:]):
        if a.hi > b.lo:
            raise ConstructionError(f"connector strips ({a.lo},{a.hi}) and ({b.lo},{b.hi}) overlap")
    if c1_budget is not None:
        for s in strips:
            if abs(s.kick) > c1_budget:
                raise ConstructionError(f"kick {s.kick} exceeds the C1 allocation {c1_budget}")
    terms = [StripKickTerm(s.lo, s.hi, s.kick, s.phase, s.ramp) for s in strips]
    C = GeneratingMap(terms, label="connector").lifted(
        params={f"strip{i}": (s.lo, s.hi, s.kick, s.phase, s.ramp) for i, s in enumerate(strips)})
    C.strips = strips
    return C


@dataclass(frozen=True)
class BumpProfile:
    center: AnnulusPoint
    radius: float
    amplitude: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ConstructionError("bump radius must be positive")
        if self.amplitude < 0:
            raise ConstructionError("bump amplitude must be non-negative")

    def offsets(self, x, y):
        dx = np.asarray(x) - self.center.x
        dx = dx - np.round(dx)
        dy = np.asarray(y) - self.center.y
        return dx, dy

    def value(self, x, y):
        """amplitude * mu; mu is 1 at the center and vanishes off the open ball."""
        dx, dy = self.offsets(x, y)
        r = np.hypot(dx, dy)
        mu, _ = bump(r / self.radius)
        return self.amplitude * mu

    def gradient(self, x, y):
        dx, dy = self.offsets(x, y)
        r = np.hypot(dx, dy)
        _, dmu = bump(r / self.radius)
        safe = np.where(r > 0, r, 1.0)
        g = self.amplitude * dmu / self.radius / safe
        return g * dx, g * dy

    @property
    def max_slope(self) -> float:
        r = np.linspace(0, 1, 20001)
        return self.amplitude * float(np.max(np.abs(bump(r)[1]))) / self.radius


def bump_push(profile: BumpProfile, direction: str = "up") -> LiftedMap:
    """Vertical push by +-amplitude * mu inside the ball; exactly the identity outside."""
    if direction not in ("up", "down"):
        raise ValueError("direction is 'up' or 'down'")
    sgn = 1.0 if direction == "up" else -1.0
    if profile.max_slope >= 0.9:
        raise ConstructionError("bump too steep to be a diffeomorphism")

    def forward(x, y):
        return x.copy(), y + sgn * profile.value(x, y)

    def jac(x, y):
        gx, gy = profile.gradient(x, y)
        J = np.zeros(np.shape(x) + (2, 2))
        J[..., 0, 0] = 1.0
        J[..., 1, 0] = sgn * gx
        J[..., 1, 1] = 1.0 + sgn * gy
        return J

    def inverse(X, Y):
        y = np.array(Y, dtype=float, copy=True)
        for _ in range(_NEWTON_MAX):
            _, gy = profile.gradient(X, y)
            step = (y + sgn * profile.value(X, y) - Y) / (1.0 + sgn * gy)
            y -= step
            if np.all(np.abs(step) <= 1e-15 * np.maximum(1.0, np.abs(Y))):
                break
        return X.copy(), y

    return LiftedMap(forward, jac, inverse, label=f"bump_{direction}",
                     params={"center": (profile.center.x, profile.center.y),
                             "radius": profile.radius, "amplitude": profile.amplitude})


class ContractionProfile:
    """The height map of vertical_contraction(n).

    Its derivative is 1 - beta/n on [-1, 2], 1 + gamma/n on most of
    [-n, -1) and (2, n + 1], and 1 outside (-n, n + 1); gamma is fixed by
    requiring the total change of height to vanish.
    """

    ramp = 0.05

    def __init__(self, n: int):
        if n < 2:
            raise ConstructionError("vertical_contraction needs n >= 2")
        r = self.ramp
        self.n = n
        self.inner = Plateau(-1.0, 2.0, r)
        self.left = Plateau(-n + r, -1.0 - 2 * r, r)
        self.right = Plateau(2.0 + 2 * r, n + 1.0 - r, r)
        outer_mass = self.left.mass + self.right.mass
        self.beta = min(0.75, 0.95 * outer_mass / self.inner.mass)
        if self.beta <= 0.5:
            raise ConstructionError(f"cannot fit the contraction for n={n}")
        self.gamma = self.beta * self.inner.mass / outer_mass

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        acc = self.gamma * (self.left.integral(y) + self.right.integral(y)) - self.beta * self.inner.integral(y)
        return y + acc / self.n

    def derivative(self, y):
        q = self.gamma * (self.left(y)[0] + self.right(y)[0]) - self.beta * self.inner(y)[0]
        return 1.0 + q / self.n


def vertical_contraction(n: int) -> LiftedMap:
    """h_n(x, y) = (x, hhat_n(y)): contracts heights on [-1, 2], identity off (-n, n + 1)."""
    prof = ContractionProfile(n)
    m = _vertical_map(prof, prof.derivative, f"h_{n}", {"n": n, "beta": prof.beta, "gamma": prof.gamma},
                      lambda t: _newton_invert(prof, prof.derivative, t))
    m.profile = prof
    return m


def sup_perturbation(F: LiftedMap, eta: float, modes: int = 1) -> LiftedMap:
    """F plus a smooth deck-periodic displacement of sup-norm exactly ``eta``."""

    def disp(x, y):
        th = 2 * math.pi * modes * x
        return eta * np.sin(th) * np.cos(2 * math.pi * y), eta * np.cos(th) * np.cos(math.pi * y)

    def forward(x, y):
        X, Y = F.eval(x, y)
        dx, dy = disp(x, y)
        return X + dx, Y + dy

    def jac(x, y):
        J = F.jacobian(x, y).copy()
        th = 2 * math.pi * modes * x
        k = 2 * math.pi * modes
        J[..., 0, 0] += eta * k * np.cos(th) * np.cos(2 * math.pi * y)
        J[..., 0, 1] += -eta * 2 * math.pi * np.sin(th) * np.sin(2 * math.pi * y)
        J[..., 1, 0] += -eta * k * np.sin(th) * np.cos(math.pi * y)
        J[..., 1, 1] += -eta * math.pi * np.cos(th) * np.sin(math.pi * y)
        return J

    return LiftedMap(forward, jac, None, label=f"{F.label}+eta{eta:g}", params={**F.params, "eta": eta})
