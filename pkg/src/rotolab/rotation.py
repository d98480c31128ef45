"""Rotation numbers, finite-time rotation intervals and periodic-orbit search."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from .cover import AnnulusPoint, Band, project, CoverPoint
from .errors import OrbitEscape
from .grid import GridSet
from .maps.base import LiftedMap, OVERFLOW


@dataclass(frozen=True)
class RotationInterval:
    rho_min: float
    rho_max: float
    orbit_length: int
    sample_count: int
    stabilized: bool
    stabilization_gap: float
    caveat: str = "finite-time Birkhoff averages along single orbits"

    def __post_init__(self):
        if self.rho_min > self.rho_max:
            raise ValueError("rho_min exceeds rho_max")
        if self.stabilization_gap < 0:
            raise ValueError("negative stabilization gap")

    @property
    def length(self) -> float:
        return self.rho_max - self.rho_min

    def contains(self, lo: float, hi: float) -> bool:
        return self.rho_min <= lo and hi <= self.rho_max

    def to_dict(self) -> dict:
        return {"rho_min": self.rho_min, "rho_max": self.rho_max, "n": self.orbit_length,
                "samples": self.sample_count, "stabilized": self.stabilized,
                "gap": self.stabilization_gap, "caveat": self.caveat}


@dataclass(frozen=True)
class PeriodicOrbitWitness:
    point: AnnulusPoint
    period: int
    shift: int
    residual: float
    lift_x: float = 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["point"] = [self.point.x, self.point.y]
        return d


def _advance(F: LiftedMap, x, y, n: int, band: Optional[Band]):
    """Iterate a batch n times, checking the band after every step."""
    for k in range(n):
        x, y = F.eval(x, y)
        if band is not None and not np.all(band.contains(y)):
            raise OrbitEscape(f"orbit left the band [{band.y_min}, {band.y_max}] at step {k + 1}")
        if not np.all(np.abs(x) < OVERFLOW):
            raise OrbitEscape(f"abscissa overflow at step {k + 1}")
    return x, y


def orbit_rotation_number(F: LiftedMap, p: AnnulusPoint, n: int, band: Optional[Band] = None) -> float:
    """Average horizontal displacement of the lift of p over n steps."""
    if n < 1:
        raise ValueError("n must be at least 1")
    X, _ = _advance(F, np.array([p.x], float), np.array([p.y], float), n, band)
    return float((X[0] - p.x) / n)


def sample_points(K: GridSet, samples: int, seed: int = 0):
    """Deterministic start points: box centers and lower-left corners of K,
    plus the top corners of the highest row, shuffled by a fixed seed when
    more are available than requested."""
    cx, cy = K.centers()
    i, j = np.nonzero(K.mask)
    vx = i * K.h
    vy = K.band.y_min + j * K.h
    top = j == j.max() if len(j) else np.zeros(0, bool)
    px = np.concatenate([cx, vx, vx[top]])
    py = np.concatenate([cy, vy, vy[top] + K.h])
    if samples < len(px):
        pick = np.random.default_rng(seed).permutation(len(px))[:samples]
        px, py = px[pick], py[pick]
    return px, py


def rotation_interval(F: LiftedMap, K: GridSet, n_orbit: int, samples: int, seed: int = 0,
                      tol: float = 0.02, check_band: bool = True) -> RotationInterval:
    """Extremes of finite-time displacement averages at n_orbit and 2 n_orbit.

    The reported interval is the one at 2 n_orbit; ``stabilized`` compares it
    with the n_orbit interval in the Hausdorff distance.
    """
    if not K:
        raise ValueError("K is empty")
    if n_orbit < 1:
        raise ValueError("n_orbit must be at least 1")
    x0, y0 = sample_points(K, samples, seed)
    band = K.band if check_band else None
    x1, y1 = _advance(F, x0, y0, n_orbit, band)
    r1 = (x1 - x0) / n_orbit
    x2, _ = _advance(F, x1, y1, n_orbit, band)
    r2 = (x2 - x0) / (2 * n_orbit)
    gap = float(max(abs(r1.min() - r2.min()), abs(r1.max() - r2.max())))
    return RotationInterval(float(r2.min()), float(r2.max()), 2 * n_orbit, int(len(x0)),
                            gap < tol, gap)


def _power_step(F: LiftedMap, x, y, q: int):
    J = np.broadcast_to(np.eye(2), np.shape(x) + (2, 2)).copy()
    for _ in range(q):
        x, y, Jk = F.step(x, y)
        J = Jk @ J
    return x, y, J


def find_periodic(F: LiftedMap, p: int, q: int, seeds: Sequence[AnnulusPoint], tol: float = 1e-10,
                  max_iter: int = 60) -> Optional[PeriodicOrbitWitness]:
    """Damped Newton search for F^q(z) = z + (p, 0), started from every seed.

    Steps use the pseudo-inverse of D(F^q) - I so that degenerate directions
    (families of periodic points) are handled.  Returns the best witness
    whose residual is below ``tol``, or None.
    """
    if q < 1:
        raise ValueError("period must be at least 1")
    if len(seeds) == 0:
        return None
    x = np.array([s.x for s in seeds], float)
    y = np.array([s.y for s in seeds], float)

    def residual(x, y):
        X, Y = _advance(F, x, y, q, None)
        return X - x - p, Y - y

    with np.errstate(all="ignore"):
        for _ in range(max_iter):
            X, Y, J = _power_step(F, x, y, q)
            gx, gy = X - x - p, Y - y
            r = np.hypot(gx, gy)
            if np.all(~np.isfinite(r) | (r < tol * 1e-2)):
                break
            M = J - np.eye(2)
            M = np.where(np.isfinite(M), M, 0.0)
            step = -np.einsum("nij,nj->ni", np.linalg.pinv(M, rcond=1e-10), np.stack([gx, gy], -1))
            t = np.ones_like(r)
            done = np.zeros(r.shape, bool)
            for _ in range(30):
                nx_, ny_ = x + t * step[:, 0], y + t * step[:, 1]
                rx, ry = residual(nx_, ny_)
                ok = (np.hypot(rx, ry) < r) | done
                done |= ok
                if done.all():
                    break
                t = np.where(done, t, 0.5 * t)
            x = np.where(done, x + t * step[:, 0], x)
            y = np.where(done, y + t * step[:, 1], y)
        gx, gy = residual(x, y)
        r = np.hypot(gx, gy)
    r = np.where(np.isfinite(r), r, np.inf)
    k = int(np.argmin(r))
    if not r[k] < tol:
        return None
    pt = project(CoverPoint(float(x[k]), float(y[k])))
    return PeriodicOrbitWitness(pt, q, p, float(r[k]), float(x[k]))
