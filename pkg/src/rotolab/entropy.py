"""Topological entropy brackets.

The upper bound is (2/n) log max ||DF^n|| over sampled points of a region.
Lower bounds come from horseshoe certificates.  The separated-set estimator
is a diagnostic only and certifies nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .attractor import _spectral_norm
from .errors import InconsistentBracket, OrbitEscape
from .grid import GridSet
from .maps.base import LiftedMap

REORTHO_EVERY = 32


def region_samples(region: GridSet, max_samples: Optional[int] = None, seed: int = 0):
    """Box corners and centers of the region, subsampled by a fixed-seed
    shuffle when there are more than ``max_samples``."""
    xs, ys = region.corners_and_centers()
    xs, ys = xs.ravel(), ys.ravel()
    if max_samples is not None and len(xs) > max_samples:
        pick = np.random.default_rng(seed).permutation(len(xs))[:max_samples]
        xs, ys = xs[pick], ys[pick]
    return xs, ys


def log_norm_growth(F: LiftedMap, x, y, n: int, band=None) -> np.ndarray:
    """log ||DF^n(x, y)||_2 for each point, via chained Jacobians.

    The running product is QR-factored every few steps; the scale of R is
    moved into a log accumulator so long products neither overflow nor lose
    their small directions to roundoff.
    """
    x = np.asarray(x, float).ravel()
    y = np.asarray(y, float).ravel()
    M = np.broadcast_to(np.eye(2), x.shape + (2, 2)).copy()
    logscale = np.zeros(x.shape)
    for k in range(1, n + 1):
        x, y, J = F.step(x, y)
        if band is not None and not np.all(band.contains(y)):
            raise OrbitEscape(f"sample orbit left the band at step {k}")
        M = J @ M
        if k % REORTHO_EVERY == 0 or k == n:
            Q, R = np.linalg.qr(M)
            s = np.abs(R).max(axis=(-2, -1))
            s = np.where(s > 0, s, 1.0)
            logscale += np.log(s)
            M = Q @ (R / s[:, None, None])
    return np.log(_spectral_norm(M)) + logscale


def norm_growth_upper(F: LiftedMap, region: GridSet, n: int, max_samples: Optional[int] = None,
                      seed: int = 0, check_band: bool = True) -> float:
    """(2/n) log of the largest sampled ||DF^n||_2 over region samples."""
    if n < 1:
        raise ValueError("n must be at least 1")
    xs, ys = region_samples(region, max_samples, seed)
    g = log_norm_growth(F, xs, ys, n, region.band if check_band else None)
    return max(0.0, 2.0 * float(g.max()) / n)


@dataclass
class SeparatedRow:
    n: int
    eps: float
    count: int
    survivors: int

    @property
    def rate(self) -> float:
        return math.log(self.count) / self.n if self.count > 0 else 0.0

    def to_dict(self) -> dict:
        return {"n": self.n, "eps": self.eps, "count": self.count, "survivors": self.survivors,
                "rate": self.rate, "certified": False}


def _greedy_separated(dx, dy, eps):
    """Greedy maximal set for the Bowen metric; dx, dy have shape (n, points)."""
    chosen = []
    for p in range(dx.shape[1]):
        if chosen:
            c = np.array(chosen)
            ex = np.abs(dx[:, c] - dx[:, p:p + 1])
            ex = np.minimum(ex, 1.0 - ex)
            ey = np.abs(dy[:, c] - dy[:, p:p + 1])
            if np.any(np.max(np.hypot(ex, ey), axis=0) < eps):
                continue
        chosen.append(p)
    return len(chosen)


def separated_set_estimate(F: LiftedMap, region: GridSet, n_list: Sequence[int],
                           eps_list: Sequence[float], cloud: int = 4000, seed: int = 0) -> list:
    """log(count)/n for greedy (n, eps)-separated subsets of a random cloud.

    Only cloud points whose first n iterates stay in the region compete, so
    the estimate concerns the dynamics restricted to the region.
    """
    rng = np.random.default_rng(seed)
    i, j = np.nonzero(region.mask)
    pick = rng.integers(0, len(i), cloud)
    x = (i[pick] + rng.random(cloud)) * region.h
    y = region.band.y_min + (j[pick] + rng.random(cloud)) * region.h
    nmax = max(n_list)
    xs = np.empty((nmax, cloud))
    ys = np.empty((nmax, cloud))
    inside = np.empty((nmax, cloud), bool)
    cx, cy = x, y
    for k in range(nmax):
        xs[k], ys[k] = np.mod(cx, 1.0), cy
        inside[k] = region.contains_points(cx, cy)
        cx, cy = F.eval(cx, cy)
    rows = []
    for n in n_list:
        alive = inside[:n].all(axis=0)
        for eps in eps_list:
            cnt = _greedy_separated(xs[:n, alive], ys[:n, alive], eps) if alive.any() else 0
            rows.append(SeparatedRow(int(n), float(eps), cnt, int(alive.sum())))
    return rows


@dataclass
class EntropyBracket:
    lower: float
    upper: float
    n_used: int
    region: GridSet = field(repr=False)
    estimator_diag: list = field(default_factory=list)
    certificate_ref: Optional[dict] = None

    def __post_init__(self):
        if self.lower < 0:
            raise ValueError("negative lower bound")

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "n": self.n_used,
                "certificate_ref": self.certificate_ref,
                "estimator_table": [r.to_dict() for r in self.estimator_diag]}


def bracket(F: LiftedMap, region: GridSet, cert=None, n: int = 64, tol: float = 1e-9,
            max_samples: Optional[int] = None, estimator=None, seed: int = 0) -> EntropyBracket:
    """Pair a certificate lower bound with the norm-growth upper bound.

    ``estimator`` is an optional (n_list, eps_list) pair for the separated-set
    diagnostic.  Raises InconsistentBracket if lower exceeds upper.
    """
    lower = float(cert.entropy_lower) if cert is not None else 0.0
    upper = norm_growth_upper(F, region, n, max_samples=max_samples, seed=seed)
    if lower > upper + tol:
        raise InconsistentBracket(f"certificate lower bound {lower:.6g} exceeds upper bound {upper:.6g} at n={n}")
    diag = separated_set_estimate(F, region, *estimator, seed=seed) if estimator else []
    ref = cert.to_dict() if cert is not None else None
    return EntropyBracket(lower, upper, n, region, diag, ref)
