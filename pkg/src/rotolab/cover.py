"""Geometry of the annulus S^1 x R and its universal cover R^2."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Band:
    """Height truncation [y_min, y_max] of the infinite annulus."""

    y_min: float
    y_max: float

    def __post_init__(self):
        if not (math.isfinite(self.y_min) and math.isfinite(self.y_max)):
            raise ValueError("band limits must be finite")
        if not self.y_min < self.y_max:
            raise ValueError(f"empty band [{self.y_min}, {self.y_max}]")

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    def contains(self, y) -> np.ndarray:
        y = np.asarray(y)
        return (y >= self.y_min) & (y <= self.y_max)


@dataclass(frozen=True)
class DeckShift:
    k: int

    def __post_init__(self):
        if int(self.k) != self.k:
            raise ValueError("deck shifts are integral")


@dataclass(frozen=True)
class AnnulusPoint:
    x: float
    y: float

    def __post_init__(self):
        if not (0.0 <= self.x < 1.0):
            raise ValueError(f"circle coordinate {self.x} outside [0, 1)")
        if not math.isfinite(self.y):
            raise ValueError("height must be finite")


@dataclass(frozen=True)
class CoverPoint:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("cover coordinates must be finite")

    def __add__(self, other):
        if isinstance(other, DeckShift):
            return CoverPoint(self.x + other.k, self.y)
        if isinstance(other, CoverPoint):
            return CoverPoint(self.x + other.x, self.y + other.y)
        return NotImplemented

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y])


def circle_coord(x):
    """Reduce abscissas to [0, 1); works on scalars and arrays."""
    r = np.mod(x, 1.0)
    # np.mod returns exactly 1.0 for tiny negative inputs
    r = np.where(r >= 1.0, 0.0, r)
    return float(r) if r.ndim == 0 else r


def project(p: CoverPoint) -> AnnulusPoint:
    return AnnulusPoint(circle_coord(p.x), p.y)


def lift_near(a: AnnulusPoint, base: CoverPoint) -> CoverPoint:
    """Lift of ``a`` closest to ``base``; a tie at distance 1/2 goes upward."""
    offset = a.x - base.x
    # representative of offset in (-1/2, 1/2]
    r = offset - math.ceil(offset - 0.5)
    return CoverPoint(base.x + r, a.y)


def displacement(p: CoverPoint, q: CoverPoint) -> float:
    """Horizontal displacement pi_1(q) - pi_1(p)."""
    return q.x - p.x


def circle_distance(x1, x2):
    """Distance on R/Z between abscissas (vectorized)."""
    d = np.abs(np.asarray(x1) - np.asarray(x2)) % 1.0
    return np.minimum(d, 1.0 - d)


def annulus_distance(x1, y1, x2, y2):
    """Euclidean distance on the flat annulus."""
    return np.hypot(circle_distance(x1, x2), np.asarray(y1) - np.asarray(y2))
