"""Finite unions of dyadic boxes over a truncated annulus band."""

from __future__ import annotations

import math
import struct
import zlib

import numpy as np

from .cover import Band

_MAGIC = b"RGS1"


def _rows(band: Band, depth: int) -> int:
    ny = band.height * 2 ** depth
    if abs(ny - round(ny)) > 1e-9 or round(ny) < 1:
        raise ValueError(f"band {band} is not a whole number of depth-{depth} boxes high")
    return int(round(ny))


class GridSet:
    """Boxes of side 2^-depth covering part of S^1 x band.

    Box (i, j) is [i h, (i + 1) h] x [y_min + j h, y_min + (j + 1) h] with
    h = 2^-depth; i wraps modulo 2^depth.  Stored as a boolean mask of shape
    (2^depth, rows).
    """

    def __init__(self, band: Band, depth: int, mask=None):
        if depth < 0:
            raise ValueError("depth must be non-negative")
        self.band = band
        self.depth = int(depth)
        self.nx = 2 ** self.depth
        self.ny = _rows(band, self.depth)
        if mask is None:
            mask = np.zeros((self.nx, self.ny), dtype=bool)
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (self.nx, self.ny):
            raise ValueError(f"mask shape {mask.shape} != {(self.nx, self.ny)}")
        self.mask = mask

    # construction -------------------------------------------------------

    @classmethod
    def full(cls, band: Band, depth: int) -> "GridSet":
        g = cls(band, depth)
        g.mask[:] = True
        return g

    @classmethod
    def from_indices(cls, band: Band, depth: int, indices) -> "GridSet":
        g = cls(band, depth)
        idx = np.asarray(indices, dtype=int).reshape(-1, 2)
        if len(idx):
            if np.any((idx[:, 1] < 0) | (idx[:, 1] >= g.ny)):
                raise ValueError("height index out of range")
            g.mask[idx[:, 0] % g.nx, idx[:, 1]] = True
        return g

    @classmethod
    def from_predicate(cls, band: Band, depth: int, pred) -> "GridSet":
        """Boxes whose center satisfies ``pred(x, y)``."""
        g = cls.full(band, depth)
        cx, cy = g.centers()
        g.mask[g.mask] = np.asarray(pred(cx, cy), dtype=bool)
        return g

    @classmethod
    def horizontal_band(cls, band: Band, depth: int, lo: float, hi: float) -> "GridSet":
        """Boxes meeting S^1 x [lo, hi]."""
        g = cls(band, depth)
        j0 = max(0, int(math.floor((lo - band.y_min) / g.h + 1e-9)))
        j1 = min(g.ny, int(math.ceil((hi - band.y_min) / g.h - 1e-9)))
        g.mask[:, j0:j1] = True
        return g

    @classmethod
    def from_points(cls, band: Band, depth: int, x, y) -> "GridSet":
        g = cls(band, depth)
        i, j = g.locate(x, y)
        ok = (j >= 0) & (j < g.ny)
        g.mask[i[ok], j[ok]] = True
        return g

    def like(self, mask=None) -> "GridSet":
        return GridSet(self.band, self.depth, np.zeros_like(self.mask) if mask is None else mask)

    def copy(self) -> "GridSet":
        return GridSet(self.band, self.depth, self.mask.copy())

    # geometry -----------------------------------------------------------

    @property
    def h(self) -> float:
        return 2.0 ** -self.depth

    @property
    def diagonal(self) -> float:
        return self.h * math.sqrt(2.0)

    def __len__(self):
        return int(self.mask.sum())

    def __bool__(self):
        return bool(self.mask.any())

    def __eq__(self, other):
        return (isinstance(other, GridSet) and self.band == other.band and self.depth == other.depth
                and np.array_equal(self.mask, other.mask))

    def __repr__(self):
        return f"GridSet(depth={self.depth}, band=[{self.band.y_min}, {self.band.y_max}], boxes={len(self)})"

    def indices(self) -> np.ndarray:
        """Sorted (i, j) pairs of the boxes."""
        return np.argwhere(self.mask)

    def centers(self):
        i, j = np.nonzero(self.mask)
        return (i + 0.5) * self.h, self.band.y_min + (j + 0.5) * self.h

    def corners_and_centers(self):
        """Five samples per box (4 corners, center); arrays of shape (boxes, 5)."""
        i, j = np.nonzero(self.mask)
        x0 = i * self.h
        y0 = self.band.y_min + j * self.h
        ox = np.array([0.0, 1.0, 0.0, 1.0, 0.5]) * self.h
        oy = np.array([0.0, 0.0, 1.0, 1.0, 0.5]) * self.h
        return x0[:, None] + ox, y0[:, None] + oy

    def locate(self, x, y):
        """Box indices (i mod nx, j unclipped) of points; non-finite points get j = -1."""
        x, y = np.asarray(x, float), np.asarray(y, float)
        bad = ~(np.isfinite(x) & np.isfinite(y))
        if bad.any():
            x, y = np.where(bad, 0.0, x), np.where(bad, self.band.y_min - self.h, y)
        i = np.floor(np.mod(x, 1.0) / self.h).astype(np.int64) % self.nx
        y = np.clip(y, self.band.y_min - self.h, self.band.y_max + self.h)
        j = np.floor((y - self.band.y_min) / self.h).astype(np.int64)
        return i, j

    def contains_points(self, x, y) -> np.ndarray:
        i, j = self.locate(x, y)
        ok = (j >= 0) & (j < self.ny)
        out = np.zeros(np.shape(i), dtype=bool)
        out[ok] = self.mask[i[ok], j[ok]]
        return out

    @property
    def area(self) -> float:
        return len(self) * self.h * self.h

    def y_extent(self):
        js = np.nonzero(self.mask.any(axis=0))[0]
        if len(js) == 0:
            return None
        return self.band.y_min + js[0] * self.h, self.band.y_min + (js[-1] + 1) * self.h

    # set algebra --------------------------------------------------------

    def _check(self, other):
        if self.band != other.band or self.depth != other.depth:
            raise ValueError("grid sets live on different grids")

    def __or__(self, other):
        self._check(other)
        return self.like(self.mask | other.mask)

    def __and__(self, other):
        self._check(other)
        return self.like(self.mask & other.mask)

    def __sub__(self, other):
        self._check(other)
        return self.like(self.mask & ~other.mask)

    def complement(self) -> "GridSet":
        return self.like(~self.mask)

    def issubset(self, other) -> bool:
        self._check(other)
        return not np.any(self.mask & ~other.mask)

    def refine(self, levels: int = 1) -> "GridSet":
        m = self.mask
        for _ in range(levels):
            m = m.repeat(2, axis=0).repeat(2, axis=1)
        return GridSet(self.band, self.depth + levels, m)

    def coarsen(self, levels: int = 1) -> "GridSet":
        m = self.mask
        for _ in range(levels):
            m = m.reshape(m.shape[0] // 2, 2, m.shape[1] // 2, 2).any(axis=(1, 3))
        return GridSet(self.band, self.depth - levels, m)

    def dilate(self, k: int = 1) -> "GridSet":
        """Square (Chebyshev) dilation by k boxes; wraps in the circle direction."""
        m = self.mask
        for _ in range(k):
            r = m | np.roll(m, 1, axis=0) | np.roll(m, -1, axis=0)
            out = r.copy()
            out[:, 1:] |= r[:, :-1]
            out[:, :-1] |= r[:, 1:]
            m = out
        return self.like(m)

    def erode(self, k: int = 1) -> "GridSet":
        """Boxes whose k-ring lies inside the set; outside the band counts as outside."""
        return self.complement().dilate(k).complement() & self._interior_rows(k)

    def _interior_rows(self, k):
        g = self.like()
        g.mask[:, k:self.ny - k] = True
        return g

    # serialization ------------------------------------------------------

    def to_rle(self) -> bytes:
        """Compact binary: header, then zlib-compressed run lengths of the flattened mask."""
        flat = self.mask.ravel(order="F").astype(np.int8)
        change = np.flatnonzero(np.diff(flat)) + 1
        bounds = np.concatenate([[0], change, [flat.size]])
        runs = np.diff(bounds).astype(np.uint32)
        first = int(flat[0]) if flat.size else 0
        head = _MAGIC + struct.pack("<iddIB", self.depth, self.band.y_min, self.band.y_max, len(runs), first)
        return head + zlib.compress(runs.tobytes())

    @classmethod
    def from_rle(cls, data: bytes) -> "GridSet":
        if data[:4] != _MAGIC:
            raise ValueError("not a grid-set stream")
        size = struct.calcsize("<iddIB")
        depth, lo, hi, nruns, first = struct.unpack("<iddIB", data[4:4 + size])
        runs = np.frombuffer(zlib.decompress(data[4 + size:]), dtype=np.uint32)
        if len(runs) != nruns:
            raise ValueError("corrupt run table")
        g = cls(Band(lo, hi), depth)
        vals = (np.arange(nruns) + first) % 2
        flat = np.repeat(vals.astype(bool), runs)
        g.mask = flat.reshape((g.nx, g.ny), order="F")
        return g

    def to_svg(self, scale: float = 512.0, fill: str = "#1f4e79") -> str:
        """Boxes as rects; circle direction horizontal, height upward."""
        w = scale
        hpx = scale * self.band.height
        s = self.h * scale
        lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0f}" height="{hpx:.0f}" '
                 f'viewBox="0 0 {w:.3f} {hpx:.3f}">',
                 f'<rect width="{w:.3f}" height="{hpx:.3f}" fill="white"/>']
        # one rect per vertical run of boxes keeps large covers small
        padded = np.zeros((self.nx, self.ny + 2), dtype=np.int8)
        padded[:, 1:-1] = self.mask
        edges = np.diff(padded, axis=1)
        for (i, j0), (_, j1) in zip(np.argwhere(edges == 1), np.argwhere(edges == -1)):
            lines.append(f'<rect x="{i * s:.4f}" y="{hpx - j1 * s:.4f}" width="{s:.4f}" '
                         f'height="{(j1 - j0) * s:.4f}" fill="{fill}"/>')
        lines.append("</svg>")
        return "\n".join(lines)
