"""Set-oriented outer approximation of trapped attractors.

The enclosure of a box image is the bounding rectangle of five sample images
(corners and center), grown by the largest sampled Jacobian norm times the box
diagonal and never by less than one box.  This is sound in practice for smooth
maps but carries no directed rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import BudgetExceeded, EnclosureEscape, PreconditionError
from .grid import GridSet
from .maps.base import LiftedMap

_CHUNK = 200_000


def _spectral_norm(J):
    """Largest singular value of stacked 2x2 matrices (closed form)."""
    a, b, c, d = J[..., 0, 0], J[..., 0, 1], J[..., 1, 0], J[..., 1, 1]
    s = a * a + b * b + c * c + d * d
    det = a * d - b * c
    return np.sqrt(0.5 * (s + np.sqrt(np.maximum(s * s - 4.0 * det * det, 0.0))))


@dataclass
class Enclosures:
    """Per-box index rectangles of the enclosed images, inclusive bounds.

    ``i0``/``i1`` are unwrapped column indices; ``escaped`` marks boxes whose
    enclosure left the band vertically.
    """

    i0: np.ndarray
    i1: np.ndarray
    j0: np.ndarray
    j1: np.ndarray
    escaped: np.ndarray
    lipschitz: np.ndarray


def box_enclosures(F: LiftedMap, S: GridSet, margin_factor: float = 1.0,
                   min_margin_boxes: float = 1.0) -> Enclosures:
    """Enclosure rectangles for every box of ``S`` in row-major index order."""
    xs, ys = S.corners_and_centers()
    nb = xs.shape[0]
    i0 = np.empty(nb, np.int64)
    i1 = np.empty(nb, np.int64)
    j0 = np.empty(nb, np.int64)
    j1 = np.empty(nb, np.int64)
    lip = np.empty(nb)
    h = S.h
    for start in range(0, nb, _CHUNK):
        sl = slice(start, min(nb, start + _CHUNK))
        X, Y, J = F.step(xs[sl], ys[sl])
        L = _spectral_norm(J).max(axis=1)
        m = np.maximum(margin_factor * L * S.diagonal, min_margin_boxes * h)
        i0[sl] = np.floor((X.min(axis=1) - m) / h)
        # closed boxes: an upper edge that lands on a grid line stays in the lower box
        i1[sl] = np.ceil((X.max(axis=1) + m) / h) - 1
        j0[sl] = np.floor((Y.min(axis=1) - m - S.band.y_min) / h)
        j1[sl] = np.ceil((Y.max(axis=1) + m - S.band.y_min) / h) - 1
        lip[sl] = L
    escaped = (j0 < 0) | (j1 >= S.ny)
    return Enclosures(i0, i1, np.clip(j0, 0, S.ny - 1), np.clip(j1, 0, S.ny - 1), escaped, lip)


def rasterize(S: GridSet, enc: Enclosures, select=None) -> GridSet:
    """Union of enclosure rectangles (optionally a subset) as a grid set."""
    nx, ny = S.nx, S.ny
    if select is not None:
        i0, i1, j0, j1 = enc.i0[select], enc.i1[select], enc.j0[select], enc.j1[select]
    else:
        i0, i1, j0, j1 = enc.i0, enc.i1, enc.j0, enc.j1
    full = (i1 - i0 + 1) >= nx
    a = np.where(full, 0, i0 % nx)
    b = np.where(full, nx - 1, a + (i1 - i0))
    wrap = b >= nx
    # pieces: [a, min(b, nx-1)] and, when wrapping, [0, b - nx]
    ra = np.concatenate([a, np.zeros(wrap.sum(), np.int64)])
    rb = np.concatenate([np.minimum(b, nx - 1), b[wrap] - nx])
    rj0 = np.concatenate([j0, j0[wrap]])
    rj1 = np.concatenate([j1, j1[wrap]])
    diff = np.zeros((nx + 1, ny + 1), np.int64)
    np.add.at(diff, (ra, rj0), 1)
    np.add.at(diff, (rb + 1, rj0), -1)
    np.add.at(diff, (ra, rj1 + 1), -1)
    np.add.at(diff, (rb + 1, rj1 + 1), 1)
    cover = diff.cumsum(axis=0).cumsum(axis=1)[:nx, :ny] > 0
    return S.like(cover)


def image_cover(F: LiftedMap, S: GridSet, lipschitz_margin: float = 1.0) -> GridSet:
    """Outer cover of F(S).

    ``lipschitz_margin`` scales the per-box dilation (sampled Jacobian norm
    times box diagonal); the dilation is never below one box.  Raises
    EnclosureEscape if an enclosure leaves the band.
    """
    if not S:
        return S.like()
    enc = box_enclosures(F, S, lipschitz_margin)
    if enc.escaped.any():
        k = int(np.flatnonzero(enc.escaped)[0])
        i, j = S.indices()[k]
        raise EnclosureEscape(f"image of box ({i}, {j}) leaves the band "
                              f"[{S.band.y_min}, {S.band.y_max}]")
    return rasterize(S, enc)


def check_trap(F: LiftedMap, A: GridSet, lipschitz_margin: float = 1.0) -> bool:
    """True iff the enclosure of F(A) lies inside A shrunk by one box."""
    try:
        img = image_cover(F, A, lipschitz_margin)
    except EnclosureEscape:
        return False
    return img.issubset(A.erode(1))


@dataclass
class AttractorTrace:
    """Box counts per depth and the number of contraction sweeps used."""

    depths: list = field(default_factory=list)
    boxes: list = field(default_factory=list)
    sweeps: list = field(default_factory=list)
    max_lipschitz: float = 0.0


def attractor_approx(F: LiftedMap, A: GridSet, max_depth: int, box_cap: int = 4_000_000,
                     lipschitz_margin: float = 1.0, max_sweeps: int = 500,
                     require_trap: bool = True, trace: AttractorTrace | None = None) -> GridSet:
    """Outer cover of the maximal attractor inside the trapping region A.

    At each depth S is replaced by image_cover(S) ∩ S until nothing changes,
    then every box is split in four.  The enclosure rectangles are computed
    once per depth and reused by every sweep.
    """
    if max_depth < A.depth:
        raise ValueError("max_depth below the depth of A")
    if require_trap and not check_trap(F, A, lipschitz_margin):
        raise PreconditionError("A is not mapped into its interior")
    S = A.copy()
    while True:
        if len(S) > box_cap:
            raise BudgetExceeded(f"{len(S)} boxes exceed the cap {box_cap} at depth {S.depth}", S)
        enc = box_enclosures(F, S, lipschitz_margin)
        if enc.escaped.any():
            raise EnclosureEscape(f"enclosure leaves the band at depth {S.depth}")
        # position of each box of the current set inside the cached arrays
        order = np.full(S.mask.shape, -1, np.int64)
        order[S.mask] = np.arange(len(S))
        sweeps = 0
        while sweeps < max_sweeps:
            sweeps += 1
            sel = order[S.mask]
            nxt = rasterize(S, enc, sel) & S
            if nxt == S:
                break
            S = nxt
        if trace is not None:
            trace.depths.append(S.depth)
            trace.boxes.append(len(S))
            trace.sweeps.append(sweeps)
            trace.max_lipschitz = max(trace.max_lipschitz, float(enc.lipschitz.max(initial=0.0)))
        if S.depth >= max_depth:
            return S
        S = S.refine()


@dataclass
class ComplementAnalysis:
    """Components of the band minus a grid set.

    ``upper_component``/``lower_component`` collect the components meeting
    the top/bottom edge of the band.  Interior of the analysed set cannot be
    decided from a cover, so ``interior`` is always "undetermined".
    """

    upper_component: GridSet
    lower_component: GridSet
    bounded_components: list
    essential: bool
    interior: str = "undetermined"

    @property
    def bounded_area(self) -> float:
        return float(sum(c.area for c in self.bounded_components))

    def summary(self) -> dict:
        return {
            "essential": self.essential,
            "upper_boxes": len(self.upper_component),
            "lower_boxes": len(self.lower_component),
            "bounded_components": len(self.bounded_components),
            "bounded_area": self.bounded_area,
            "interior": self.interior,
        }


def _wrap_labels(mask, connectivity: int = 4):
    """Connected-component labels with the circle direction (axis 0) wrapped.

    ``connectivity`` is 4 (edge neighbours) or 8 (edge and corner neighbours).
    """
    structure = ndimage.generate_binary_structure(2, 1 if connectivity == 4 else 2)
    lab, n = ndimage.label(mask, structure=structure)
    if n == 0:
        return lab, 0
    a, b = lab[0], lab[-1]
    rows, cols = [a[(a > 0) & (b > 0)]], [b[(a > 0) & (b > 0)]]
    if connectivity == 8:
        rows += [a[1:][(a[1:] > 0) & (b[:-1] > 0)], a[:-1][(a[:-1] > 0) & (b[1:] > 0)]]
        cols += [b[:-1][(a[1:] > 0) & (b[:-1] > 0)], b[1:][(a[:-1] > 0) & (b[1:] > 0)]]
    rows = np.concatenate(rows) - 1
    cols = np.concatenate(cols) - 1
    g = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    ncomp, comp = connected_components(g, directed=False)
    out = np.zeros_like(lab)
    out[lab > 0] = comp[lab[lab > 0] - 1] + 1
    return out, ncomp


def components(S: GridSet, connectivity: int = 4) -> list:
    """Wrap-aware connected components of S as grid sets."""
    lab, n = _wrap_labels(S.mask, connectivity)
    return [S.like(lab == k) for k in range(1, n + 1)]


def analyze_complement(S: GridSet) -> ComplementAnalysis:
    free = ~S.mask
    lab, n = _wrap_labels(free)
    top = set(np.unique(lab[:, -1])) - {0}
    bottom = set(np.unique(lab[:, 0])) - {0}
    upper = S.like(np.isin(lab, list(top)))
    lower = S.like(np.isin(lab, list(bottom)))
    bounded = [S.like(lab == k) for k in range(1, n + 1) if k not in top and k not in bottom]
    essential = bool(top) and bool(bottom) and not (top & bottom)
    return ComplementAnalysis(upper, lower, bounded, essential)
