"""Rotational horseshoes via the adapted-rectangle crossing criterion.

Walls are connected grid continua joining the two boundary circles of a
trapping annulus A.  A component of A minus two disjoint walls is an adapted
rectangle R.  On the cover, if the n-th image of the left wall lies strictly
to the left of the closed lift of R and the n-th image of the right wall lies
strictly to the right of the lift translated by j, then F^n carries a
rotational horseshoe on j + 1 symbols with displacements 0..j.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.sparse import csr_matrix

from .attractor import _spectral_norm, _wrap_labels, check_trap, components
from .cover import AnnulusPoint, Band, CoverPoint
from .errors import BudgetExceeded, EnclosureEscape, PreconditionError
from .grid import GridSet
from .maps.base import LiftedMap
from .maps.families import sup_perturbation


# walls and rectangles ---------------------------------------------------------

def _touches(D: GridSet, A: GridSet):
    """Does D contain a cell on the lower / upper boundary of A?"""
    below = np.zeros_like(A.mask)
    below[:, 1:] = A.mask[:, :-1]
    above = np.zeros_like(A.mask)
    above[:, :-1] = A.mask[:, 1:]
    return bool(np.any(D.mask & ~below)), bool(np.any(D.mask & ~above))


def _joins_boundaries(C: GridSet, A: GridSet) -> bool:
    lo, hi = _touches(C, A)
    return lo and hi


@dataclass
class JoiningContinuum:
    cells: GridSet
    touches_lower: bool
    touches_upper: bool
    inessential: bool


def classify_joining(D: GridSet, A: GridSet) -> Optional[JoiningContinuum]:
    """Classify D as a continuum joining the boundaries of A, or return None.

    D must be 8-connected (closed boxes touching at a corner are connected),
    meet both boundary circles of A, and leave a complement in A that still
    joins the two boundaries.
    """
    if not D.issubset(A):
        raise PreconditionError("D is not contained in A")
    if not D or len(components(D, 8)) != 1:
        return None
    lo, hi = _touches(D, A)
    if not (lo and hi):
        return None
    inessential = any(_joins_boundaries(c, A) for c in components(A - D, 4))
    if not inessential:
        return None
    return JoiningContinuum(D, lo, hi, inessential)


_NEIGHBOURS = ((1, 0), (-1, 0), (0, 1), (0, -1))


def _unwrap(mask: np.ndarray, start, u0: int) -> dict:
    """Breadth-first lift of a connected cell set: (i, j) -> unwrapped column."""
    nx, ny = mask.shape
    lifted = {start: u0}
    queue = deque([start])
    while queue:
        i, j = queue.popleft()
        u = lifted[(i, j)]
        for di, dj in _NEIGHBOURS + ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            jj = j + dj
            if not 0 <= jj < ny:
                continue
            ii = (i + di) % nx
            if mask[ii, jj] and (ii, jj) not in lifted:
                lifted[(ii, jj)] = u + di
                queue.append((ii, jj))
    return lifted


def _as_arrays(lifted: dict):
    keys = np.array(list(lifted.keys()), dtype=np.int64).reshape(-1, 2)
    u = np.array(list(lifted.values()), dtype=np.int64)
    return u, keys[:, 1]


def _lift_adjacent(wall: GridSet, Ru, Rj, nx):
    """Lift of a wall touching the lifted rectangle cells, as (u, j) arrays."""
    for u, j in zip(Ru, Rj):
        for du in (-1, 0, 1):
            for dj in (-1, 0, 1):
                jj = j + dj
                if (du or dj) and 0 <= jj < wall.ny and wall.mask[(u + du) % nx, jj]:
                    start = (int((u + du) % nx), int(jj))
                    return _as_arrays(_unwrap(wall.mask, start, int(u + du)))
    return None


@dataclass
class AdaptedRectangle:
    """A lifted adapted rectangle with the lifts of its two walls.

    Cell coordinates are (unwrapped column, row) on the grid of ``cells``.
    """

    cells: GridSet
    A: GridSet
    left_wall: tuple = field(repr=False)
    right_wall: tuple = field(repr=False)
    lifted: tuple = field(repr=False)
    lift_anchor: CoverPoint = None

    @property
    def h(self) -> float:
        return self.cells.h

    def x_hull(self):
        u = self.lifted[0]
        return float(u.min() * self.h), float((u.max() + 1) * self.h)

    def y_hull(self):
        j = self.lifted[1]
        y0 = self.cells.band.y_min
        return float(y0 + j.min() * self.h), float(y0 + (j.max() + 1) * self.h)

    @property
    def kappa(self) -> float:
        x0, x1 = self.x_hull()
        y0, y1 = self.y_hull()
        return math.hypot(x1 - x0, y1 - y0)

    def contains_lifted(self, x, y, shift: int = 0) -> np.ndarray:
        """Whether cover points lie in the lifted rectangle translated by ``shift``."""
        u, j = self.lifted
        umin = int(u.min())
        table = np.zeros((int(u.max()) - umin + 1, self.cells.ny), bool)
        table[u - umin, j] = True
        cu = np.floor((np.asarray(x) - shift) / self.h).astype(np.int64) - umin
        cj = np.floor((np.asarray(y) - self.cells.band.y_min) / self.h).astype(np.int64)
        ok = (cu >= 0) & (cu < table.shape[0]) & (cj >= 0) & (cj < table.shape[1])
        out = np.zeros(np.shape(cu), bool)
        out[ok] = table[cu[ok], cj[ok]]
        return out

    def sample(self, count: int, rng) -> tuple:
        u, j = self.lifted
        k = rng.integers(0, len(u), count)
        x = (u[k] + rng.random(count)) * self.h
        y = self.cells.band.y_min + (j[k] + rng.random(count)) * self.h
        return x, y


def adapted_rectangle(D0: JoiningContinuum, D1: JoiningContinuum, A: GridSet) -> Optional[AdaptedRectangle]:
    """Component of A minus both walls that joins the boundaries, meets both
    walls, and has D0 on its left and D1 on its right once lifted."""
    if np.any(D0.cells.mask & D1.cells.mask):
        raise PreconditionError("walls overlap")
    walls = D0.cells | D1.cells
    for comp in components(A - walls, 4):
        if not _joins_boundaries(comp, A):
            continue
        near = comp.dilate(1)
        if not (np.any(near.mask & D0.cells.mask) and np.any(near.mask & D1.cells.mask)):
            continue
        i, j = np.nonzero(comp.mask)
        Ru, Rj = _as_arrays(_unwrap(comp.mask, (int(i[0]), int(j[0])), int(i[0])))
        left = _lift_adjacent(D0.cells, Ru, Rj, comp.nx)
        right = _lift_adjacent(D1.cells, Ru, Rj, comp.nx)
        if left is None or right is None:
            continue
        if not left[0].mean() < Ru.mean() < right[0].mean():
            continue
        anchor = CoverPoint(float(Ru.min() * comp.h), float(A.band.y_min + Rj.min() * comp.h))
        return AdaptedRectangle(comp, A, left, right, (Ru, Rj), anchor)
    return None


# cover enclosures ------------------------------------------------------------

def propagate_cells(F: LiftedMap, u, j, grid: GridSet, n: int, cap: int = 2_000_000,
                    margin_factor: float = 1.0):
    """Outer cover of F^n applied to lifted cells (u, j), kept on the cover.

    Returns the unwrapped (u, j) arrays of the final cover.  Raises
    EnclosureEscape if an enclosure leaves the band and BudgetExceeded if the
    cover grows past ``cap`` cells.
    """
    h, y0, ny = grid.h, grid.band.y_min, grid.ny
    ox = np.array([0.0, 1.0, 0.0, 1.0, 0.5]) * h
    oy = np.array([0.0, 0.0, 1.0, 1.0, 0.5]) * h
    u = np.asarray(u, np.int64)
    j = np.asarray(j, np.int64)
    for step in range(n):
        xs = u[:, None] * h + ox
        ys = y0 + j[:, None] * h + oy
        X, Y, J = F.step(xs, ys)
        m = np.maximum(margin_factor * _spectral_norm(J).max(axis=1) * grid.diagonal, h)
        u0 = np.floor((X.min(axis=1) - m) / h).astype(np.int64)
        u1 = np.floor((X.max(axis=1) + m) / h).astype(np.int64)
        j0 = np.floor((Y.min(axis=1) - m - y0) / h).astype(np.int64)
        j1 = np.floor((Y.max(axis=1) + m - y0) / h).astype(np.int64)
        if np.any(j0 < 0) or np.any(j1 >= ny):
            raise EnclosureEscape(f"wall image leaves the band at step {step + 1}")
        w = u1 - u0 + 1
        hgt = j1 - j0 + 1
        total = int(np.sum(w * hgt))
        if total > cap * 4:
            raise BudgetExceeded(f"wall enclosure needs {total} cells at step {step + 1}")
        cnt = w * hgt
        rep = np.repeat(np.arange(len(u0)), cnt)
        local = np.arange(total) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        cu = u0[rep] + local // hgt[rep]
        cj = j0[rep] + local % hgt[rep]
        base = cu.min()
        key = np.unique((cu - base) * ny + cj)
        u, j = key // ny + base, key % ny
        if len(u) > cap:
            raise BudgetExceeded(f"wall enclosure has {len(u)} cells at step {step + 1}")
    return u, j


@dataclass
class HorseshoeCertificate:
    n0: int
    j: int
    m: int
    displacements: list
    kappa: float
    entropy_lower: float
    lift_shift: int = 0
    rectangle_bounds: dict = field(default_factory=dict)
    depth: int = 0
    margin: float = 1.0
    crossing: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.m < max(2, self.j + 1):
            raise ValueError("a certificate needs at least j + 1 >= 2 symbols")
        if self.entropy_lower < math.log(2) / self.n0 - 1e-12:
            raise ValueError("entropy lower bound below log 2 / n0")

    def to_dict(self) -> dict:
        return {"n0": self.n0, "j": self.j, "m": self.m, "displacements": list(self.displacements),
                "kappa": self.kappa, "entropy_lower": self.entropy_lower,
                "lift_shift": self.lift_shift, "rectangle_bounds": self.rectangle_bounds,
                "depth": self.depth, "margin": self.margin, "crossing": self.crossing}


def crossing_data(F: LiftedMap, R: AdaptedRectangle, n: int, j: int, lift_shift: int = 0,
                  margin_factor: float = 1.0, cap: int = 2_000_000) -> dict:
    """Abscissa extents of the wall images against the lifted rectangle.

    ``left_gap`` > 0 means the left wall image ends strictly before the
    rectangle starts; ``right_gap`` > 0 means the right wall image starts
    strictly after the rectangle translated by j ends.
    """
    if n < 1 or j < 1:
        raise ValueError("n and j must be at least 1")
    G = F.shifted(-lift_shift) if lift_shift else F
    grid = R.cells
    lu, lj = propagate_cells(G, *R.left_wall, grid, n, cap, margin_factor)
    ru, rj = propagate_cells(G, *R.right_wall, grid, n, cap, margin_factor)
    x0, x1 = R.x_hull()
    left_edge = float((lu.max() + 1) * grid.h)
    right_edge = float(ru.min() * grid.h)
    return {"left_image_max": left_edge, "right_image_min": right_edge,
            "rect_x": [x0, x1], "left_gap": x0 - left_edge, "right_gap": right_edge - (x1 + j)}


def markov_cross_check(F: LiftedMap, R: AdaptedRectangle, n: int, j: int, lift_shift: int = 0,
                       require_trap: bool = True, margin_factor: float = 1.0,
                       cap: int = 2_000_000) -> Optional[HorseshoeCertificate]:
    """Certificate for a rotational horseshoe of F^n (lift F - lift_shift) or None.

    Touching counts as failure.  When ``require_trap`` is set the map must
    send A into its interior, otherwise None is returned.
    """
    if require_trap and not check_trap(F, R.A, margin_factor):
        return None
    try:
        data = crossing_data(F, R, n, j, lift_shift, margin_factor, cap)
    except BudgetExceeded:
        return None
    if not (data["left_gap"] > 0 and data["right_gap"] > 0):
        return None
    x0, x1 = R.x_hull()
    y0, y1 = R.y_hull()
    return HorseshoeCertificate(
        n0=n, j=j, m=j + 1, displacements=list(range(j + 1)), kappa=R.kappa,
        entropy_lower=math.log(j + 1) / n, lift_shift=lift_shift,
        rectangle_bounds={"x": [x0, x1], "y": [y0, y1]}, depth=R.cells.depth,
        margin=margin_factor, crossing=data)


# verification by sampling ------------------------------------------------------

def verify_itineraries(F: LiftedMap, R: AdaptedRectangle, cert: HorseshoeCertificate, depth: int = 10,
                       samples: int = 2_000_000, check: int = 1000, seed: int = 0) -> dict:
    """Brute-force symbolic check of a certificate.

    Points of the lifted rectangle are iterated by F^n0; the symbol at each
    step is the translate R + s (s among the displacements) that the point
    lands in.  Reports how many of the m^depth cylinders were hit and checks
    the displacement bound |(F^{n0 L}(x) - x) - (sum v, 0)| < kappa on up to
    ``check`` surviving itineraries.
    """
    rng = np.random.default_rng(seed)
    G = F.shifted(-cert.lift_shift) if cert.lift_shift else F
    x, y = R.sample(samples, rng)
    x_start, y_start = x.copy(), y.copy()
    alive = np.ones(samples, bool)
    code = np.zeros(samples, np.int64)
    total = np.zeros(samples, np.int64)
    for _ in range(depth):
        for _ in range(cert.n0):
            x, y = G.eval(x, y)
        sym = np.full(samples, -1)
        for s, v in enumerate(cert.displacements):
            hit = (sym < 0) & R.contains_lifted(x - total, y, v)
            sym[hit] = s
        alive &= sym >= 0
        sym = np.where(alive, sym, 0)
        code = code * cert.m + sym
        total = total + np.asarray(cert.displacements)[sym]
    words = np.unique(code[alive])
    idx = np.flatnonzero(alive)[:check]
    dev = np.hypot(x[idx] - x_start[idx] - total[idx], y[idx] - y_start[idx])
    return {"depth": depth, "cylinders_found": int(len(words)), "cylinders_expected": cert.m ** depth,
            "survivors": int(alive.sum()), "itineraries_checked": int(len(idx)),
            "max_deviation": float(dev.max()) if len(dev) else 0.0,
            "bound_violations": int(np.sum(dev >= cert.kappa)), "kappa": cert.kappa}


def robustness_probe(F: LiftedMap, R: AdaptedRectangle, n: int, j: int, eta_max: float = 0.25,
                     iterations: int = 14, lift_shift: int = 0, margin_factor: float = 1.0) -> dict:
    """Largest tested sup-norm perturbation size for which the certificate survives.

    Bisection over eta assumes success is monotone in eta; the threshold is
    empirical.
    """
    def ok(eta):
        return markov_cross_check(sup_perturbation(F, eta), R, n, j, lift_shift,
                                  margin_factor=margin_factor) is not None

    trail = []
    if not ok(0.0):
        return {"eta_star": 0.0, "certified_at_zero": False, "trail": trail}
    if ok(eta_max):
        return {"eta_star": eta_max, "certified_at_zero": True, "trail": [(eta_max, True)]}
    lo, hi = 0.0, eta_max
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        good = ok(mid)
        trail.append((mid, good))
        lo, hi = (mid, hi) if good else (lo, mid)
    return {"eta_star": lo, "eta_fail": hi, "certified_at_zero": True, "trail": trail}


# the synthetic model ------------------------------------------------------------

SYNTH_LEFT, SYNTH_RIGHT = 0.2, 0.8


def synthetic_horseshoe(contraction: float = 0.5) -> LiftedMap:
    """Piecewise-affine rotational horseshoe (x, y) -> (g(x), c (y - 1/2) + 1/2).

    The degree-one lift g stretches [0.2, 0.8] by 3 onto [0.1, 1.9] and folds
    [-0.2, 0.2] back with slope -2, so the strip (0.2, 0.8) x [0, 1] crosses
    itself and its translate by one.
    """
    def parts(x):
        t = np.mod(x + 0.2, 1.0) - 0.2
        k = x - t
        up = t >= SYNTH_LEFT
        g = np.where(up, 0.1 + 3.0 * (t - 0.2), 0.1 - 2.0 * (t - 0.2)) + k
        return g, np.where(up, 3.0, -2.0)

    def forward(x, y):
        return parts(x)[0], contraction * (y - 0.5) + 0.5

    def jac(x, y):
        J = np.zeros(np.shape(x) + (2, 2))
        J[..., 0, 0] = parts(x)[1]
        J[..., 1, 1] = contraction
        return J

    return LiftedMap(forward, jac, None, label="synthetic-horseshoe", params={"contraction": contraction})


def synthetic_setup(depth: int = 7, band: Band = Band(-0.5, 1.5)):
    """Trapping annulus S^1 x [0, 1] and the two vertical walls of the model."""
    A = GridSet.horizontal_band(band, depth, 0.0, 1.0)
    walls = []
    for x in (SYNTH_LEFT, SYNTH_RIGHT):
        D = A.like()
        D.mask[int(math.floor(x * A.nx)) % A.nx] = A.mask[0]
        walls.append(classify_joining(D, A))
    return A, walls[0], walls[1]


def vertical_wall(A: GridSet, x: float) -> Optional[JoiningContinuum]:
    """The column of A containing abscissa x, as a joining continuum."""
    D = A.like()
    i = int(math.floor((x % 1.0) * A.nx)) % A.nx
    D.mask[i] = A.mask[i]
    return classify_joining(D, A)


# stable-set wall proxies -------------------------------------------------------

def stable_continuum(F: LiftedMap, point: AnnulusPoint, shift: int, A: GridSet, horizon: int = 200,
                     radius: Optional[float] = None) -> GridSet:
    """Grid proxy for the stable set of a fixed point of F - shift.

    Boxes of A whose center orbit stays in A and ends within ``radius`` of the
    point (circle distance) form the candidate; the 8-connected piece holding
    the point's box is returned.
    """
    radius = 2 * A.h if radius is None else radius
    G = F.shifted(-shift) if shift else F
    cx, cy = A.centers()
    ok = np.ones(len(cx), bool)
    x, y = cx, cy
    for _ in range(horizon):
        x, y = G.eval(x, y)
        ok &= A.contains_points(x, y)
    dx = np.abs(np.mod(x - point.x + 0.5, 1.0) - 0.5)
    ok &= np.hypot(dx, y - point.y) < radius
    S = A.like()
    idx = A.indices()
    S.mask[idx[ok, 0], idx[ok, 1]] = True
    pi, pj = A.locate(point.x, point.y)
    S.mask[int(pi), int(pj)] = A.mask[int(pi), int(pj)]
    lab, _ = _wrap_labels(S.mask, 8)
    k = lab[int(pi), int(pj)]
    return S.like(lab == k) if k else S.like()


def search_certificate(F: LiftedMap, R: AdaptedRectangle, n_max: int = 64, j_max: int = 2,
                       lift_shift: int = 0, margin_factor: float = 1.0) -> Optional[HorseshoeCertificate]:
    """First certificate over n = 1..n_max, trying j = 1 before larger j."""
    if not check_trap(F, R.A, margin_factor):
        return None
    for j in range(1, j_max + 1):
        for n in range(1, n_max + 1):
            cert = markov_cross_check(F, R, n, j, lift_shift, require_trap=False,
                                      margin_factor=margin_factor)
            if cert is not None:
                return cert
    return None


# chains ----------------------------------------------------------------------------

def chain_graph(F: LiftedMap, domain: GridSet, K: GridSet, eps: float) -> csr_matrix:
    """Directed box graph of eps-chains whose jumps happen inside K.

    Every box has an edge to the box containing the image of its center; if
    that image lies in K it also has edges to every box of K within eps of it.
    """
    if eps < domain.diagonal - 1e-15:
        raise PreconditionError("eps is below the box diagonal")
    nx, ny = domain.nx, domain.ny
    cx, cy = domain.centers()
    src = np.ravel_multi_index(np.nonzero(domain.mask), (nx, ny))
    X, Y = F.eval(cx, cy)
    ti, tj = domain.locate(X, Y)
    inside = (tj >= 0) & (tj < ny)
    inside[inside] = domain.mask[ti[inside], tj[inside]]
    rows = [src[inside]]
    cols = [np.ravel_multi_index((ti[inside], tj[inside]), (nx, ny))]
    inK = K.contains_points(X, Y)
    if inK.any():
        r = int(math.ceil(eps / domain.h)) + 1
        xs, ys = np.mod(X[inK], 1.0), Y[inK]
        bi, bj = domain.locate(xs, ys)
        s = src[inK]
        for di in range(-r, r + 1):
            for dj in range(-r, r + 1):
                ii = bi + di
                jj = bj + dj
                ok = (jj >= 0) & (jj < ny)
                # distance from the image point to box (ii, jj)
                gx = np.maximum(0.0, np.maximum(ii * domain.h - xs, xs - (ii + 1) * domain.h))
                gy = np.maximum(0.0, np.maximum(domain.band.y_min + jj * domain.h - ys,
                                                ys - domain.band.y_min - (jj + 1) * domain.h))
                ok &= np.hypot(gx, gy) < eps
                iw = ii % nx
                ok[ok] = K.mask[iw[ok], jj[ok]] & domain.mask[iw[ok], jj[ok]]
                rows.append(s[ok])
                cols.append(np.ravel_multi_index((iw[ok], jj[ok]), (nx, ny)))
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    return csr_matrix((np.ones(len(rows), bool), (rows, cols)), shape=(nx * ny, nx * ny))


def first_entry(F: LiftedMap, x, y, K: GridSet, steps: int, backward: bool = False) -> np.ndarray:
    """First iterate (1..steps) at which each orbit lies in K, or -1."""
    step = F.inverse_eval if backward else F.eval
    x, y = np.asarray(x, float).copy(), np.asarray(y, float).copy()
    first = np.full(x.shape, -1)
    for k in range(1, steps + 1):
        x, y = step(x, y)
        hit = (first < 0) & K.contains_points(x, y)
        first[hit] = k
        if np.all(first >= 0):
            break
    return first


def _orbit_boxes(F: LiftedMap, points, domain: GridSet, steps: int, backward: bool) -> list:
    """Per point, the flat indices of the domain boxes met by its exact orbit
    (the point included)."""
    step = F.inverse_eval if backward else F.eval
    x = np.array([p.x for p in points], float)
    y = np.array([p.y for p in points], float)
    xs, ys = [x], [y]
    for _ in range(steps):
        x, y = step(x, y)
        xs.append(x)
        ys.append(y)
    X, Y = np.stack(xs, axis=1), np.stack(ys, axis=1)
    out = []
    for k in range(len(points)):
        i, j = domain.locate(X[k], Y[k])
        ok = (j >= 0) & (j < domain.ny)
        ok[ok] = domain.mask[i[ok], j[ok]]
        out.append(np.unique(np.ravel_multi_index((i[ok], j[ok]), (domain.nx, domain.ny))))
    return out


def _reach(graph: csr_matrix, starts: np.ndarray, goals: np.ndarray) -> bool:
    """Multi-source breadth-first search, one sparse row gather per level."""
    if len(starts) == 0 or len(goals) == 0:
        return False
    seen = np.zeros(graph.shape[0], bool)
    seen[starts] = True
    frontier = starts
    while frontier.size:
        if seen[goals].any():
            return True
        nxt = np.unique(graph[frontier].indices)
        frontier = nxt[~seen[nxt]]
        seen[frontier] = True
    return bool(seen[goals].any())


def chain_reachable_pairs(F: LiftedMap, pairs, K: GridSet, eps: float, domain: Optional[GridSet] = None,
                          graph: Optional[csr_matrix] = None, follow: int = 0) -> list:
    """chain_reachable for many (z, w) pairs sharing one graph."""
    domain = GridSet.full(K.band, K.depth) if domain is None else domain
    if graph is None:
        graph = chain_graph(F, domain, K, eps)
    pairs = list(pairs)
    if not pairs:
        return []
    starts = _orbit_boxes(F, [z for z, _ in pairs], domain, follow, backward=False)
    goals = _orbit_boxes(F, [w for _, w in pairs], domain, follow, backward=True)
    return [z == w or _reach(graph, s, g) for (z, w), s, g in zip(pairs, starts, goals)]


def chain_reachable(F: LiftedMap, z: AnnulusPoint, w: AnnulusPoint, K: GridSet, eps: float,
                    domain: Optional[GridSet] = None, graph: Optional[csr_matrix] = None,
                    follow: int = 0) -> bool:
    """Whether w is reachable from z in the eps-chain box graph.

    ``domain`` defaults to the full grid of K.  A prebuilt ``graph`` from
    chain_graph can be passed to answer many queries.  With ``follow`` > 0
    the search starts from every box on the first ``follow`` exact iterates
    of z and succeeds on any box of the last ``follow`` exact preimages of
    w; exact orbit pieces are chains, and following them avoids the drift
    of box centers off the true orbit.
    """
    return chain_reachable_pairs(F, [(z, w)], K, eps, domain, graph, follow)[0]
