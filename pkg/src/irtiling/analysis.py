"""Metric, periods, limit-periodic packings, patch frequencies and repetitivity."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .decoration import TileInstance
from .errors import MismatchAgainstA, SearchExhausted, WindowTooSmall
from .view import Grid, Patch, Rect, level_grid, limit_grid, vertex_degree

METRIC_CAP = 1 / math.sqrt(2)


# --- metric -------------------------------------------------------------------------


def _far_corner_sq(cell):
    k, m = cell
    return max(k * k, (k + 1) ** 2) + max(m * m, (m + 1) ** 2)


def agreement_radius(p1: Patch, p2: Patch) -> float:
    """Supremum of r such that both patches contain, and agree on, every cell inside B_r.

    A cell lies in the open ball B_r when its farthest corner is at distance < r,
    so the result is the far-corner distance of the nearest offending cell.
    """
    common = p1.support & p2.support
    offending = set(p1.support ^ p2.support)
    offending |= {c for c in common if p1[c] != p2[c]}
    for k, m in common:
        for dk in (-1, 0, 1):
            for dm in (-1, 0, 1):
                c = (k + dk, m + dm)
                if c not in common:
                    offending.add(c)
    offending |= {c for c in ((-1, -1), (0, -1), (-1, 0), (0, 0)) if c not in common}
    if not offending:
        return math.inf
    return math.sqrt(min(_far_corner_sq(c) for c in offending))


def distance(p1: Patch, p2: Patch) -> float:
    """Zero-shift upper bound for the tiling metric: min(1/r, 1/sqrt 2)."""
    r = agreement_radius(p1, p2)
    return min(1 / r if r > 0 else math.inf, METRIC_CAP)


# --- periods ------------------------------------------------------------------------


@dataclass
class PeriodReport:
    vector: tuple
    is_period: bool
    witness: tuple | None
    window: tuple

    @property
    def verdict(self):
        return "Period" if self.is_period else f"Broken{self.witness}"


def find_periods(grid: Grid, bound: int, vectors=None, check_size: bool = True):
    """Test every nonzero integer vector with |t| <= bound (plus t = 0) as a period.

    Absent cells are compared like a colour, so a sub-patch is periodic only if
    its support is.
    """
    h, w = grid.codes.shape
    if check_size and min(h, w) < 8 * bound:
        raise WindowTooSmall(f"window of size {h}x{w} needs radius >= {4 * bound}")
    if vectors is None:
        vectors = [
            (tx, ty)
            for tx in range(-bound, bound + 1)
            for ty in range(-bound, bound + 1)
            if tx * tx + ty * ty <= bound * bound
        ]
    codes = grid.codes
    reports = []
    for tx, ty in vectors:
        a = codes[max(0, -tx) : h - max(0, tx), max(0, -ty) : w - max(0, ty)]
        b = codes[max(0, tx) : h - max(0, -tx), max(0, ty) : w - max(0, -ty)]
        diff = np.argwhere(a != b)
        witness = None
        if diff.size:
            i, j = diff[0]
            witness = (int(i) + max(0, -tx) + grid.k0, int(j) + max(0, -ty) + grid.m0)
        reports.append(PeriodReport((tx, ty), witness is None, witness, grid.bounds))
    return reports


# --- limit-periodic packings ------------------------------------------------------------


def interior_patch(n: int, base=None) -> Grid:
    """Tiles of the level-n top view all of whose vertices are shared with another tile."""
    grid = level_grid(n, base=base)
    support = grid.codes >= 0
    degree = vertex_degree(support)
    free = degree == 1
    boundary = free[:-1, :-1] | free[1:, :-1] | free[:-1, 1:] | free[1:, 1:]
    return grid.masked(support & ~boundary)


def family_offsets(n: int):
    """Base translation of the four rotated families of level n."""
    s = 1 << n
    return ((s, 0), (0, -s), (-s, 0), (0, s))


def diagonal_mask(k0, m0, k1, m1):
    """Cells whose diagonal lies on x1 = x2 or x1 = -x2."""
    k = np.arange(k0, k1)[:, None]
    m = np.arange(m0, m1)[None, :]
    return (k == m) | (m == -k - 1)


@dataclass
class PackingReport:
    level: int
    window: tuple
    covered: np.ndarray
    copies: int
    mismatches: list = field(default_factory=list)

    @property
    def fraction(self):
        return float(self.covered.mean())


def mn_packing(n: int, grid: Grid, base=None, strict: bool = True) -> PackingReport:
    """Place the four lattice families of rotated interior-patch copies over a window of the tiling."""
    if not 1 <= n <= 8:
        raise ValueError("packing level must be in 1..8")
    inner = interior_patch(n, base)
    cells = np.argwhere(inner.codes >= 0)
    rel_k = cells[:, 0] + inner.k0
    rel_m = cells[:, 1] + inner.m0
    rel_code = inner.codes[cells[:, 0], cells[:, 1]].astype(np.int64)
    k0, m0, k1, m1 = grid.bounds
    covered = np.zeros(grid.codes.shape, dtype=bool)
    mismatches = []
    copies = 0
    step = 1 << (n + 1)
    reach = (max(abs(k0), abs(k1), abs(m0), abs(m1)) + 2 * step) // step + 1
    for turns, (vx, vy) in enumerate(family_offsets(n)):
        rk, rm = _rotate_cells(rel_k, rel_m, turns)
        codes = 4 * (rel_code // 4) + (rel_code % 4 + turns) % 4
        for a in range(-reach, reach + 1):
            for b in range(-reach, reach + 1):
                tx, ty = vx + step * (a + b), vy + step * (a - b)
                ck, cm = rk + tx, rm + ty
                inside = (ck >= k0) & (ck < k1) & (cm >= m0) & (cm < m1)
                if not inside.any():
                    continue
                copies += 1
                i, j = ck[inside] - k0, cm[inside] - m0
                actual = grid.codes[i, j]
                bad = np.nonzero(actual != codes[inside])[0]
                for idx in bad[:5]:
                    cell = (int(ck[inside][idx]), int(cm[inside][idx]))
                    mismatches.append(
                        (cell, TileInstance.from_code(cell, int(actual[idx])), TileInstance.from_code(cell, int(codes[inside][idx])))
                    )
                covered[i, j] = True
    if mismatches and strict:
        cell, expected, found = mismatches[0]
        raise MismatchAgainstA(cell, expected, found)
    return PackingReport(n, grid.bounds, covered, copies, mismatches)


def _rotate_cells(k, m, turns):
    x, y = 2 * k + 1, 2 * m + 1
    for _ in range(turns % 4):
        x, y = y, -x
    return (x - 1) // 2, (y - 1) // 2


def family_union(levels, grid: Grid, base=None):
    covered = np.zeros(grid.codes.shape, dtype=bool)
    for n in levels:
        covered |= mn_packing(n, grid, base).covered
    return covered


# --- patch frequencies ----------------------------------------------------------------


@dataclass
class FrequencyRecord:
    fingerprint: str
    radius: float
    centre: tuple
    count: int

    @property
    def frequency(self):
        return self.count / (math.pi * self.radius**2)


def fingerprint(patch: Patch) -> str:
    k0 = min(c[0] for c in patch.support)
    m0 = min(c[1] for c in patch.support)
    return ";".join(
        f"{k - k0},{m - m0}:{t.colour.value}{t.arrow.name}" for (k, m), t in sorted(patch.tiles.items())
    )


def _orientations(patch: Patch):
    """The distinct rotated copies of a patch, each normalised to start at (0, 0)."""
    seen = {}
    for turns in range(4):
        rotated = patch.rotated(turns)
        k0 = min(c[0] for c in rotated.support)
        m0 = min(c[1] for c in rotated.support)
        norm = tuple(sorted(((k - k0, m - m0), t.code) for (k, m), t in rotated.tiles.items()))
        seen.setdefault(norm, turns)
    return list(seen)


def match_mask(grid: Grid, pattern):
    """Boolean array over anchors (i, j) where ``pattern`` matches with its origin at (i, j)."""
    h, w = grid.codes.shape
    ext_k = max(c[0] for c, _ in pattern) + 1
    ext_m = max(c[1] for c, _ in pattern) + 1
    if ext_k > h or ext_m > w:
        return np.zeros((0, 0), dtype=bool)
    mask = np.ones((h - ext_k + 1, w - ext_m + 1), dtype=bool)
    for (dk, dm), code in pattern:
        mask &= grid.codes[dk : dk + mask.shape[0], dm : dm + mask.shape[1]] == code
    return mask


def patch_frequency(patch: Patch, radius: float, centres, base=None):
    """Copies (translations and quarter turns) of ``patch`` lying in B_r(x), per centre."""
    pats = _orientations(patch)
    fp = fingerprint(patch)
    r = radius
    records = []
    for x, y in centres:
        window = Rect(math.floor(x - r) - 1, math.floor(y - r) - 1, math.ceil(x + r) + 1, math.ceil(y + r) + 1)
        grid = limit_grid(window, base)
        k = np.arange(window.k0, window.k1)[:, None]
        m = np.arange(window.m0, window.m1)[None, :]
        fx = np.maximum((k - x) ** 2, (k + 1 - x) ** 2)
        fy = np.maximum((m - y) ** 2, (m + 1 - y) ** 2)
        inside = fx + fy < r * r
        total = 0
        for pat in pats:
            mask = match_mask(grid, pat)
            if mask.size == 0:
                continue
            for (dk, dm), _ in pat:
                mask &= inside[dk : dk + mask.shape[0], dm : dm + mask.shape[1]]
            total += int(mask.sum())
        records.append(FrequencyRecord(fp, r, (x, y), total))
    return records


def frequency_spread(records):
    freqs = [rec.frequency for rec in records]
    return max(freqs) - min(freqs)


# --- repetitivity -------------------------------------------------------------------------

_P1, _P2 = 2147483647, 2147483629
_BASES = ((1_000_003, 999_983), (741_457, 1_299_709))


def _rolling(codes, width, axis, base, p):
    """Polynomial hash of ``width`` consecutive entries along ``axis`` (mod p)."""
    a = np.moveaxis(codes, axis, 0).astype(np.int64)
    n = a.shape[0]
    prefix = np.zeros((n + 1,) + a.shape[1:], dtype=np.int64)
    for i in range(n):
        prefix[i + 1] = (prefix[i] * base + a[i] + 1) % p
    top = pow(base, width, p)
    out = (prefix[width:] - prefix[: n - width + 1] * top) % p
    return np.moveaxis(out, 0, axis)


def box_hashes(codes, width):
    """64-bit fingerprints of every width x width box, indexed by its lower-left cell."""
    keys = []
    for (bx, by), p in zip(_BASES, (_P1, _P2)):
        rows = _rolling(codes, width, 0, bx, p)
        keys.append(_rolling(rows, width, 1, by, p))
    return keys[0] * (1 << 31) + keys[1]


@dataclass
class RepetitivityReport:
    r: int
    R: int
    types: int
    window: int

    @property
    def ratio(self):
        return self.R / self.r


def _gap(occupied, region):
    """Largest chessboard distance from a point of ``region`` to an occupied point."""
    dist = ndimage.distance_transform_cdt(~occupied, metric="chessboard")
    return int(dist[region].max())


def repetitivity_radius(r: int, window: int | None = None, base=None, strict: bool = True) -> RepetitivityReport:
    """Smallest R such that every box of half-width R about a vertex contains every
    box patch of half-width r occurring in the window (boxes are sup-norm balls).

    Centres range over the middle half of the window.  Patch types are screened on a
    coarse grid first, so the exact distance transform only runs for rare types.
    """
    if not 1 <= r <= 16:
        raise ValueError("r must be in 1..16")
    L = window or 80 * r
    grid = limit_grid(Rect.centred(L), base)
    keys = box_hashes(grid.codes, 2 * r)
    del grid
    # anchor (i, j) is the box of cells [i, i + 2r) x [j, j + 2r), centred at vertex (i + r, j + r)
    size = keys.shape[0]
    lo, hi = size // 4, size - size // 4
    region = (slice(lo, hi), slice(lo, hi))
    flat = keys.ravel()
    del keys
    order = np.argsort(flat, kind="stable")
    sorted_keys = flat[order]
    del flat
    starts = np.flatnonzero(np.r_[True, sorted_keys[1:] != sorted_keys[:-1]])
    ends = np.r_[starts[1:], len(sorted_keys)]
    f = r
    csize = -(-size // f)
    cregion = (slice(lo // f, -(-hi // f)), slice(lo // f, -(-hi // f)))
    worst = 0
    for s, e in sorted(zip(starts, ends), key=lambda se: se[1] - se[0]):
        i, j = np.divmod(order[s:e], size)
        coarse = np.zeros((csize, csize), dtype=bool)
        coarse[i // f, j // f] = True
        # a point in a block at coarse distance D is within fine distance (D + 1) * f - 1
        if (_gap(coarse, cregion) + 1) * f - 1 <= worst:
            continue
        fine = np.zeros((size, size), dtype=bool)
        fine[i, j] = True
        worst = max(worst, _gap(fine, region))
    # a box of half-width R about a centre must lie inside the window
    if strict and worst + r > lo - 1:
        raise SearchExhausted(f"window {L} too small to bound R for r={r}")
    return RepetitivityReport(r, r + worst, len(starts), L)


def grid_agreement_radius(g1: Grid, g2: Grid) -> float:
    """:func:`agreement_radius` for two grids over the same bounds.

    Cells outside the bounds count as unknown, so the result is a lower bound
    for the full patches once it is smaller than the window's half-width.
    """
    if g1.bounds != g2.bounds:
        raise ValueError("grids must share their bounds")
    k0, m0, k1, m1 = g1.bounds
    k = np.arange(k0, k1)[:, None]
    m = np.arange(m0, m1)[None, :]
    far = np.maximum(k * k, (k + 1) ** 2) + np.maximum(m * m, (m + 1) ** 2)
    bad = (g1.codes != g2.codes) | (g1.codes < 0) | (g2.codes < 0)
    best = float(far[bad].min()) if bad.any() else math.inf
    # nearest cell outside the bounds
    edge = min(-k0, k1, -m0, m1)
    best = min(best, float((edge + 1) ** 2) if edge >= 0 else 0.0)
    return math.sqrt(best)
