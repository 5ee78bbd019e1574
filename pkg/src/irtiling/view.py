"""Top view of the stacked squares: the level-n patches and the limit tiling.

Three independent routes compute the same decoration:

* :func:`top_view` looks up the two squares covering each cell by address;
* :func:`cell_query` / :func:`descend_arrays` walk down the recursion, testing
  the four copies in stacking order;
* :func:`overlay_view` paints rotated copies of the previous level bottom-up.

Internally a decorated cell is described by the quadrant of the base square it
shows (as a turn index, see :mod:`irtiling.decoration`) and the total rotation
of the square it comes from; the arrow is then ``quadrant + rotation``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .decoration import ArrowDir, BaseDecoration, ColourType, TileInstance, load_base, tile_at
from .errors import OutsideSupport
from .geometry import (
    OFFSETS,
    SquarePlacement,
    Stack,
    address_of,
    in_level_support,
    odd_corners,
    placement_of,
    rotate,
    rotate_cell,
    stack_compare,
)

EMPTY = -1
# quadrant turn index from the signs of the offset (x > 0, y > 0)
_QUADRANT_FROM_SIGNS = np.array([1, 2, 0, 3], dtype=np.int8)


# --- windows ---------------------------------------------------------------


@dataclass(frozen=True)
class Rect:
    """Cells k0 <= k < k1, m0 <= m < m1."""

    k0: int
    m0: int
    k1: int
    m1: int

    @classmethod
    def centred(cls, radius):
        return cls(-radius, -radius, radius, radius)

    def bounds(self):
        return self.k0, self.m0, self.k1, self.m1

    def __contains__(self, cell):
        k, m = cell
        return self.k0 <= k < self.k1 and self.m0 <= m < self.m1

    def cells(self):
        for k in range(self.k0, self.k1):
            for m in range(self.m0, self.m1):
                yield (k, m)

    def mask(self):
        return np.ones((self.k1 - self.k0, self.m1 - self.m0), dtype=bool)


@dataclass(frozen=True)
class Diamond:
    """Cells lying entirely inside |x1| + |x2| <= radius."""

    radius: int

    def bounds(self):
        r = max(self.radius, 0)
        return -r, -r, r, r

    def __contains__(self, cell):
        k, m = cell
        return abs(2 * k + 1) + abs(2 * m + 1) + 2 <= 2 * self.radius

    def cells(self):
        k0, m0, k1, m1 = self.bounds()
        for k in range(k0, k1):
            for m in range(m0, m1):
                if (k, m) in self:
                    yield (k, m)

    def mask(self):
        k0, m0, k1, m1 = self.bounds()
        k = np.arange(k0, k1)[:, None]
        m = np.arange(m0, m1)[None, :]
        return np.abs(2 * k + 1) + np.abs(2 * m + 1) + 2 <= 2 * self.radius


def cell_norm(cell):
    """Largest |x1| + |x2| over the closed cell."""
    k, m = cell
    return (abs(2 * k + 1) + abs(2 * m + 1)) // 2 + 1


# --- patches ---------------------------------------------------------------


@dataclass
class Patch:
    """Finite map from cells to decorated tiles."""

    tiles: dict = field(default_factory=dict)
    window: object = None

    def __len__(self):
        return len(self.tiles)

    def __contains__(self, cell):
        return tuple(cell) in self.tiles

    def __getitem__(self, cell):
        return self.tiles[tuple(cell)]

    def __iter__(self) -> Iterator[TileInstance]:
        return iter(self.tiles.values())

    def __eq__(self, other):
        return isinstance(other, Patch) and self.tiles == other.tiles

    @property
    def support(self):
        return frozenset(self.tiles)

    def get(self, cell, default=None):
        return self.tiles.get(tuple(cell), default)

    def restrict(self, cells) -> "Patch":
        if hasattr(cells, "__contains__") and not isinstance(cells, (set, frozenset)):
            keep = {c: t for c, t in self.tiles.items() if c in cells}
            return Patch(keep, cells)
        cells = set(cells)
        return Patch({c: t for c, t in self.tiles.items() if c in cells})

    def is_subpatch_of(self, other: "Patch") -> bool:
        return all(other.get(c) == t for c, t in self.tiles.items())

    def translated(self, t) -> "Patch":
        tx, ty = t
        return Patch({(k + tx, m + ty): tile.moved((k + tx, m + ty)) for (k, m), tile in self.tiles.items()})

    def rotated(self, turns) -> "Patch":
        """Image under ``turns`` clockwise quarter turns about the origin."""
        out = {}
        for cell, tile in self.tiles.items():
            c = rotate_cell(cell, turns)
            out[c] = TileInstance(c, tile.colour, tile.arrow.rotated(turns))
        return Patch(out)

    def bounds(self):
        ks = [c[0] for c in self.tiles]
        ms = [c[1] for c in self.tiles]
        return min(ks), min(ms), max(ks) + 1, max(ms) + 1

    def to_grid(self) -> "Grid":
        k0, m0, k1, m1 = self.bounds()
        codes = np.full((k1 - k0, m1 - m0), EMPTY, dtype=np.int8)
        for (k, m), tile in self.tiles.items():
            codes[k - k0, m - m0] = tile.code
        return Grid(k0, m0, codes)


@dataclass
class Grid:
    """Dense array of tile codes; ``codes[i, j]`` is cell (k0 + i, m0 + j), -1 if absent."""

    k0: int
    m0: int
    codes: np.ndarray

    @property
    def shape(self):
        return self.codes.shape

    @property
    def bounds(self):
        return self.k0, self.m0, self.k0 + self.codes.shape[0], self.m0 + self.codes.shape[1]

    def at(self, cell):
        i, j = cell[0] - self.k0, cell[1] - self.m0
        if 0 <= i < self.codes.shape[0] and 0 <= j < self.codes.shape[1]:
            return int(self.codes[i, j])
        return EMPTY

    def tile(self, cell):
        code = self.at(cell)
        return None if code == EMPTY else TileInstance.from_code(cell, code)

    def colours(self):
        return np.where(self.codes >= 0, self.codes // 4, EMPTY)

    def arrows(self):
        return np.where(self.codes >= 0, self.codes % 4, EMPTY)

    def to_patch(self) -> Patch:
        idx = np.argwhere(self.codes >= 0)
        tiles = {}
        for i, j in idx:
            cell = (int(i) + self.k0, int(j) + self.m0)
            tiles[cell] = TileInstance.from_code(cell, int(self.codes[i, j]))
        return Patch(tiles)

    def masked(self, mask) -> "Grid":
        return Grid(self.k0, self.m0, np.where(mask, self.codes, EMPTY).astype(np.int8))


# --- route 1: covering squares by address ------------------------------------


def visible_square(n: int, cell):
    """Topmost level-n square covering ``cell``."""
    if n == 0:
        if tuple(cell) in ((-1, -1), (0, -1), (-1, 0), (0, 0)):
            return SquarePlacement((0, 0), 0, ())
        _uncovered(n, cell)
    present = [c for c in odd_corners(cell) if in_level_support(c, n)]
    if not present:
        _uncovered(n, cell)
    squares = [placement_of(address_of(c, n)) for c in present]
    if len(squares) == 2 and stack_compare(squares[0].depth, squares[1].depth) is Stack.BELOW:
        squares.reverse()
    return squares[0]


def _uncovered(n, cell):
    raise OutsideSupport(f"cell {tuple(cell)} is not covered at level {n}")


def top_view(n: int, window=None, base: BaseDecoration | None = None) -> Patch:
    """Decorated top view of the level-n patch over ``window`` (default: all covered cells)."""
    base = base or load_base()
    cells = window.cells() if window is not None else level_cells(n)
    tiles = {}
    for cell in cells:
        tiles[cell] = tile_at(visible_square(n, cell), cell, base)
    return Patch(tiles, window)


def level_cells(n: int) -> Iterator[tuple]:
    """All cells covered by at least one level-n square."""
    h = 1 << n
    for k in range(-h, h):
        for m in range(-h, h):
            if n == 0 or any(in_level_support(c, n) for c in odd_corners((k, m))):
                yield (k, m)


# --- route 2: descent ---------------------------------------------------------


def _covered_scalar(level, x, y):
    """Does the level patch cover the cell with doubled centre (x, y)?"""
    if level == 0:
        return (x == 1 or x == -1) and (y == 1 or y == -1)
    # the odd-sum corners are the centre shifted by (1, 1)/2 or (1, -1)/2 both ways
    if ((x - 1) // 2 + (y - 1) // 2) % 2:
        a = abs(x - 1) + abs(y - 1)
        b = abs(x + 1) + abs(y + 1)
    else:
        a = abs(x - 1) + abs(y + 1)
        b = abs(x + 1) + abs(y - 1)
    return min(a, b) <= (2 << level) - 2


def descend(n: int, cell):
    """(quadrant turns, rotation) of the top decoration of ``cell`` at level n, by descent."""
    x, y = 2 * cell[0] + 1, 2 * cell[1] + 1
    if not _covered_scalar(n, x, y):
        raise OutsideSupport(f"cell {tuple(cell)} is not covered at level {n}")
    covered = _covered_scalar
    rotation = 0
    for level in range(n, 0, -1):
        t = 1 << level
        lower = level - 1
        # local frame of copy g: subtract the doubled offset, rotate by -g
        if covered(lower, x + t, y):
            x = x + t
        elif covered(lower, t - y, x):
            x, y = t - y, x
            rotation += 1
        elif covered(lower, t - x, -y):
            x, y = t - x, -y
            rotation += 2
        else:
            x, y = y + t, -x
            rotation += 3
    quadrant = int(_QUADRANT_FROM_SIGNS[2 * (x > 0) + (y > 0)])
    return quadrant, rotation % 4


def cell_query(n: int, cell, base: BaseDecoration | None = None) -> TileInstance:
    base = base or load_base()
    quadrant, rotation = descend(n, cell)
    return TileInstance(
        tuple(cell),
        base.colour(ArrowDir.from_turns(quadrant)),
        ArrowDir.from_turns(quadrant + rotation),
    )


def _covered_arrays(level, x, y):
    if level == 0:
        return (np.abs(x) == 1) & (np.abs(y) == 1)
    r = (1 << level) - 1
    k = (x - 1) // 2
    m = (y - 1) // 2
    even = (k + m) % 2 == 0
    # odd corners: (k, m+1), (k+1, m) if k+m even; (k, m), (k+1, m+1) otherwise
    a = np.where(even, np.abs(k) + np.abs(m + 1), np.abs(k) + np.abs(m))
    b = np.where(even, np.abs(k + 1) + np.abs(m), np.abs(k + 1) + np.abs(m + 1))
    return np.minimum(a, b) <= r


def descend_arrays(n: int, ks, ms):
    """Vectorised :func:`descend`; uncovered cells get quadrant and rotation -1."""
    x = 2 * np.asarray(ks, dtype=np.int64) + 1
    y = 2 * np.asarray(ms, dtype=np.int64) + 1
    alive = _covered_arrays(n, x, y)
    rotation = np.zeros(x.shape, dtype=np.int64)
    for level in range(n, 0, -1):
        h2 = 1 << level
        nx, ny = x.copy(), y.copy()
        found = ~alive
        for g in range(4):
            dx, dy = OFFSETS[g]
            lx, ly = rotate((x - h2 * dx, y - h2 * dy), -g)
            hit = ~found & _covered_arrays(level - 1, lx, ly)
            nx[hit] = lx[hit]
            ny[hit] = ly[hit]
            rotation[hit] += g
            found |= hit
        x, y = nx, ny
    quadrant = _QUADRANT_FROM_SIGNS[2 * (x > 0) + (y > 0)].astype(np.int64)
    quadrant[~alive] = EMPTY
    rotation = np.where(alive, rotation % 4, EMPTY)
    return quadrant, rotation


def codes_from_raw(quadrant, rotation, base: BaseDecoration):
    colour_of = np.array(base.by_turns(), dtype=np.int64)
    codes = 4 * colour_of[np.maximum(quadrant, 0)] + (quadrant + rotation) % 4
    return np.where(quadrant >= 0, codes, EMPTY).astype(np.int8)


def _address_arrays(n, x, y):
    """Address (as a base-4 integer) and rotation of the level-n squares centred at
    integer points (x, y); points that are not centres get address -1.

    The copies of the previous level occupy the four open cones |y| < -x, |x| < y,
    |y| < x and |x| < -y, so the copy index is read off from signs alone.
    """
    wide = np.int64 if n > 15 else np.int32
    x = np.array(x, dtype=wide)
    y = np.array(y, dtype=wide)
    valid = ((x + y) & 1 == 1) & (np.abs(x) + np.abs(y) <= (1 << n) - 1)
    address = np.zeros(x.shape, dtype=wide)
    rotation = np.zeros(x.shape, dtype=np.int8)
    for level in range(n, 0, -1):
        h = 1 << (level - 1)
        right = (x > 0).view(np.int8)
        up = (y > 0).view(np.int8)
        g = np.where(np.abs(y) < np.abs(x), 2 * right, 3 - 2 * up).astype(np.intp)
        x -= h * _OFFSET_X[g]
        y -= h * _OFFSET_Y[g]
        c, s = _COS[g], _SIN[g]
        x, y = c * x + s * y, c * y - s * x
        address <<= 2
        address += g
        rotation += g.astype(np.int8)
    return np.where(valid, address, -1), (rotation & 3).astype(np.int64)


_OFFSET_X = np.array([o[0] for o in OFFSETS], dtype=np.int32)
_OFFSET_Y = np.array([o[1] for o in OFFSETS], dtype=np.int32)
# rotation by -g quarter turns: (x, y) -> (c x + s y, c y - s x)
_COS = np.array([1, 0, -1, 0], dtype=np.int32)
_SIN = np.array([0, -1, 0, 1], dtype=np.int32)


def top_square_arrays(n: int, ks, ms):
    """Centre, rotation and coverage flag of the topmost level-n square over each cell."""
    k = np.asarray(ks, dtype=np.int64)
    m = np.asarray(ms, dtype=np.int64)
    even = (k + m) % 2 == 0
    ax, ay = k, np.where(even, m + 1, m)
    bx, by = k + 1, np.where(even, m, m + 1)
    addr_a, rot_a = _address_arrays(n, ax, ay)
    addr_b, rot_b = _address_arrays(n, bx, by)
    take_a = (addr_a >= 0) & ((addr_b < 0) | (addr_a < addr_b))
    cx = np.where(take_a, ax, bx)
    cy = np.where(take_a, ay, by)
    rotation = np.where(take_a, rot_a, rot_b)
    covered = (addr_a >= 0) | (addr_b >= 0)
    return cx, cy, rotation, covered


def top_view_arrays(n: int, ks, ms):
    """Vectorised top view by address comparison: (quadrant, rotation), -1 if uncovered."""
    k = np.asarray(ks, dtype=np.int64)
    m = np.asarray(ms, dtype=np.int64)
    if n == 0:
        covered = (k >= -1) & (k <= 0) & (m >= -1) & (m <= 0)
        cx = cy = rotation = np.zeros(k.shape, dtype=np.int64)
    else:
        cx, cy, rotation, covered = top_square_arrays(n, k, m)
    ox, oy = 2 * k + 1 - 2 * cx, 2 * m + 1 - 2 * cy
    outward = _QUADRANT_FROM_SIGNS[2 * (ox > 0) + (oy > 0)].astype(np.int64)
    quadrant = (outward - rotation) % 4
    return np.where(covered, quadrant, EMPTY), np.where(covered, rotation, EMPTY)


def level_grid(n: int, window=None, base: BaseDecoration | None = None) -> Grid:
    """Top view of level n over a window as a :class:`Grid` (cells outside the window or
    uncovered are -1)."""
    base = base or load_base()
    if window is None:
        window = Rect.centred(1 << n)
    k0, m0, k1, m1 = window.bounds()
    k, m = np.meshgrid(np.arange(k0, k1), np.arange(m0, m1), indexing="ij")
    quadrant, rotation = top_view_arrays(n, k, m)
    codes = codes_from_raw(quadrant, rotation, base)
    return Grid(k0, m0, np.where(window.mask(), codes, EMPTY).astype(np.int8))


# --- route 3: recursive overlay ------------------------------------------------


def overlay_view(n: int):
    """Raw (quadrant, rotation) arrays of the level-n top view by painting copies bottom-up.

    Arrays are indexed ``[k + 2**n, m + 2**n]`` for cells -2**n <= k, m < 2**n.
    """
    quadrant = np.array([[1, 2], [0, 3]], dtype=np.int64)  # cells (-1,-1) (-1,0) / (0,-1) (0,0)
    rotation = np.zeros((2, 2), dtype=np.int64)
    for level in range(1, n + 1):
        h = 1 << level
        half = h // 2
        new_q = np.full((2 * h, 2 * h), EMPTY, dtype=np.int64)
        new_r = np.full((2 * h, 2 * h), EMPTY, dtype=np.int64)
        for g in (3, 2, 1, 0):
            q = np.rot90(quadrant, -g)
            r = np.rot90(rotation, -g)
            r = np.where(q >= 0, (r + g) % 4, EMPTY)
            dx, dy = OFFSETS[g]
            # copy occupies cells [-half, half) shifted by half * offset
            i0 = h - half + half * dx
            j0 = h - half + half * dy
            sub_q = new_q[i0 : i0 + 2 * half, j0 : j0 + 2 * half]
            sub_r = new_r[i0 : i0 + 2 * half, j0 : j0 + 2 * half]
            paint = q >= 0
            sub_q[paint] = q[paint]
            sub_r[paint] = r[paint]
        quadrant, rotation = new_q, new_r
    return quadrant, rotation


# --- central patches and the limit ------------------------------------------------


def central_radius(n: int) -> int:
    return (1 << (n - 2)) - 1


def central_patch(n: int, base: BaseDecoration | None = None) -> Patch:
    """Level-n top view restricted to the diamond of radius 2**(n-2) - 1."""
    if n < 2:
        raise ValueError("central patches start at level 2")
    window = Diamond(central_radius(n))
    return level_grid(n, window, base).to_patch().restrict(window)


def stabilization_level(cell) -> int:
    k, m = cell
    return (abs(k) + abs(m) + 1).bit_length() + 2


def limit_tile(cell, base: BaseDecoration | None = None, verify: bool = True) -> TileInstance:
    """Tile of the limit tiling at ``cell``."""
    n = stabilization_level(cell)
    tile = cell_query(n, cell, base)
    if verify and cell_query(n + 1, cell, base) != tile:
        raise AssertionError(f"cell {cell} not stable at level {n}")
    return tile


def window_level(window) -> int:
    k0, m0, k1, m1 = window.bounds()
    reach = max(abs(k0), abs(k1), abs(m0), abs(m1))
    return stabilization_level((reach, reach))


def limit_grid(window, base: BaseDecoration | None = None) -> Grid:
    """The limit tiling over a window, as a dense grid."""
    return level_grid(window_level(window), window, base)


def limit_patch(window, base: BaseDecoration | None = None) -> Patch:
    return limit_grid(window, base).to_patch()


class TileSource:
    """Callable cell -> TileInstance backed by lazily grown dense grids of the limit."""

    def __init__(self, base: BaseDecoration | None = None, turns: int = 0):
        self.base = base or load_base()
        self.turns = turns % 4
        self._grid = None

    def ensure(self, radius):
        if self._grid is None or self._grid.bounds[2] < radius:
            r = 1 << max(radius - 1, 1).bit_length()
            self._grid = limit_grid(Rect.centred(r + 1), self.base)

    def code(self, cell):
        # rotated tiling: value at c is the rotated value at the preimage of c
        c = rotate_cell(cell, -self.turns)
        radius = max(abs(c[0]), abs(c[1])) + 1
        self.ensure(radius)
        code = self._grid.at(c)
        return 4 * (code // 4) + (code % 4 + self.turns) % 4

    def __call__(self, cell):
        return TileInstance.from_code(cell, self.code(cell))


# --- arrow directions ------------------------------------------------------------------


def vertex_degree(support):
    """For a boolean support array S[i, j], array D[i, j] = number of cells touching
    vertex (i, j) (vertex (i, j) is the lower-left corner of cell (i, j))."""
    padded = np.pad(support.astype(np.int64), 1)
    return padded[:-1, :-1] + padded[1:, :-1] + padded[:-1, 1:] + padded[1:, 1:]


def boundary_arrow_report(n: int, base: BaseDecoration | None = None):
    """Boundary tiles of the level-n top view and those whose arrow misses their free vertex."""
    grid = level_grid(n, base=base)
    support = grid.codes >= 0
    degree = vertex_degree(support)
    ii, jj = np.nonzero(support)
    corner_deg = np.stack(
        [degree[ii, jj], degree[ii + 1, jj], degree[ii, jj + 1], degree[ii + 1, jj + 1]]
    )
    boundary = (corner_deg == 1).any(axis=0)
    arrows = grid.codes[ii, jj] % 4
    vec = np.array([d.vector for d in (ArrowDir.from_turns(t) for t in range(4))])
    ax, ay = vec[arrows, 0], vec[arrows, 1]
    target = degree[ii + (ax > 0), jj + (ay > 0)]
    bad = boundary & (target != 1)
    cells = [(int(i) + grid.k0, int(j) + grid.m0) for i, j in zip(ii[bad], jj[bad])]
    return int(boundary.sum()), cells


def expected_diagonal_arrow(cell):
    """Arrow forced on the diagonals x1 = x2 and x1 = -x2, or None off them."""
    k, m = cell
    if k == m:
        return ArrowDir.SE
    if m == -k - 1:
        return ArrowDir.NE if k < 0 else ArrowDir.SW
    return None


def diagonal_arrow_report(n: int, base: BaseDecoration | None = None):
    grid = level_grid(n, base=base)
    checked, bad = 0, []
    h = 1 << n
    for k in range(-h, h):
        for m in (k, -k - 1):
            code = grid.at((k, m))
            if code == EMPTY:
                continue
            checked += 1
            if code % 4 != expected_diagonal_arrow((k, m)).turns:
                bad.append((k, m))
    return checked, bad


def colour_counts(patch: Patch):
    counts = {c: 0 for c in ColourType}
    for tile in patch:
        counts[tile.colour] += 1
    return counts


def patch_from_cells(cells: Iterable, source) -> Patch:
    return Patch({tuple(c): source(tuple(c)) for c in cells})
