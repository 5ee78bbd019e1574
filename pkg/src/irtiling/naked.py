"""The undecorated tiling: visible parts of the stacked squares.

Each cell belongs to the visible part of its topmost covering square.  That part
can split into two pieces touching only at a corner (two diagonal cells, when the
other two are covered from above), so a naked tile is an edge-connected
component of the cells sharing a topmost square.
"""

from __future__ import annotations

import enum
import graphlib
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .decoration import ArrowDir
from .errors import InconsistentArrows, UnknownShape
from .geometry import odd_corners
from .view import EMPTY, Grid, Rect, top_square_arrays, window_level


class Shape(enum.Enum):
    BIG_SQUARE = "BigSquare"
    SMALL_SQUARE = "SmallSquare"
    DOMINO = "Domino"
    CHAIR = "Chair"


_SIZES = {Shape.BIG_SQUARE: 4, Shape.SMALL_SQUARE: 1, Shape.DOMINO: 2, Shape.CHAIR: 3}


@dataclass(frozen=True)
class NakedTile:
    shape: Shape
    cells: frozenset
    orientation: int
    centre: tuple
    clipped: bool = False

    @property
    def key(self):
        return (tuple(sorted(self.cells)), self.shape.value, self.orientation)


def classify(cells):
    """Shape and orientation of a set of cells; raises UnknownShape otherwise.

    Dominoes have orientation 0 when horizontal and 1 when vertical; a chair's
    orientation is the direction (as a turn index) of its missing quadrant.
    """
    cells = frozenset(tuple(c) for c in cells)
    if not cells:
        raise UnknownShape(cells)
    k0 = min(c[0] for c in cells)
    m0 = min(c[1] for c in cells)
    rel = {(k - k0, m - m0) for k, m in cells}
    box = {(0, 0), (1, 0), (0, 1), (1, 1)}
    if not rel <= box:
        raise UnknownShape(cells)
    if len(rel) == 4:
        return Shape.BIG_SQUARE, 0
    if len(rel) == 1:
        return Shape.SMALL_SQUARE, 0
    if len(rel) == 3:
        (dk, dm), = box - rel
        return Shape.CHAIR, ArrowDir.from_vector((2 * dk - 1, 2 * dm - 1)).turns
    if rel == {(0, 0), (1, 0)}:
        return Shape.DOMINO, 0
    if rel == {(0, 0), (0, 1)}:
        return Shape.DOMINO, 1
    raise UnknownShape(cells)


def components(cells):
    """Edge-connected components of a small set of cells, in sorted order."""
    todo = set(cells)
    out = []
    while todo:
        start = min(todo)
        todo.discard(start)
        comp, stack = {start}, [start]
        while stack:
            k, m = stack.pop()
            for nb in ((k + 1, m), (k - 1, m), (k, m + 1), (k, m - 1)):
                if nb in todo:
                    todo.discard(nb)
                    comp.add(nb)
                    stack.append(nb)
        out.append(frozenset(comp))
    return out


def square_cells(centre):
    cx, cy = centre
    return ((cx - 1, cy - 1), (cx, cy - 1), (cx - 1, cy), (cx, cy))


def _tiles_from_groups(groups, reliable):
    """Split each centre's cells into components and classify them.

    ``reliable(cell)`` says whether the view at a cell is known; a tile is clipped
    when some cell of its square is not.
    """
    tiles = []
    for centre in sorted(groups):
        clipped = not all(reliable(c) for c in square_cells(centre))
        for comp in components(groups[centre]):
            shape, orientation = classify(comp)
            tiles.append(NakedTile(shape, comp, orientation, centre, clipped))
    return tiles


def _window_cells(window):
    k0, m0, k1, m1 = window.bounds()
    k, m = np.meshgrid(np.arange(k0, k1), np.arange(m0, m1), indexing="ij")
    keep = window.mask()
    return k[keep], m[keep]


def visible_decomposition(n: int | None, window=None):
    """Naked tiles of the level-n patch over ``window``.

    With ``n=None`` the window is read from the limit tiling.  Without a window
    the whole support of level n is used.
    """
    if n is None:
        if window is None:
            raise ValueError("the limit tiling needs a window")
        n = window_level(window)
    if window is None:
        window = Rect.centred(1 << n)
    if n == 0:
        cells = [c for c in square_cells((0, 0)) if c in window]
        return _tiles_from_groups({(0, 0): cells} if cells else {}, lambda c: c in window)
    ks, ms = _window_cells(window)
    cx, cy, _, covered = top_square_arrays(n, ks, ms)
    groups = defaultdict(list)
    for k, m, x, y in zip(ks[covered].tolist(), ms[covered].tolist(), cx[covered].tolist(), cy[covered].tolist()):
        groups[(x, y)].append((k, m))
    limit = (1 << n) - 1

    def reliable(cell):
        # inside the window and covered twice at this level
        return cell in window and all(abs(a) + abs(b) <= limit for a, b in odd_corners(cell))

    return _tiles_from_groups(groups, reliable)


def implied_centre(cell, arrow: ArrowDir):
    """Corner of ``cell`` opposite to the one its arrow points at."""
    k, m = cell
    ax, ay = arrow.vector
    return (k + (1 - ax) // 2, m + (1 - ay) // 2)


def derive_naked_from_arrows(arrowed):
    """Naked tiles recovered from the arrows of a decorated patch (or grid) alone.

    Arrows locate the centre of the square each cell is visible from; a cell seen
    from one square but also covered by another puts the former above the latter,
    and these relations must admit a stacking order.
    """
    if isinstance(arrowed, Grid):
        arrowed = arrowed.to_patch()
    groups = defaultdict(list)
    above = defaultdict(set)
    for cell, tile in arrowed.tiles.items():
        centre = implied_centre(cell, tile.arrow)
        if (centre[0] + centre[1]) % 2 == 0:
            raise InconsistentArrows(f"arrow at {cell} points away from the even vertex {centre}")
        groups[centre].append(cell)
    for centre, cells in groups.items():
        for cell in cells:
            for other in odd_corners(cell):
                if other != centre and other in groups:
                    above[other].add(centre)
    try:
        tuple(graphlib.TopologicalSorter(above).static_order())
    except graphlib.CycleError as exc:
        raise InconsistentArrows(f"arrows imply cyclic stacking among squares {exc.args[1]}") from None
    support = arrowed.support
    return _tiles_from_groups(groups, lambda c: c in support)


def shape_census(tiles, include_clipped=False):
    counts = {s: 0 for s in Shape}
    for t in tiles:
        if include_clipped or not t.clipped:
            counts[t.shape] += 1
    return counts


def interior_tiles(tiles, window, collar=0):
    """Unclipped tiles whose square keeps ``collar`` cells away from the window edge."""
    k0, m0, k1, m1 = window.bounds()
    inner = Rect(k0 + collar, m0 + collar, k1 - collar, m1 - collar)
    return [t for t in tiles if not t.clipped and all(c in inner for c in square_cells(t.centre))]


def naked_grid(tiles, window):
    """Per-cell integer label of the naked tile covering it (-1 where none)."""
    k0, m0, k1, m1 = window.bounds()
    labels = np.full((k1 - k0, m1 - m0), EMPTY, dtype=np.int64)
    for i, t in enumerate(tiles):
        for k, m in t.cells:
            labels[k - k0, m - m0] = i
    return labels


def sizes_ok(tile: NakedTile):
    return len(tile.cells) == _SIZES[tile.shape]
