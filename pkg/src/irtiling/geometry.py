"""Addresses, placements, stacking order and coverage of the stacked-square patches.

The level-n patch consists of four copies of the level-(n-1) patch.  Copy ``g``
(g = 0..3, listed from the top of the stack downwards) is rotated by ``g``
clockwise quarter turns and shifted by ``2**(n-1) * OFFSETS[g]``.  A square of
the level-n patch is identified by its address: the copy index chosen at
every level, outermost level first.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .errors import LengthMismatch, OutsideSupport, ResourceLimit

LEVEL_CAP = 12

# translation direction of copy g, before scaling by 2**(level-1)
OFFSETS = ((-1, 0), (0, 1), (1, 0), (0, -1))

Address = tuple  # tuple[int, ...] over {0, 1, 2, 3}
Cell = tuple  # (k, m): the unit square [k, k+1] x [m, m+1]


def rotate(v, turns):
    """Rotate an integer (or rational) vector by ``turns`` clockwise quarter turns."""
    x, y = v
    turns %= 4
    if turns == 1:
        return (y, -x)
    if turns == 2:
        return (-x, -y)
    if turns == 3:
        return (-y, x)
    return (x, y)


def rotate_cell(cell, turns):
    """Image of a unit cell under the rotation about the origin."""
    k, m = cell
    cx, cy = rotate((2 * k + 1, 2 * m + 1), turns)
    return ((cx - 1) // 2, (cy - 1) // 2)


def norm1(v):
    return abs(v[0]) + abs(v[1])


@dataclass(frozen=True)
class Lattice:
    """Integer lattice spanned by two generators (default: <(1,1),(1,-1)>)."""

    g1: tuple = (1, 1)
    g2: tuple = (1, -1)

    def __post_init__(self):
        if self.det == 0:
            raise ValueError("lattice generators are linearly dependent")

    @property
    def det(self):
        return self.g1[0] * self.g2[1] - self.g1[1] * self.g2[0]

    def coordinates(self, x, offset=(0, 0), scale=1):
        """Integer coefficients (a, b) with x = offset + scale*(a*g1 + b*g2), or None."""
        dx, dy = x[0] - offset[0], x[1] - offset[1]
        d = self.det * scale
        a_num = dx * self.g2[1] - dy * self.g2[0]
        b_num = self.g1[0] * dy - self.g1[1] * dx
        if a_num % d or b_num % d:
            return None
        return (a_num // d, b_num // d)

    def contains(self, x, offset=(0, 0), scale=1):
        """Exact test for x in offset + scale * (this lattice)."""
        return self.coordinates(x, offset, scale) is not None


CHECKER_LATTICE = Lattice()


@dataclass(frozen=True)
class SquarePlacement:
    centre: tuple
    orientation: int
    depth: Address

    def covers(self, cell):
        k, m = cell
        cx, cy = self.centre
        return cx - 1 <= k <= cx and cy - 1 <= m <= cy

    def cells(self):
        cx, cy = self.centre
        return [(cx - 1, cy - 1), (cx, cy - 1), (cx - 1, cy), (cx, cy)]


class Stack(enum.Enum):
    ABOVE = "above"
    BELOW = "below"
    EQUAL = "equal"


def _check_address(address):
    address = tuple(address)
    for d in address:
        if d not in (0, 1, 2, 3):
            raise ValueError(f"address digit {d!r} not in 0..3")
    return address


def placement_of(address: Sequence[int]) -> SquarePlacement:
    address = _check_address(address)
    if not address:
        raise ValueError("address must be nonempty")
    n = len(address)
    centre = (0, 0)
    orientation = 0
    # innermost digit acts first
    for level, g in zip(range(1, n + 1), reversed(address)):
        h = 1 << (level - 1)
        rx, ry = rotate(centre, g)
        centre = (rx + h * OFFSETS[g][0], ry + h * OFFSETS[g][1])
        orientation += g
    return SquarePlacement(centre, orientation % 4, address)


def in_level_support(centre, n):
    """True iff ``centre`` is the centre of a square of the level-n patch."""
    if n == 0:
        return tuple(centre) == (0, 0)
    return (centre[0] + centre[1]) % 2 == 1 and norm1(centre) <= (1 << n) - 1


def address_of(centre, n) -> Address:
    """Address of the unique level-n square with the given centre."""
    if not in_level_support(centre, n):
        raise OutsideSupport(f"no square of level {n} is centred at {centre}")
    x, y = centre
    digits = []
    for level in range(n, 0, -1):
        h = 1 << (level - 1)
        for g in range(4):
            lx, ly = rotate((x - h * OFFSETS[g][0], y - h * OFFSETS[g][1]), -g)
            if in_level_support((lx, ly), level - 1):
                digits.append(g)
                x, y = lx, ly
                break
        else:  # pragma: no cover - excluded by the support test above
            raise AssertionError(f"descent lost centre {centre} at level {level}")
    return tuple(digits)


def _check_level(n, cap):
    if n < 0:
        raise ValueError("level must be nonnegative")
    if n > cap:
        raise ResourceLimit(f"level {n} exceeds the enumeration cap {cap}")


def enumerate_squares(n: int, cap: int = LEVEL_CAP) -> Iterator[SquarePlacement]:
    """All squares of the level-n patch, from the top of the stack to the bottom."""
    _check_level(n, cap)
    if n == 0:
        yield SquarePlacement((0, 0), 0, ())
        return
    cx, cy, orient = square_arrays(n, cap)
    for index in range(len(cx)):
        digits = tuple((index >> (2 * (n - 1 - j))) & 3 for j in range(n))
        yield SquarePlacement((int(cx[index]), int(cy[index])), int(orient[index]), digits)


def square_arrays(n: int, cap: int = LEVEL_CAP):
    """Centres and orientations of all level-n squares as numpy arrays.

    Index i holds the square whose address, read as a base-4 numeral with the
    outermost digit most significant, equals i; hence array order is stacking
    order with the topmost square first.
    """
    _check_level(n, cap)
    cx = np.zeros(1, dtype=np.int64)
    cy = np.zeros(1, dtype=np.int64)
    orient = np.zeros(1, dtype=np.int64)
    for level in range(1, n + 1):
        h = 1 << (level - 1)
        parts = []
        for g in range(4):
            rx, ry = rotate((cx, cy), g)
            parts.append((rx + h * OFFSETS[g][0], ry + h * OFFSETS[g][1], (orient + g) % 4))
        cx = np.concatenate([p[0] for p in parts])
        cy = np.concatenate([p[1] for p in parts])
        orient = np.concatenate([p[2] for p in parts])
    return cx, cy, orient


def stack_compare(a: Sequence[int], b: Sequence[int]) -> Stack:
    a, b = _check_address(a), _check_address(b)
    if len(a) != len(b):
        raise LengthMismatch(f"addresses of lengths {len(a)} and {len(b)}")
    if a == b:
        return Stack.EQUAL
    return Stack.ABOVE if a < b else Stack.BELOW


def odd_corners(cell):
    """The two corners of a cell with odd coordinate sum (candidate square centres)."""
    k, m = cell
    if (k + m) % 2 == 0:
        return ((k, m + 1), (k + 1, m))
    return ((k, m), (k + 1, m + 1))


def covering_squares(n: int, cell) -> tuple[SquarePlacement, SquarePlacement]:
    """The two squares covering an interior cell, topmost first."""
    if n < 1:
        raise OutsideSupport("the level-0 patch covers no cell twice")
    corners = odd_corners(cell)
    if not all(in_level_support(c, n) for c in corners):
        raise OutsideSupport(f"cell {tuple(cell)} is not covered twice at level {n}")
    first, second = (placement_of(address_of(c, n)) for c in corners)
    if stack_compare(first.depth, second.depth) is Stack.BELOW:
        first, second = second, first
    return first, second


def point_cover_count(n: int, point) -> int:
    """Number of closed level-n squares containing a point with rational coordinates.

    The point must lie deep enough inside the support that every square centre
    within sup-distance one of it exists at this level.
    """
    px, py = (Fraction(c) for c in point)
    candidates = [
        (x, y)
        for x in range(int(np.floor(px)) - 1, int(np.ceil(px)) + 2)
        for y in range(int(np.floor(py)) - 1, int(np.ceil(py)) + 2)
        if (x + y) % 2 == 1 and abs(x - px) <= 1 and abs(y - py) <= 1
    ]
    if n < 1 or not all(in_level_support(c, n) for c in candidates):
        raise OutsideSupport(f"point {point} is too close to the level-{n} boundary")
    return len(candidates)
