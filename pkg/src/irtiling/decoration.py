"""Decorated base square: quadrant colours and outward diagonal arrows.

Directions are indexed by clockwise quarter turns away from south-east, so
``ArrowDir.SE.turns == 0`` and rotating a direction by one turn adds one.
Every prototile is drawn in its standard pose with the arrow pointing SE; a
tile's orientation is therefore just the turn index of its arrow.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import NotCovered
from .geometry import SquarePlacement


class ColourType(enum.Enum):
    T1 = "T1"  # black
    T2 = "T2"  # dark grey
    T3 = "T3"  # light grey
    T4 = "T4"  # white

    @property
    def index(self):
        return int(self.value[1]) - 1

    @classmethod
    def from_index(cls, i):
        return _COLOURS[i]

    def __lt__(self, other):
        return self.index < other.index


_COLOURS = tuple(ColourType)


class ArrowDir(enum.Enum):
    SE = (1, -1)
    SW = (-1, -1)
    NW = (-1, 1)
    NE = (1, 1)

    @property
    def vector(self):
        return self.value

    @property
    def turns(self):
        return _TURNS[self]

    @classmethod
    def from_turns(cls, t):
        return _DIRS[t % 4]

    @classmethod
    def from_vector(cls, v):
        return cls((1 if v[0] > 0 else -1, 1 if v[1] > 0 else -1))

    def rotated(self, turns):
        return ArrowDir.from_turns(self.turns + turns)


_DIRS = (ArrowDir.SE, ArrowDir.SW, ArrowDir.NW, ArrowDir.NE)
_TURNS = {d: i for i, d in enumerate(_DIRS)}

# a quadrant of the base square is named by its outward corner direction
Quadrant = ArrowDir
QUADRANTS = (Quadrant.NE, Quadrant.NW, Quadrant.SW, Quadrant.SE)


@dataclass(frozen=True)
class TileInstance:
    cell: tuple
    colour: ColourType
    arrow: ArrowDir

    @property
    def orientation(self):
        return self.arrow.turns

    @property
    def code(self):
        """Small integer 0..15 identifying (colour, arrow)."""
        return 4 * self.colour.index + self.arrow.turns

    @classmethod
    def from_code(cls, cell, code):
        return cls(tuple(cell), ColourType.from_index(code // 4), ArrowDir.from_turns(code % 4))

    def moved(self, cell):
        return TileInstance(tuple(cell), self.colour, self.arrow)


@dataclass(frozen=True)
class BaseDecoration:
    """Colour of each quadrant of the base square (a bijection onto T1..T4)."""

    ne: ColourType
    nw: ColourType
    sw: ColourType
    se: ColourType

    def __post_init__(self):
        if len({self.ne, self.nw, self.sw, self.se}) != 4:
            raise ValueError("quadrant colouring must be a bijection")

    def colour(self, quadrant: Quadrant) -> ColourType:
        return getattr(self, quadrant.name.lower())

    def by_turns(self):
        """Colour index for each quadrant turn index 0..3 (SE, SW, NW, NE)."""
        return tuple(self.colour(ArrowDir.from_turns(t)).index for t in range(4))

    def quadrant_of(self, colour: ColourType) -> Quadrant:
        for q in QUADRANTS:
            if self.colour(q) is colour:
                return q
        raise KeyError(colour)

    @property
    def key(self):
        return tuple(self.colour(q).value for q in QUADRANTS)

    def to_text(self, extra=None):
        lines = ["# quadrant colouring of the base square", "version=1"]
        lines += [f"{q.name}={self.colour(q).value}" for q in QUADRANTS]
        for k, v in (extra or {}).items():
            lines.append(f"{k}={v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        values = parse_config(text)
        try:
            return cls(*(ColourType(values[q.name]) for q in QUADRANTS))
        except KeyError as exc:
            raise ValueError(f"calibration file lacks key {exc}") from None


def parse_config(text):
    """Parse the ``key=value`` format used for calibration files."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def default_calibration_text():
    return resources.files("irtiling").joinpath("data/calibration.cfg").read_text()


@functools.lru_cache(maxsize=None)
def _default_base():
    return BaseDecoration.from_text(default_calibration_text())


def load_base(path=None) -> BaseDecoration:
    """Frozen colouring from ``path``, or the one shipped with the package."""
    if path is None:
        return _default_base()
    return BaseDecoration.from_text(Path(path).read_text())


def tile_at(square: SquarePlacement, cell, base: BaseDecoration) -> TileInstance:
    """Decoration that ``square`` gives to a unit cell it covers."""
    if not square.covers(cell):
        raise NotCovered(f"square centred {square.centre} does not cover {tuple(cell)}")
    k, m = cell
    outward = ArrowDir.from_vector((2 * k + 1 - 2 * square.centre[0], 2 * m + 1 - 2 * square.centre[1]))
    local = outward.rotated(-square.orientation)
    return TileInstance(tuple(cell), base.colour(local), outward)
