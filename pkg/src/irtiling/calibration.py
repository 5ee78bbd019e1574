"""Recover the quadrant colouring of the base square from two textual anchors.

Anchor (a): the four cells around the origin are three T2 tiles and one T1 tile.
Anchor (b): in the inferred substitution every standard-pose block has a T1 tile
with arrow SE in a fixed position (upper right).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .decoration import ArrowDir, BaseDecoration, ColourType
from .errors import AmbiguousAssignment, InconsistentBlock, NoConsistentAssignment
from .substitution import Position, infer_rule
from .view import Rect, limit_grid

SEED_CELLS = ((-1, -1), (0, -1), (-1, 0), (0, 0))
SEED_COLOURS = (ColourType.T1, ColourType.T2, ColourType.T2, ColourType.T2)


@dataclass(frozen=True)
class BlockAnchor:
    position: Position = Position.UR
    colour: ColourType = ColourType.T1
    arrow: ArrowDir = ArrowDir.SE


@dataclass
class CalibrationReport:
    tested: int
    survivors: list
    chosen: BaseDecoration | None
    anchor: BlockAnchor

    def to_text(self):
        extra = {"survivors": len(self.survivors)}
        for i, s in enumerate(self.survivors):
            extra[f"survivor.{i}"] = ",".join(f"{q}:{c}" for q, c in zip(("NE", "NW", "SW", "SE"), s.key))
        extra["anchor"] = f"{self.anchor.position.name}:{self.anchor.colour.value}:{self.anchor.arrow.name}"
        return self.chosen.to_text(extra)


def all_bijections():
    for perm in itertools.permutations(ColourType):
        yield BaseDecoration(*perm)


def seed_anchor_holds(base: BaseDecoration) -> bool:
    grid = limit_grid(Rect.centred(1), base)
    colours = sorted(grid.tile(c).colour for c in SEED_CELLS)
    return tuple(colours) == SEED_COLOURS


def block_anchor_holds(base: BaseDecoration, anchor: BlockAnchor, radius: int = 16) -> bool:
    try:
        rule = infer_rule(radius, base=base)
    except InconsistentBlock:
        return False
    return all(
        rule.image(c, ArrowDir.SE)[anchor.position] == (anchor.colour, anchor.arrow) for c in ColourType
    )


def calibrate_base(anchor: BlockAnchor = BlockAnchor(), strict: bool = False, radius: int = 16) -> CalibrationReport:
    """Search all 24 colourings; keep those meeting both anchors.

    The canonical pick is the survivor whose (NE, NW, SW, SE) colour names sort
    first.  ``strict`` turns more than one survivor into AmbiguousAssignment.
    """
    survivors = [
        b for b in all_bijections() if seed_anchor_holds(b) and block_anchor_holds(b, anchor, radius)
    ]
    if not survivors:
        raise NoConsistentAssignment(f"no colouring satisfies the seed anchor and {anchor}")
    survivors.sort(key=lambda b: b.key)
    if strict and len(survivors) > 1:
        raise AmbiguousAssignment(survivors)
    return CalibrationReport(24, survivors, survivors[0], anchor)
