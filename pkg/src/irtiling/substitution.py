"""The 2x2 block substitution of the arrowed tiling, inferred from the tiling itself.

The tiling is a fixed point of the substitution with the block of the tile at
cell ``c`` occupying cells ``2c + {0,1}^2``.  A rule stores, for each colour in
its standard pose (arrow SE), the four children as (colour, arrow turns
relative to the parent).  A parent with arrow turn index ``a`` gets the block
rotated by ``a`` quarter turns about the block centre.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .decoration import ArrowDir, ColourType, TileInstance
from .errors import (
    AmbiguousComposition,
    InconsistentBlock,
    NoComposition,
    NotPrimitive,
)
from .view import EMPTY, Grid, Patch, Rect, limit_grid


class Position(enum.Enum):
    LL = (0, 0)
    LR = (1, 0)
    UL = (0, 1)
    UR = (1, 1)

    @property
    def offset(self):
        return self.value

    def rotated(self, turns):
        """Position after rotating the block by ``turns`` clockwise quarter turns."""
        x, y = 2 * self.value[0] - 1, 2 * self.value[1] - 1
        for _ in range(turns % 4):
            x, y = y, -x
        return Position(((x + 1) // 2, (y + 1) // 2))


POSITIONS = (Position.LL, Position.LR, Position.UL, Position.UR)


@dataclass(frozen=True)
class SubstitutionRule:
    """Standard-pose blocks: ``blocks[colour][position] == (child colour, arrow delta)``."""

    blocks: dict = field(hash=False)
    scale: int = 2

    def __post_init__(self):
        for colour in ColourType:
            block = self.blocks.get(colour)
            if block is None or set(block) != set(POSITIONS):
                raise ValueError(f"rule lacks a complete block for {colour}")

    def __eq__(self, other):
        return isinstance(other, SubstitutionRule) and self.blocks == other.blocks

    def image(self, colour: ColourType, arrow: ArrowDir):
        """Children of one parent tile: ``{position: (colour, arrow)}`` in world orientation."""
        a = arrow.turns
        out = {}
        for local, (child, delta) in self.blocks[colour].items():
            out[local.rotated(a)] = (child, ArrowDir.from_turns(a + delta))
        return out

    def image_codes(self):
        """Array ``[parent code, world position index] -> child code`` for all 16 parents."""
        table = np.zeros((16, 4), dtype=np.int64)
        for code in range(16):
            tile = TileInstance.from_code((0, 0), code)
            img = self.image(tile.colour, tile.arrow)
            for p, pos in enumerate(POSITIONS):
                c, arrow = img[pos]
                table[code, p] = 4 * c.index + arrow.turns
        return table

    def colour_matrix(self):
        """M[i, j] = number of children of colour j in the image of colour i."""
        m = np.zeros((4, 4), dtype=np.int64)
        for colour, block in self.blocks.items():
            for child, _ in block.values():
                m[colour.index, child.index] += 1
        return m

    def to_text(self):
        lines = [
            "# 2x2 block substitution; parents in standard pose (arrow SE)",
            "# parent position child arrow-delta",
            f"scale {self.scale}",
        ]
        for colour in ColourType:
            for pos in POSITIONS:
                child, delta = self.blocks[colour][pos]
                lines.append(f"{colour.value} {pos.name} {child.value} {delta}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        blocks = {c: {} for c in ColourType}
        scale = 2
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].split()
            if not line:
                continue
            if line[0] == "scale":
                scale = int(line[1])
                continue
            if len(line) != 4:
                raise ValueError(f"line {lineno}: expected 'parent position child delta'")
            parent, pos, child, delta = line
            blocks[ColourType(parent)][Position[pos]] = (ColourType(child), int(delta) % 4)
        return cls(blocks, scale)


# --- inference ----------------------------------------------------------------


def _children(grid: Grid, k0, m0, k1, m1):
    """Parent codes for cells in [k0,k1)x[m0,m1) and child codes per world position."""
    def sub(a0, b0, step):
        i0, j0 = a0 - grid.k0, b0 - grid.m0
        return grid.codes[i0 : i0 + step * (k1 - k0) : step, j0 : j0 + step * (m1 - m0) : step]

    parents = sub(k0, m0, 1).astype(np.int64)
    children = [sub(2 * k0 + dx, 2 * m0 + dy, 2).astype(np.int64) for dx, dy in (p.offset for p in POSITIONS)]
    return parents, children


def infer_rule(radius: int = 32, grid: Grid | None = None, base=None) -> SubstitutionRule:
    """Read the substitution off the tiling: the tile at c fixes the block at 2c.

    ``grid`` defaults to the limit tiling; it must cover cells [-2r, 2r)^2.
    """
    if radius < 8:
        raise ValueError("inference window radius must be at least 8")
    if grid is None:
        grid = limit_grid(Rect.centred(2 * radius), base)
    parents, children = _children(grid, -radius, -radius, radius, radius)
    if (parents < 0).any() or any((c < 0).any() for c in children):
        raise ValueError("grid does not cover the inference window")
    a = parents % 4
    colour = parents // 4
    found = {}
    for local in POSITIONS:
        # world position of the local slot depends on the parent's turn index
        world = np.stack([children[POSITIONS.index(local.rotated(t))] for t in range(4)])
        child = np.take_along_axis(world, a[None], axis=0)[0]
        entry = 4 * (child // 4) + (child % 4 - a) % 4
        for ci in range(4):
            values = entry[colour == ci]
            if values.size == 0:
                raise ValueError(f"colour T{ci + 1} does not occur in the inference window")
            first = values[0]
            bad = np.argwhere((colour == ci) & (entry != first))
            if bad.size:
                i, j = bad[0]
                raise InconsistentBlock((int(i) - radius, int(j) - radius), ColourType.from_index(ci))
            found.setdefault(ColourType.from_index(ci), {})[local] = (
                ColourType.from_index(int(first) // 4),
                int(first) % 4,
            )
    return SubstitutionRule(found)


# --- application ----------------------------------------------------------------


def apply_rule(rule: SubstitutionRule, patch: Patch) -> Patch:
    out = {}
    for (k, m), tile in patch.tiles.items():
        for pos, (colour, arrow) in rule.image(tile.colour, tile.arrow).items():
            cell = (2 * k + pos.offset[0], 2 * m + pos.offset[1])
            out[cell] = TileInstance(cell, colour, arrow)
    return Patch(out)


def apply_grid(rule: SubstitutionRule, grid: Grid) -> Grid:
    """Dense version of :func:`apply_rule`."""
    table = rule.image_codes()
    h, w = grid.codes.shape
    out = np.full((2 * h, 2 * w), EMPTY, dtype=np.int8)
    src = grid.codes.astype(np.int64)
    present = src >= 0
    for p, pos in enumerate(POSITIONS):
        dx, dy = pos.offset
        out[dx::2, dy::2] = np.where(present, table[np.maximum(src, 0), p], EMPTY)
    return Grid(2 * grid.k0, 2 * grid.m0, out)


def iterate(rule: SubstitutionRule, patch: Patch, times: int) -> Patch:
    for _ in range(times):
        patch = apply_rule(rule, patch)
    return patch


def seed_patch(base=None) -> Patch:
    """The four tiles around the origin of the limit tiling."""
    grid = limit_grid(Rect(-1, -1, 1, 1), base)
    return grid.to_patch()


def supertile(rule: SubstitutionRule, colour: ColourType, level: int, arrow: ArrowDir = ArrowDir.SE) -> Patch:
    """Level-k supertile of one prototile placed at cell (0, 0)."""
    return iterate(rule, Patch({(0, 0): TileInstance((0, 0), colour, arrow)}), level)


@dataclass
class FixedPointReport:
    iterations: int
    compared: int
    first_mismatch: tuple | None = None
    expected: object = None
    found: object = None

    @property
    def ok(self):
        return self.first_mismatch is None


def fixed_point_check(rule: SubstitutionRule, k: int, base=None, collar: int = 0) -> FixedPointReport:
    """Compare ``rule**k(seed)`` with the limit tiling on its support (minus a collar)."""
    if not 0 <= k <= 8:
        raise ValueError("iterations limited to 0..8")
    grid = seed_patch(base).to_grid()
    for _ in range(k):
        grid = apply_grid(rule, grid)
    k0, m0, k1, m1 = grid.bounds
    window = Rect(k0 + collar, m0 + collar, k1 - collar, m1 - collar)
    truth = limit_grid(window, base)
    mine = grid.codes[collar : grid.codes.shape[0] - collar, collar : grid.codes.shape[1] - collar]
    diff = np.argwhere(mine != truth.codes)
    report = FixedPointReport(k, int(mine.size))
    if diff.size:
        i, j = diff[0]
        cell = (int(i) + window.k0, int(j) + window.m0)
        report.first_mismatch = cell
        report.expected = truth.tile(cell)
        report.found = TileInstance.from_code(cell, int(mine[i, j]))
    return report


# --- composition ------------------------------------------------------------------


def _block_keys(codes, ox, oy):
    """Keys of complete 2x2 blocks with lower-left corners at (ox + 2a, oy + 2b)."""
    c = codes[ox:, oy:].astype(np.int64)
    h, w = c.shape[0] // 2, c.shape[1] // 2
    c = c[: 2 * h, : 2 * w]
    parts = [c[dx::2, dy::2] for dx, dy in (p.offset for p in POSITIONS)]
    complete = np.all([p >= 0 for p in parts], axis=0)
    key = sum(np.maximum(p, 0) << (4 * i) for i, p in enumerate(parts))
    return key, complete


def preimage_table(rule: SubstitutionRule):
    """Bitmask over the 16 parent codes for each of the 2**16 possible block keys."""
    table = np.zeros(1 << 16, dtype=np.uint16)
    images = rule.image_codes()
    for code in range(16):
        key = sum(int(images[code, p]) << (4 * p) for p in range(4))
        table[key] |= 1 << code
    return table


def valid_phases(rule: SubstitutionRule, grid: Grid, table=None):
    """Phases (ox, oy) for which every complete block is the image of some tile."""
    table = preimage_table(rule) if table is None else table
    phases = []
    for ox in (0, 1):
        for oy in (0, 1):
            # phase is relative to even cell coordinates
            sx, sy = (ox - grid.k0) % 2, (oy - grid.m0) % 2
            key, complete = _block_keys(grid.codes, sx, sy)
            if complete.any() and (table[key[complete]] != 0).all():
                phases.append((ox, oy))
    return phases


@dataclass
class Composition:
    """Result of undoing one substitution step.

    ``patch`` holds parents whose colour is determined; ``ambiguous`` maps the
    remaining parent cells to the set of candidate tiles (T3 and T4 have equal
    images, so they can only be told apart from the grandparent block).
    """

    phase: tuple
    patch: Patch
    ambiguous: dict


def _candidates(mask):
    return {TileInstance.from_code((0, 0), c) for c in range(16) if mask >> c & 1}


def compose(patch, rule: SubstitutionRule) -> Composition:
    """Identify the supertiles of a patch and return the parent patch."""
    grid = patch if isinstance(patch, Grid) else patch.to_grid()
    table = preimage_table(rule)
    phases = valid_phases(rule, grid, table)
    if not phases:
        raise NoComposition("no phase makes every complete block a supertile")
    if len(phases) > 1:
        raise AmbiguousComposition(phases)
    ox, oy = phases[0]
    sx, sy = (ox - grid.k0) % 2, (oy - grid.m0) % 2
    key, complete = _block_keys(grid.codes, sx, sy)
    masks = np.where(complete, table[key], 0).astype(np.int64)
    pk0 = (grid.k0 + sx - ox) // 2
    pm0 = (grid.m0 + sy - oy) // 2
    masks = _refine(rule, masks, pk0, pm0)
    tiles, ambiguous = {}, {}
    for i, j in np.argwhere(masks != 0):
        cell = (int(i) + pk0, int(j) + pm0)
        mask = int(masks[i, j])
        if mask & (mask - 1) == 0:
            tiles[cell] = TileInstance.from_code(cell, mask.bit_length() - 1)
        else:
            ambiguous[cell] = {t.moved(cell) for t in _candidates(mask)}
    return Composition((ox, oy), Patch(tiles), ambiguous)


def _refine(rule, masks, k0, m0):
    """Narrow parent candidates using the unique grandparent phase, when it exists."""
    if not ((masks != 0) & (masks & (masks - 1) != 0)).any():
        return masks
    images = rule.image_codes()
    best = None
    for ox in (0, 1):
        for oy in (0, 1):
            sx, sy = (ox - k0) % 2, (oy - m0) % 2
            sub = masks[sx:, sy:]
            h, w = sub.shape[0] // 2, sub.shape[1] // 2
            sub = sub[: 2 * h, : 2 * w]
            parts = [sub[dx::2, dy::2] for dx, dy in (p.offset for p in POSITIONS)]
            complete = np.all([p != 0 for p in parts], axis=0)
            if not complete.any():
                continue
            narrowed = [np.zeros_like(p) for p in parts]
            consistent = np.zeros(complete.shape, dtype=bool)
            for g in range(16):
                ok = complete.copy()
                for p in range(4):
                    ok &= (parts[p] >> images[g, p]) & 1 == 1
                consistent |= ok
                for p in range(4):
                    narrowed[p] |= np.where(ok, 1 << images[g, p], 0)
            if (consistent == complete).all():
                if best is not None:
                    return masks  # grandparent phase not unique: keep what we have
                best = (sx, sy, complete, narrowed)
    if best is None:
        return masks
    sx, sy, complete, narrowed = best
    out = masks.copy()
    for p, (dx, dy) in enumerate(pos.offset for pos in POSITIONS):
        view = out[sx + dx : sx + dx + 2 * complete.shape[0] : 2, sy + dy : sy + dy + 2 * complete.shape[1] : 2]
        view[complete] &= narrowed[p][complete]
    return out


# --- structural properties --------------------------------------------------------


def coincidences(rule: SubstitutionRule):
    """Block positions at which all four standard-pose images carry the same tile."""
    return {
        pos
        for pos in POSITIONS
        if len({rule.blocks[c][pos] for c in ColourType}) == 1
    }


def primitivity_check(rule: SubstitutionRule, max_power: int = 6) -> int:
    """Smallest k such that every colour's level-k supertile contains all four colours."""
    m = rule.colour_matrix()
    power = np.eye(4, dtype=np.int64)
    for k in range(1, max_power + 1):
        power = power @ m
        if (power > 0).all():
            return k
    raise NotPrimitive(f"no power up to {max_power} is positive")


def block_arrow_violations(rule: SubstitutionRule):
    """Children whose arrow points straight at, or straight away from, the block centre."""
    bad = []
    for colour, block in rule.blocks.items():
        for pos, (child, delta) in block.items():
            out = (2 * pos.offset[0] - 1, 2 * pos.offset[1] - 1)
            arrow = ArrowDir.from_turns(delta).vector
            if arrow == out or arrow == (-out[0], -out[1]):
                bad.append((colour, pos))
    return bad


def block_colour_counts(rule: SubstitutionRule):
    return {c: len({child for child, _ in rule.blocks[c].values()}) for c in ColourType}
