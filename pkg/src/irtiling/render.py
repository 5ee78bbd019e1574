"""SVG, JSON and plain-text output for arrowed and naked windows."""

from __future__ import annotations

import json
import re

from .decoration import ColourType
from .naked import NakedTile, Shape

DEFAULT_PALETTE = {
    ColourType.T1: "#000000",
    ColourType.T2: "#555555",
    ColourType.T3: "#aaaaaa",
    ColourType.T4: "#ffffff",
}
SHAPE_FILL = {
    Shape.BIG_SQUARE: "#f2f2f2",
    Shape.SMALL_SQUARE: "#9a9a9a",
    Shape.DOMINO: "#cfcfcf",
    Shape.CHAIR: "#6e6e6e",
}
UNIT = 16
_HEX = re.compile(r"#[0-9a-fA-F]{6}")


def parse_palette(text):
    """``T1=#000000,T2=#555555,...``; unspecified colours keep their defaults."""
    palette = dict(DEFAULT_PALETTE)
    if not text:
        return palette
    for item in text.split(","):
        if "=" not in item:
            raise ValueError(f"palette entry {item!r} is not NAME=#rrggbb")
        name, value = (s.strip() for s in item.split("=", 1))
        if not _HEX.fullmatch(value):
            raise ValueError(f"palette colour {value!r} is not #rrggbb")
        palette[ColourType(name)] = value.lower()
    return palette


def _luma(hex_colour):
    r, g, b = (int(hex_colour[i : i + 2], 16) for i in (1, 3, 5))
    return 0.299 * r + 0.587 * g + 0.114 * b


def _frame(bounds, unit):
    k0, m0, k1, m1 = bounds
    width, height = (k1 - k0) * unit, (m1 - m0) * unit

    def xy(x, y):
        # cell coordinates to pixels; y grows downwards in SVG
        return (x - k0) * unit, (m1 - y) * unit

    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    )
    return head, xy


def _num(v):
    return f"{v:g}"


def arrowed_svg(patch, palette=None, unit=UNIT):
    palette = palette or DEFAULT_PALETTE
    head, xy = _frame(patch.bounds(), unit)
    out = [head, f'<g stroke="#808080" stroke-width="{_num(unit / 16)}">']
    for (k, m), tile in sorted(patch.tiles.items()):
        x, y = xy(k, m + 1)
        out.append(f'<rect x="{x}" y="{y}" width="{unit}" height="{unit}" fill="{palette[tile.colour]}"/>')
    out.append("</g>")
    out.append(f'<g fill="none" stroke-width="{_num(unit / 10)}" stroke-linecap="round">')
    for (k, m), tile in sorted(patch.tiles.items()):
        ax, ay = tile.arrow.vector
        tip = (k + 0.5 + 0.25 * ax, m + 0.5 + 0.25 * ay)
        # arms run back along each axis from the tip
        arm1 = (tip[0] - 0.3 * ax, tip[1])
        arm2 = (tip[0], tip[1] - 0.3 * ay)
        pts = " ".join(f"{_num(px)},{_num(py)}" for px, py in (xy(*arm1), xy(*tip), xy(*arm2)))
        ink = "#ffffff" if _luma(palette[tile.colour]) < 128 else "#000000"
        out.append(f'<polyline points="{pts}" stroke="{ink}"/>')
    out.append("</g></svg>")
    return "\n".join(out) + "\n"


def naked_svg(tiles, bounds, unit=UNIT):
    head, xy = _frame(bounds, unit)
    owner = {}
    for i, t in enumerate(tiles):
        for c in t.cells:
            owner[c] = i
    out = [head, "<g>"]
    for (k, m) in sorted(owner):
        x, y = xy(k, m + 1)
        fill = SHAPE_FILL[tiles[owner[(k, m)]].shape]
        out.append(f'<rect x="{x}" y="{y}" width="{unit}" height="{unit}" fill="{fill}"/>')
    out.append("</g>")
    out.append(f'<g stroke="#000000" stroke-width="{_num(unit / 8)}" stroke-linecap="square">')
    for (k, m) in sorted(owner):
        here = owner[(k, m)]
        # edges where the neighbouring cell belongs to another tile (or is absent)
        if owner.get((k + 1, m)) != here:
            (x0, y0), (x1, y1) = xy(k + 1, m), xy(k + 1, m + 1)
            out.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}"/>')
        if owner.get((k - 1, m)) is None:
            (x0, y0), (x1, y1) = xy(k, m), xy(k, m + 1)
            out.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}"/>')
        if owner.get((k, m + 1)) != here:
            (x0, y0), (x1, y1) = xy(k, m + 1), xy(k + 1, m + 1)
            out.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}"/>')
        if owner.get((k, m - 1)) is None:
            (x0, y0), (x1, y1) = xy(k, m), xy(k + 1, m)
            out.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}"/>')
    out.append("</g></svg>")
    return "\n".join(out) + "\n"


def arrowed_json(patch, anchor):
    cells = [
        {"k": k, "m": m, "colour": t.colour.value, "arrow": t.arrow.name}
        for (k, m), t in sorted(patch.tiles.items())
    ]
    return json.dumps({"mode": "arrowed", "anchor": anchor, "cells": cells}, indent=1, sort_keys=True) + "\n"


def naked_json(tiles, anchor):
    items = [
        {
            "shape": t.shape.value,
            "orientation": t.orientation,
            "cells": [list(c) for c in sorted(t.cells)],
            "clipped": t.clipped,
        }
        for t in sorted(tiles, key=lambda t: min(t.cells))
    ]
    return json.dumps({"mode": "naked", "anchor": anchor, "cells": items}, indent=1, sort_keys=True) + "\n"


def arrowed_text(patch):
    lines = ["# k m colour arrow"]
    lines += [f"{k} {m} {t.colour.value} {t.arrow.name}" for (k, m), t in sorted(patch.tiles.items())]
    return "\n".join(lines) + "\n"


def naked_text(tiles: list[NakedTile]):
    lines = ["# shape orientation clipped cells"]
    for t in sorted(tiles, key=lambda t: min(t.cells)):
        cells = " ".join(f"{k},{m}" for k, m in sorted(t.cells))
        lines.append(f"{t.shape.value} {t.orientation} {int(t.clipped)} {cells}")
    return "\n".join(lines) + "\n"


def load_arrowed_json(text):
    """Inverse of :func:`arrowed_json` (returns a Patch)."""
    from .decoration import ArrowDir, TileInstance
    from .view import Patch

    data = json.loads(text)
    if data.get("mode") != "arrowed":
        raise ValueError("not an arrowed patch file")
    tiles = {}
    for item in data["cells"]:
        cell = (int(item["k"]), int(item["m"]))
        tiles[cell] = TileInstance(cell, ColourType(item["colour"]), ArrowDir[item["arrow"]])
    return Patch(tiles)
