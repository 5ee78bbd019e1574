"""Verification suites: each returns a list of named checks with witnesses."""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field

import numpy as np

from . import analysis, naked, substitution
from .decoration import ArrowDir, ColourType
from .geometry import in_level_support, point_cover_count, square_arrays
from .view import (
    Grid,
    Rect,
    boundary_arrow_report,
    central_patch,
    diagonal_arrow_report,
    level_grid,
    limit_grid,
)


@dataclass
class Check:
    suite: str
    name: str
    passed: bool
    detail: str = ""
    witnesses: list = field(default_factory=list)

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        text = f"{flag} {self.suite}.{self.name}"
        if self.detail:
            text += f": {self.detail}"
        if self.witnesses:
            text += f" witnesses={self.witnesses[:5]}"
        return text

    def to_dict(self):
        return {
            "suite": self.suite,
            "name": self.name,
            "status": "PASS" if self.passed else "FAIL",
            "detail": self.detail,
            "witnesses": [repr(w) for w in self.witnesses[:20]],
        }


@dataclass
class Scale:
    level: int = 8
    radius: int = 128
    bound: int = 32
    samples: int = 100
    seed: int = 0
    base: object = None


# --- geometry ---------------------------------------------------------------------


def suite_lemma1(s: Scale):
    out = []
    for n in range(0, min(s.level, 10) + 1):
        cx, cy, _ = square_arrays(n)
        h = 1 << n
        key = (cx + h) * (4 * h) + (cy + h)
        unique = np.unique(key).size == key.size
        inside = bool(np.all(((cx + cy) % 2 == 1) & (np.abs(cx) + np.abs(cy) <= h - 1))) if n else bool(
            cx[0] == 0 and cy[0] == 0
        )
        # the formula's point count, enumerated independently
        xs = np.arange(-h, h + 1)
        X, Y = np.meshgrid(xs, xs, indexing="ij")
        expected = int((((X + Y) % 2 == 1) & (np.abs(X) + np.abs(Y) <= h - 1)).sum()) if n else 1
        ok = unique and inside and key.size == expected == 4**n
        out.append(Check("lemma1", f"centres.n{n}", ok, f"{key.size} squares, formula {expected}"))
    return out


def coverage_counts(n):
    """Covering degree of every cell of [-2^n, 2^n)^2 at level n."""
    cx, cy, _ = square_arrays(n)
    h = 1 << n
    counts = np.zeros((2 * h, 2 * h), dtype=np.int64)
    for dx in (-1, 0):
        for dy in (-1, 0):
            np.add.at(counts, (cx + dx + h, cy + dy + h), 1)
    return counts


def point_case(point):
    """Cover count predicted from where a point sits: open cell, edge, vertex."""
    x, y = point
    on_x, on_y = x.denominator == 1, y.denominator == 1
    if on_x and on_y:
        return 5 if (x + y) % 2 == 1 else 4
    return 3 if on_x or on_y else 2


def suite_lemma2(s: Scale):
    from fractions import Fraction

    out = []
    for n in range(1, min(s.level, 10) + 1):
        counts = coverage_counts(n)
        h = 1 << n
        k, m = np.meshgrid(np.arange(-h, h), np.arange(-h, h), indexing="ij")
        even = (k + m) % 2 == 0
        a = np.where(even, np.abs(k) + np.abs(m + 1), np.abs(k) + np.abs(m))
        b = np.where(even, np.abs(k + 1) + np.abs(m), np.abs(k + 1) + np.abs(m + 1))
        interior = (a <= h - 1) & (b <= h - 1)
        bad = np.argwhere(interior & (counts != 2))
        over = int((counts > 2).sum())
        out.append(
            Check(
                "lemma2",
                f"degree.n{n}",
                bad.size == 0 and over == 0,
                f"{int(interior.sum())} interior cells",
                [(int(i) - h, int(j) - h) for i, j in bad[:5]],
            )
        )
    n = min(max(s.level, 4), 6)
    h = 1 << n
    rng = random.Random(s.seed)
    cx, cy, _ = square_arrays(n)
    lim = (h - 4) // 2
    bad = []
    for _ in range(10_000):
        # a quarter of the points on vertices, a quarter on edges, the rest anywhere
        kind = rng.randrange(4)
        px = Fraction(rng.randrange(-lim * 4, lim * 4), 4)
        py = Fraction(rng.randrange(-lim * 4, lim * 4), 4)
        if kind == 0:
            px, py = Fraction(math.floor(px)), Fraction(math.floor(py))
        elif kind == 1:
            px = Fraction(math.floor(px))
        if abs(px) + abs(py) > lim:
            continue
        got = point_cover_count(n, (px, py))
        brute = int(((np.abs(cx - float(px)) <= 1) & (np.abs(cy - float(py)) <= 1)).sum())
        if not got == brute == point_case((px, py)):
            bad.append(((px, py), got, brute))
    out.append(Check("lemma2", f"point_counts.n{n}", not bad, "2/3/4/5 cases on a 10^4-point sample", bad))
    return out


# --- arrows and nesting --------------------------------------------------------------


def suite_arrows(s: Scale):
    out = []
    for n in range(1, min(s.level, 10) + 1):
        total, bad = boundary_arrow_report(n, s.base)
        out.append(Check("arrows", f"boundary.n{n}", not bad, f"{total} boundary tiles", bad))
        checked, bad = diagonal_arrow_report(n, s.base)
        out.append(Check("arrows", f"diagonal.n{n}", not bad, f"{checked} diagonal tiles", bad))
    return out


def suite_nesting(s: Scale):
    out = []
    top = min(max(s.level, 4), 11)
    patches = {n: central_patch(n, s.base) for n in range(2, top + 1)}
    for n in range(2, top):
        ok = patches[n].is_subpatch_of(patches[n + 1])
        out.append(Check("nesting", f"central.S{n}_in_S{n + 1}", ok, f"{len(patches[n])} tiles"))
    for n in range(1, min(top - 1, 9) + 1):
        window = Rect.centred(1 << (n + 1))
        ref = level_grid(n + 1, window, s.base)
        bound = math.sqrt(2) / (2 ** (n - 1) - 1) if n > 1 else math.inf
        worst = 0.0
        for k in range(n + 1, top + 1):
            r = analysis.grid_agreement_radius(ref, level_grid(k, window, s.base))
            worst = max(worst, min(1 / r, analysis.METRIC_CAP))
        out.append(Check("nesting", f"metric.n{n}", worst <= bound, f"max d = {worst:.4g} <= {bound:.4g}"))
    return out


# --- substitution ---------------------------------------------------------------------


def suite_substitution(s: Scale):
    out = []
    t0 = time.perf_counter()
    radius = max(8, min(s.radius, 512))
    rule = substitution.infer_rule(radius, base=s.base)
    out.append(Check("substitution", "consistent", True, f"radius {radius}, {time.perf_counter() - t0:.1f}s"))
    out.append(
        Check(
            "substitution",
            "T3_equals_T4",
            rule.blocks[ColourType.T3] == rule.blocks[ColourType.T4],
        )
    )
    # equivariance: blocks read off each rotated copy of the tiling agree
    grid = limit_grid(Rect.centred(32), s.base)
    same = True
    for turns in range(1, 4):
        rotated = grid.to_patch().rotated(turns).to_grid()
        same &= substitution.infer_rule(8, grid=rotated) == substitution.infer_rule(8, grid=grid)
    out.append(Check("substitution", "rotation_equivariant", same))
    k = substitution.primitivity_check(rule)
    out.append(Check("substitution", "primitive", k <= 3, f"power {k}"))
    for it in range(0, 7):
        rep = substitution.fixed_point_check(rule, it, s.base)
        out.append(
            Check(
                "substitution",
                f"fixed_point.k{it}",
                rep.ok,
                f"{rep.compared} cells",
                [] if rep.ok else [(rep.first_mismatch, rep.expected, rep.found)],
            )
        )
    return out


def sample_windows(count, radius, reach, seed):
    rng = random.Random(seed)
    for _ in range(count):
        cx, cy = rng.randrange(-reach, reach), rng.randrange(-reach, reach)
        yield Rect(cx - radius, cy - radius, cx + radius, cy + radius)


def suite_composition(s: Scale):
    rule = substitution.infer_rule(32, base=s.base)
    reach = 1024
    source = limit_grid(Rect.centred(reach + 16), s.base)
    radius = 8
    failures, wrong = [], []
    for w in sample_windows(s.samples, radius, reach, s.seed):
        i0, j0 = w.k0 - source.k0, w.m0 - source.m0
        grid = Grid(w.k0, w.m0, source.codes[i0 : i0 + 2 * radius, j0 : j0 + 2 * radius].copy())
        try:
            comp = substitution.compose(grid, rule)
        except Exception as exc:  # noqa: BLE001 - reported as a witness
            failures.append((w, type(exc).__name__))
            continue
        if comp.phase != (0, 0):
            wrong.append((w, comp.phase))
        for cell, tile in comp.patch.tiles.items():
            if source.tile(cell) != tile:
                wrong.append((w, cell))
        for cell, options in comp.ambiguous.items():
            if source.tile(cell) not in options:
                wrong.append((w, cell))
    return [
        Check("composition", "unique_phase", not failures, f"{s.samples} windows of radius {radius}", failures),
        Check("composition", "parents_match", not wrong, "recovered parents agree with the tiling", wrong),
    ]


# --- limit periodicity, periods, coincidence, naked --------------------------------------


def suite_limitperiodic(s: Scale):
    out = []
    top = min(max(s.level, 1), 5)
    window = Rect.centred(min(max(s.radius, 2 ** top), 256))
    grid = limit_grid(window, s.base)
    union = np.zeros(grid.codes.shape, dtype=bool)
    for n in range(1, top + 1):
        rep = analysis.mn_packing(n, grid, s.base, strict=False)
        union |= rep.covered
        out.append(
            Check("limitperiodic", f"families.n{n}", not rep.mismatches, f"{rep.copies} copies", rep.mismatches)
        )
        out.append(
            Check(
                "limitperiodic",
                f"density.n{n}",
                True,
                f"level-{n} families cover {rep.fraction:.4f} (union so far {union.mean():.4f})",
            )
        )
        # within radius 2^(n-1) the families up to n plus the diagonals cover everything
        inner = Rect.centred(2 ** (n - 1))
        sl = (slice(inner.k0 - grid.k0, inner.k1 - grid.k0), slice(inner.m0 - grid.m0, inner.m1 - grid.m0))
        diag = analysis.diagonal_mask(*grid.bounds)
        gaps = np.argwhere(~(union | diag)[sl])
        out.append(
            Check(
                "limitperiodic",
                f"coverage.n{n}",
                gaps.size == 0,
                f"radius {2 ** (n - 1)}",
                [(int(i) + inner.k0, int(j) + inner.m0) for i, j in gaps[:5]],
            )
        )
    first = analysis.mn_packing(1, grid, s.base).fraction
    out.append(Check("limitperiodic", "half_from_level1", abs(first - 0.5) <= 0.02, f"{first:.4f}"))
    return out


def suite_periods(s: Scale):
    grid = limit_grid(Rect.centred(s.radius), s.base)
    reports = analysis.find_periods(grid, s.bound)
    periods = [r.vector for r in reports if r.is_period and r.vector != (0, 0)]
    trivial = next(r for r in reports if r.vector == (0, 0)).is_period
    return [
        Check("periods", "no_nontrivial_period", not periods, f"{len(reports) - 1} vectors, radius {s.radius}", periods),
        Check("periods", "zero_is_period", trivial),
    ]


def suite_coincidence(s: Scale):
    rule = substitution.infer_rule(32, base=s.base)
    found = substitution.coincidences(rule)
    ur = rule.image(ColourType.T1, ArrowDir.SE)[substitution.Position.UR]
    names = sorted(p.name for p in found)
    return [
        Check("coincidence", "positions", {substitution.Position.UR, substitution.Position.LL} <= found, f"{names}"),
        Check(
            "coincidence",
            "UR_entry",
            ur == (ColourType.T1, ArrowDir.SE),
            f"{ur[0].value} arrow {ur[1].vector}",
        ),
    ]


def suite_naked(s: Scale):
    window = Rect.centred(min(s.radius, 128))
    tiles = naked.visible_decomposition(None, window)
    census = naked.shape_census(tiles)
    partition = sum(len(t.cells) for t in tiles) == (window.k1 - window.k0) * (window.m1 - window.m0)
    derived = naked.derive_naked_from_arrows(limit_grid(window, s.base))
    a = {t.key for t in naked.interior_tiles(tiles, window, 2)}
    b = {t.key for t in naked.interior_tiles(derived, window, 2)}
    return [
        Check("naked", "partition", partition),
        Check(
            "naked",
            "four_shapes",
            all(v > 0 for v in census.values()),
            ", ".join(f"{k.value}={v}" for k, v in census.items()),
        ),
        Check("naked", "derived_equals_visible", a == b, f"{len(a)} interior tiles", sorted(a ^ b)[:5]),
    ]


SUITES = {
    "lemma1": suite_lemma1,
    "lemma2": suite_lemma2,
    "arrows": suite_arrows,
    "nesting": suite_nesting,
    "substitution": suite_substitution,
    "composition": suite_composition,
    "limitperiodic": suite_limitperiodic,
    "periods": suite_periods,
    "coincidence": suite_coincidence,
    "naked": suite_naked,
}


def run_suites(names, scale: Scale):
    checks = []
    for name in names:
        checks.extend(SUITES[name](scale))
    return checks
