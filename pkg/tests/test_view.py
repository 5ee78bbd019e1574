import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irtiling.decoration import ArrowDir, ColourType, TileInstance, load_base
from irtiling.errors import OutsideSupport
from irtiling.geometry import rotate_cell
from irtiling.view import (
    Diamond,
    Patch,
    Rect,
    TileSource,
    boundary_arrow_report,
    cell_query,
    central_patch,
    central_radius,
    codes_from_raw,
    colour_counts,
    descend_arrays,
    diagonal_arrow_report,
    expected_diagonal_arrow,
    level_grid,
    limit_grid,
    limit_tile,
    overlay_view,
    stabilization_level,
    top_view,
    visible_square,
)

from . import oracles

BASE = load_base()


def as_names(patch):
    return {c: (t.colour.value, t.arrow.name) for c, t in patch.tiles.items()}


@pytest.mark.parametrize("n", range(0, 6))
def test_top_view_matches_bottom_up_painting(n):
    assert as_names(top_view(n)) == oracles.painted(n)


@pytest.mark.parametrize("n", range(1, 8))
def test_three_routes_agree(n):
    h = 1 << n
    k, m = np.meshgrid(np.arange(-h, h), np.arange(-h, h), indexing="ij")
    by_address = level_grid(n).codes
    by_descent = codes_from_raw(*descend_arrays(n, k, m), BASE)
    quadrant, rotation = overlay_view(n)
    by_overlay = codes_from_raw(quadrant, rotation, BASE)
    assert np.array_equal(by_address, by_descent)
    assert np.array_equal(by_address, by_overlay)


def test_level_one_has_twelve_tiles():
    patch = top_view(1)
    assert len(patch) == 12
    # the top square is fully visible
    assert all(visible_square(1, c).depth == (0,) for c in [(-2, -1), (-1, -1), (-2, 0), (-1, 0)])


def test_uncovered_cell():
    with pytest.raises(OutsideSupport):
        visible_square(2, (10, 10))
    assert level_grid(2).at((10, 10)) == -1


@settings(max_examples=200)
@given(st.integers(-64, 63), st.integers(-64, 63))
def test_scalar_descent_matches_grid(k, m):
    grid = level_grid(7)
    assert cell_query(7, (k, m)) == grid.tile((k, m))


@pytest.mark.parametrize("n", range(2, 10))
def test_central_patches_nest(n):
    small, big = central_patch(n), central_patch(n + 1)
    assert small.is_subpatch_of(big)
    assert len(small) == sum(1 for _ in Diamond(central_radius(n)).cells())


def test_central_patch_is_tight():
    # the level-n view first differs from level n+1 at cells whose centre has |x1| + |x2| = 2^(n-1)
    for n in range(3, 9):
        a, b = level_grid(n), level_grid(n + 1, Rect.centred(1 << n))
        diff = np.argwhere(a.codes != b.codes)
        k = diff[:, 0] + a.k0
        m = diff[:, 1] + a.m0
        norms = (np.abs(2 * k + 1) + np.abs(2 * m + 1)) // 2
        assert norms.min() == 1 << (n - 1)


def test_seed_is_three_t2_and_one_t1():
    counts = colour_counts(limit_grid(Rect.centred(1)).to_patch())
    assert counts[ColourType.T2] == 3 and counts[ColourType.T1] == 1


@settings(max_examples=100, deadline=None)
@given(st.integers(-3000, 3000), st.integers(-3000, 3000))
def test_limit_tile_is_stable(k, m):
    n = stabilization_level((k, m))
    tile = limit_tile((k, m))
    assert cell_query(n + 2, (k, m)) == tile


def test_limit_grid_matches_limit_tile():
    grid = limit_grid(Rect(90, -40, 110, -20))
    for cell in Rect(90, -40, 110, -20).cells():
        assert grid.tile(cell) == limit_tile(cell, verify=False)


@pytest.mark.parametrize("n", range(1, 9))
def test_boundary_arrows_point_out(n):
    total, bad = boundary_arrow_report(n)
    assert total > 0 and bad == []


@pytest.mark.parametrize("n", range(1, 9))
def test_diagonal_arrows(n):
    checked, bad = diagonal_arrow_report(n)
    assert checked > 0 and bad == []


def test_expected_diagonal_arrow():
    assert expected_diagonal_arrow((5, 5)) is ArrowDir.SE
    assert expected_diagonal_arrow((-3, 2)) is ArrowDir.NE
    assert expected_diagonal_arrow((2, -3)) is ArrowDir.SW
    assert expected_diagonal_arrow((1, 2)) is None


def test_tile_source_rotation():
    plain, turned = TileSource(), TileSource(turns=1)
    for cell in [(0, 0), (5, -7), (-12, 30)]:
        image = turned(rotate_cell(cell, 1))
        assert image.colour is plain(cell).colour
        assert image.arrow is plain(cell).arrow.rotated(1)


def test_patch_operations():
    p = Patch({(0, 0): TileInstance((0, 0), ColourType.T1, ArrowDir.SE)})
    q = p.translated((2, 3))
    assert (2, 3) in q and q[(2, 3)].colour is ColourType.T1
    r = p.rotated(1)
    assert r[(0, -1)].arrow is ArrowDir.SW
    assert p.is_subpatch_of(Patch({**p.tiles, **q.tiles}))
    assert p.to_grid().to_patch() == p


def test_diamond_membership():
    d = Diamond(2)
    assert set(d.cells()) == {(-1, -1), (0, -1), (-1, 0), (0, 0)}
    assert d.mask().sum() == 4
