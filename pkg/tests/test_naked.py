import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irtiling.decoration import ArrowDir, ColourType, TileInstance
from irtiling.errors import InconsistentArrows, UnknownShape
from irtiling.geometry import placement_of
from irtiling.naked import (
    NakedTile,
    Shape,
    classify,
    components,
    derive_naked_from_arrows,
    implied_centre,
    interior_tiles,
    naked_grid,
    shape_census,
    sizes_ok,
    square_cells,
    visible_decomposition,
)
from irtiling.view import Patch, Rect, level_grid, limit_grid


def arrow_from(cell, centre):
    k, m = cell
    return ArrowDir.from_vector((2 * k + 1 - 2 * centre[0], 2 * m + 1 - 2 * centre[1]))


def seen_from(pairs):
    """Patch where each cell's arrow points away from the given square centre."""
    return Patch({c: TileInstance(c, ColourType.T1, arrow_from(c, centre)) for c, centre in pairs})


@pytest.fixture(scope="module")
def limit128():
    window = Rect.centred(128)
    return window, visible_decomposition(None, window)


def test_classify_examples():
    assert classify([(0, 0), (1, 0), (0, 1), (1, 1)]) == (Shape.BIG_SQUARE, 0)
    assert classify([(5, 5)]) == (Shape.SMALL_SQUARE, 0)
    assert classify([(0, 0), (1, 0)]) == (Shape.DOMINO, 0)
    assert classify([(0, 0), (0, 1)]) == (Shape.DOMINO, 1)
    # missing the NE cell
    assert classify([(0, 0), (1, 0), (0, 1)]) == (Shape.CHAIR, ArrowDir.NE.turns)
    assert classify([(1, 0), (0, 1), (1, 1)]) == (Shape.CHAIR, ArrowDir.SW.turns)


@pytest.mark.parametrize("cells", [[], [(0, 0), (1, 1)], [(0, 0), (2, 0)], [(0, 0), (1, 0), (2, 0)]])
def test_classify_rejects(cells):
    with pytest.raises(UnknownShape):
        classify(cells)


def test_components_split_diagonals():
    assert components([(0, 0), (1, 1)]) == [frozenset({(0, 0)}), frozenset({(1, 1)})]
    assert components([(0, 0), (1, 0), (1, 1)]) == [frozenset({(0, 0), (1, 0), (1, 1)})]


def test_level_one():
    tiles = visible_decomposition(1)
    assert sum(len(t.cells) for t in tiles) == 12
    top = [t for t in tiles if t.centre == (-1, 0)]
    assert len(top) == 1 and top[0].shape is Shape.BIG_SQUARE


@pytest.mark.parametrize("n", range(1, 7))
def test_tiles_partition_the_support(n):
    tiles = visible_decomposition(n)
    window = Rect.centred(1 << n)
    covered = level_grid(n).codes >= 0
    labels = naked_grid(tiles, window)
    assert ((labels >= 0) == covered).all()
    assert sum(len(t.cells) for t in tiles) == covered.sum()
    assert all(sizes_ok(t) for t in tiles)
    # the top square is never overlapped
    assert any(t.shape is Shape.BIG_SQUARE and t.centre == placement_of((0,) * n).centre for t in tiles)


def test_census(limit128):
    _, tiles = limit128
    counts = shape_census(tiles)
    # frozen from the radius-128 limit window
    assert {s.value: c for s, c in counts.items()} == {
        "BigSquare": 1989,
        "SmallSquare": 17280,
        "Domino": 6141,
        "Chair": 9086,
    }


def test_diagonal_pairs_occur(limit128):
    _, tiles = limit128
    by_centre = {}
    for t in tiles:
        by_centre.setdefault(t.centre, []).append(t)
    pairs = [ts for ts in by_centre.values() if len(ts) == 2]
    assert pairs
    assert all({t.shape for t in ts} == {Shape.SMALL_SQUARE} for ts in pairs)


def test_arrows_recover_the_naked_tiling(limit128):
    window, tiles = limit128
    derived = derive_naked_from_arrows(limit_grid(window))
    expected = {t.key for t in interior_tiles(tiles, window, 2)}
    got = {t.key for t in interior_tiles(derived, window, 2)}
    assert expected == got
    assert len(expected) > 30000


@settings(max_examples=25, deadline=None)
@given(st.integers(-200, 200), st.integers(-200, 200), st.integers(4, 12))
def test_derivation_is_local(k, m, r):
    # tiles well inside a small window agree with those from a large one
    small = Rect(k - r, m - r, k + r, m + r)
    big = Rect(k - r - 8, m - r - 8, k + r + 8, m + r + 8)
    inner = {t.key for t in interior_tiles(derive_naked_from_arrows(limit_grid(small)), small, 2)}
    outer = {t.key for t in derive_naked_from_arrows(limit_grid(big)) if not t.clipped}
    assert inner <= outer


def test_single_square():
    cells = square_cells((3, 4))
    tiles = derive_naked_from_arrows(seen_from([(c, (3, 4)) for c in cells]))
    assert [(t.shape, t.centre, t.clipped) for t in tiles] == [(Shape.BIG_SQUARE, (3, 4), False)]


def test_implied_centre():
    assert implied_centre((0, 0), ArrowDir.NE) == (0, 0)
    assert implied_centre((0, 0), ArrowDir.SW) == (1, 1)
    for c in square_cells((2, 1)):
        assert implied_centre(c, arrow_from(c, (2, 1))) == (2, 1)


def test_even_centre_rejected():
    patch = Patch({(0, 0): TileInstance((0, 0), ColourType.T2, ArrowDir.NE)})
    with pytest.raises(InconsistentArrows):
        derive_naked_from_arrows(patch)


def test_cyclic_stacking_rejected():
    # four squares around the origin, each seen above the next one
    ring = [((0, 0), (1, 0)), ((-1, 0), (0, 1)), ((-1, -1), (-1, 0)), ((0, -1), (0, -1))]
    with pytest.raises(InconsistentArrows):
        derive_naked_from_arrows(seen_from(ring))
    # breaking one link removes the cycle
    assert len(derive_naked_from_arrows(seen_from(ring[:3]))) == 3


def test_clipped_flag():
    window = Rect(0, 0, 5, 5)
    tiles = visible_decomposition(None, window)
    assert any(t.clipped for t in tiles)
    assert shape_census(tiles, include_clipped=True)[Shape.SMALL_SQUARE] >= shape_census(tiles)[Shape.SMALL_SQUARE]
    assert isinstance(tiles[0], NakedTile)
