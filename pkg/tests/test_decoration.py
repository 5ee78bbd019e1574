import pytest
from hypothesis import given
from hypothesis import strategies as st

from irtiling.calibration import BlockAnchor, all_bijections, calibrate_base, seed_anchor_holds
from irtiling.decoration import (
    ArrowDir,
    BaseDecoration,
    ColourType,
    TileInstance,
    default_calibration_text,
    load_base,
    parse_config,
    tile_at,
)
from irtiling.errors import AmbiguousAssignment, NoConsistentAssignment, NotCovered
from irtiling.geometry import SquarePlacement, placement_of, rotate, rotate_cell
from irtiling.substitution import Position

BASE = load_base()
addresses = st.lists(st.integers(0, 3), min_size=1, max_size=6)


def test_frozen_colouring():
    assert BASE == BaseDecoration(ColourType.T3, ColourType.T1, ColourType.T2, ColourType.T4)
    assert parse_config(default_calibration_text())["survivors"] == "2"


def test_unrotated_square():
    tile = tile_at(SquarePlacement((0, 0), 0, ()), (0, 0), BASE)
    assert tile.arrow is ArrowDir.NE and tile.arrow.vector == (1, 1)
    assert tile.colour is BASE.ne


def test_rotated_square():
    # square centred (0, 1) turned once; cell (0, 0) is its SE quadrant in world terms
    tile = tile_at(SquarePlacement((0, 1), 1, (1,)), (0, 0), BASE)
    assert tile.arrow is ArrowDir.SE
    # undoing the turn puts the cell in the local NE quadrant
    assert tile.colour is BASE.colour(ArrowDir.SE.rotated(-1)) is BASE.ne


def test_not_covered():
    with pytest.raises(NotCovered):
        tile_at(SquarePlacement((0, 0), 0, ()), (1, 0), BASE)


@given(addresses, st.integers(0, 3))
def test_arrow_points_away_from_centre(address, which):
    square = placement_of(address)
    cell = square.cells()[which]
    tile = tile_at(square, cell, BASE)
    ax, ay = tile.arrow.vector
    ox, oy = 2 * cell[0] + 1 - 2 * square.centre[0], 2 * cell[1] + 1 - 2 * square.centre[1]
    assert ax * ox + ay * oy > 0


@given(addresses, st.integers(0, 3), st.integers(1, 3))
def test_equivariance(address, which, turns):
    square = placement_of(address)
    cell = square.cells()[which]
    tile = tile_at(square, cell, BASE)
    moved = SquarePlacement(rotate(square.centre, turns), (square.orientation + turns) % 4, square.depth)
    image = tile_at(moved, rotate_cell(cell, turns), BASE)
    assert image.colour is tile.colour
    assert image.arrow is tile.arrow.rotated(turns)


def test_codes_round_trip():
    for code in range(16):
        assert TileInstance.from_code((3, 4), code).code == code
    assert ArrowDir.SE.turns == 0 and ArrowDir.SE.rotated(1) is ArrowDir.SW


def test_config_round_trip(tmp_path):
    for base in all_bijections():
        path = tmp_path / "c.cfg"
        path.write_text(base.to_text({"note": "x"}))
        assert load_base(path) == base


def test_config_errors():
    with pytest.raises(ValueError):
        parse_config("NE T1")
    with pytest.raises(ValueError):
        BaseDecoration.from_text("NE=T1\nNW=T2\nSW=T3\n")
    with pytest.raises(ValueError):
        BaseDecoration(ColourType.T1, ColourType.T1, ColourType.T2, ColourType.T3)


def test_calibration_survivors():
    report = calibrate_base()
    assert report.tested == 24
    assert [s.key for s in report.survivors] == [("T3", "T1", "T2", "T4"), ("T4", "T1", "T2", "T3")]
    assert report.chosen == BASE
    assert "survivors=2" in report.to_text()


def test_seed_anchor_alone():
    # the seed pins NW and SW; the other two quadrants are free
    survivors = [b for b in all_bijections() if seed_anchor_holds(b)]
    assert {(b.nw, b.sw) for b in survivors} == {(ColourType.T1, ColourType.T2)}
    assert len(survivors) == 2


def test_calibration_negative_control():
    with pytest.raises(NoConsistentAssignment):
        calibrate_base(BlockAnchor(Position.UL))


def test_calibration_strict():
    with pytest.raises(AmbiguousAssignment) as info:
        calibrate_base(strict=True)
    assert len(info.value.survivors) == 2
