import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irtiling.decoration import ArrowDir, ColourType, TileInstance
from irtiling.errors import AmbiguousComposition, InconsistentBlock, NoComposition, NotPrimitive
from irtiling.substitution import (
    POSITIONS,
    Position,
    SubstitutionRule,
    apply_grid,
    apply_rule,
    block_arrow_violations,
    coincidences,
    compose,
    fixed_point_check,
    infer_rule,
    iterate,
    primitivity_check,
    seed_patch,
    supertile,
    valid_phases,
)
from irtiling.view import Grid, Patch, Rect, limit_grid

from . import oracles

# read off a bottom-up painting of level 8 (see oracles.read_blocks)
FROZEN = """\
scale 2
T1 LL T2 0
T1 LR T4 1
T1 UL T3 1
T1 UR T1 0
T2 LL T2 0
T2 LR T3 3
T2 UL T4 3
T2 UR T1 0
T3 LL T2 0
T3 LR T3 3
T3 UL T3 1
T3 UR T1 0
T4 LL T2 0
T4 LR T3 3
T4 UL T3 1
T4 UR T1 0
"""


@pytest.fixture(scope="module")
def rule():
    return infer_rule(32)


def test_rule_matches_frozen_text(rule):
    assert rule == SubstitutionRule.from_text(FROZEN)
    assert SubstitutionRule.from_text(rule.to_text()) == rule


def test_rule_matches_oracle_blocks(rule):
    blocks = oracles.read_blocks(8, 16)
    assert len(blocks) == 16
    for (colour, arrow), block in blocks.items():
        image = rule.image(ColourType(colour), ArrowDir[arrow])
        got = {pos.offset: (c.value, a.name) for pos, (c, a) in image.items()}
        assert got == block


def test_rule_is_window_independent(rule):
    assert infer_rule(8) == rule
    assert infer_rule(128) == rule


def test_t3_and_t4_share_their_image(rule):
    assert rule.blocks[ColourType.T3] == rule.blocks[ColourType.T4]
    assert rule.blocks[ColourType.T1] != rule.blocks[ColourType.T2]


def test_coincidences(rule):
    assert coincidences(rule) == {Position.LL, Position.UR}
    assert rule.image(ColourType.T1, ArrowDir.SE)[Position.UR] == (ColourType.T1, ArrowDir.SE)


def test_primitivity(rule):
    assert primitivity_check(rule) == 2
    m = rule.colour_matrix()
    assert m.sum(axis=1).tolist() == [4, 4, 4, 4]
    assert m.tolist() == [[1, 1, 1, 1], [1, 1, 1, 1], [1, 1, 2, 0], [1, 1, 2, 0]]


def test_not_primitive():
    blocks = {c: {p: (c, 0) for p in POSITIONS} for c in ColourType}
    with pytest.raises(NotPrimitive):
        primitivity_check(SubstitutionRule(blocks))


def test_block_arrows_never_radial(rule):
    assert block_arrow_violations(rule) == []


@pytest.mark.parametrize("k", range(0, 7))
def test_fixed_point(rule, k):
    report = fixed_point_check(rule, k)
    assert report.ok, (report.first_mismatch, report.expected, report.found)
    assert report.compared == 4 ** (k + 1)


def test_seed_and_supertile_sizes(rule):
    assert len(seed_patch()) == 4
    assert len(supertile(rule, ColourType.T3, 3)) == 64
    assert iterate(rule, seed_patch(), 2) == apply_rule(rule, apply_rule(rule, seed_patch()))


def test_apply_grid_matches_apply_rule(rule):
    patch = limit_grid(Rect.centred(5)).to_patch()
    assert apply_grid(rule, patch.to_grid()).to_patch() == apply_rule(rule, patch)


@settings(max_examples=40)
@given(st.integers(0, 15), st.integers(-20, 20), st.integers(-20, 20), st.integers(1, 3))
def test_rotation_equivariance(code, k, m, turns):
    rule = SubstitutionRule.from_text(FROZEN)
    patch = Patch({(k, m): TileInstance.from_code((k, m), code)})
    assert apply_rule(rule, patch.rotated(turns)) == apply_rule(rule, patch).rotated(turns)


def test_inconsistent_block_detected():
    grid = limit_grid(Rect.centred(32))
    codes = grid.codes.copy()
    # change one child in the block of parent cell (10, 12); the child lies outside the parent window
    i, j = 2 * 10 - grid.k0, 2 * 12 - grid.m0
    codes[i, j] = (codes[i, j] + 1) % 16
    with pytest.raises(InconsistentBlock) as info:
        infer_rule(16, grid=Grid(grid.k0, grid.m0, codes))
    assert info.value.cell == (10, 12)
    assert info.value.colour is grid.tile((10, 12)).colour


def test_inference_window_bounds():
    with pytest.raises(ValueError):
        infer_rule(4)


def test_compose_recovers_parents(rule):
    big = limit_grid(Rect.centred(80))
    for k0, m0 in [(-5, 7), (20, -31), (0, 0), (-33, -12)]:
        window = Grid(k0, m0, big.codes[k0 + 80 : k0 + 96, m0 + 80 : m0 + 96].copy())
        comp = compose(window, rule)
        assert comp.phase == (0, 0)
        for cell, tile in comp.patch.tiles.items():
            assert big.tile(cell) == tile
        for cell, options in comp.ambiguous.items():
            assert big.tile(cell) in options
            assert {t.colour for t in options} == {ColourType.T3, ColourType.T4}


def test_compose_rejects_garbage(rule):
    codes = np.zeros((8, 8), dtype=np.int8)  # every cell T1 with arrow SE
    with pytest.raises(NoComposition):
        compose(Grid(0, 0, codes), rule)


def test_compose_reports_ambiguity(rule):
    # two separated supertiles, one at each diagonal phase, and nothing else
    table = rule.image_codes()
    codes = np.full((5, 5), -1, dtype=np.int8)
    for p, (dx, dy) in enumerate(pos.offset for pos in POSITIONS):
        codes[dx, dy] = table[0, p]
        codes[3 + dx, 3 + dy] = table[5, p]
    grid = Grid(0, 0, codes)
    assert sorted(valid_phases(rule, grid)) == [(0, 0), (1, 1)]
    with pytest.raises(AmbiguousComposition) as info:
        compose(grid, rule)
    assert sorted(info.value.phases) == [(0, 0), (1, 1)]
