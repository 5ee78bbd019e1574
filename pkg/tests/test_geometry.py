from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irtiling.errors import LengthMismatch, OutsideSupport, ResourceLimit
from irtiling.geometry import (
    CHECKER_LATTICE,
    Lattice,
    Stack,
    address_of,
    covering_squares,
    enumerate_squares,
    in_level_support,
    odd_corners,
    placement_of,
    point_cover_count,
    rotate,
    rotate_cell,
    square_arrays,
    stack_compare,
)

from . import oracles

addresses = st.integers(1, 7).flatmap(lambda n: st.lists(st.integers(0, 3), min_size=n, max_size=n))


@pytest.mark.parametrize("n", range(0, 7))
def test_squares_match_literal_recursion(n):
    got = [(s.centre, s.orientation) for s in enumerate_squares(n)]
    assert got == list(oracles.squares(n))


@pytest.mark.parametrize("n", range(1, 9))
def test_centre_formula(n):
    cx, cy, _ = square_arrays(n)
    centres = set(zip(cx.tolist(), cy.tolist()))
    h = 1 << n
    formula = {
        (x, y) for x in range(-h, h + 1) for y in range(-h, h + 1) if (x + y) % 2 and abs(x) + abs(y) <= h - 1
    }
    assert len(cx) == 4**n
    assert centres == formula


def test_level_one_centres_and_depths():
    squares = list(enumerate_squares(1))
    assert [s.centre for s in squares] == [(-1, 0), (0, 1), (1, 0), (0, -1)]
    assert [s.depth for s in squares] == [(0,), (1,), (2,), (3,)]
    assert [s.orientation for s in squares] == [0, 1, 2, 3]


def test_enumeration_is_lazy_and_capped():
    gen = enumerate_squares(3)
    assert next(gen).depth == (0, 0, 0)
    with pytest.raises(ResourceLimit):
        next(enumerate_squares(13))
    with pytest.raises(ResourceLimit):
        square_arrays(14, cap=12)


@given(addresses)
def test_address_round_trip(address):
    place = placement_of(address)
    assert in_level_support(place.centre, len(address))
    assert address_of(place.centre, len(address)) == tuple(address)


@given(addresses)
def test_orientation_is_digit_sum(address):
    assert placement_of(address).orientation == sum(address) % 4


def test_address_of_rejects_non_centres():
    with pytest.raises(OutsideSupport):
        address_of((0, 0), 2)
    with pytest.raises(OutsideSupport):
        address_of((4, 1), 2)


def test_bad_digits():
    with pytest.raises(ValueError):
        placement_of((0, 4))
    with pytest.raises(ValueError):
        placement_of(())


@given(addresses, addresses)
def test_stack_compare_is_antisymmetric(a, b):
    if len(a) != len(b):
        with pytest.raises(LengthMismatch):
            stack_compare(a, b)
        return
    ab, ba = stack_compare(a, b), stack_compare(b, a)
    if a == b:
        assert ab is ba is Stack.EQUAL
    else:
        assert {ab, ba} == {Stack.ABOVE, Stack.BELOW}


def test_stack_order_matches_enumeration_order():
    squares = list(enumerate_squares(3))
    for upper, lower in zip(squares, squares[1:]):
        assert stack_compare(upper.depth, lower.depth) is Stack.ABOVE


@pytest.mark.parametrize("n", range(1, 6))
def test_covering_degree_against_brute_force(n):
    counts = oracles.cover_counts(n)
    assert set(counts.values()) <= {1, 2}
    for cell, count in counts.items():
        inside = sum(in_level_support(c, n) for c in odd_corners(cell))
        assert count == inside


@pytest.mark.parametrize("n", range(1, 5))
def test_covering_squares_topmost_first(n):
    order = oracles.squares(n)
    for cell, count in oracles.cover_counts(n).items():
        if count < 2:
            with pytest.raises(OutsideSupport):
                covering_squares(n, cell)
            continue
        expected = [c for c, _ in order if cell in oracles.cells_of(c)]
        got = covering_squares(n, cell)
        assert [s.centre for s in got] == expected


@pytest.mark.parametrize(
    "point,count",
    [
        ((Fraction(1, 2), Fraction(1, 3)), 2),
        ((Fraction(1), Fraction(1, 2)), 3),
        ((0, 0), 4),
        ((1, 0), 5),
        ((Fraction(-3, 2), 2), 3),
    ],
)
def test_point_cover_cases(point, count):
    assert point_cover_count(4, point) == count
    assert oracles.squares_containing(4, point) == count


def test_point_cover_near_boundary():
    with pytest.raises(OutsideSupport):
        point_cover_count(2, (3, 1))


@settings(max_examples=300)
@given(st.integers(-20, 20), st.integers(-20, 20))
def test_point_cover_random(x4, y4):
    point = (Fraction(x4, 4), Fraction(y4, 4))
    assert point_cover_count(5, point) == oracles.squares_containing(5, point)


@given(st.integers(-50, 50), st.integers(-50, 50), st.integers(0, 7))
def test_rotation_group(x, y, t):
    assert rotate(rotate((x, y), t), -t) == (x, y)
    assert rotate((x, y), 4) == (x, y)
    cell = rotate_cell((x, y), t)
    assert rotate_cell(cell, -t) == (x, y)


def test_rotation_direction():
    # clockwise: east goes to south
    assert rotate((1, 0), 1) == (0, -1)
    assert rotate_cell((0, 0), 1) == (0, -1)


def test_lattice():
    assert CHECKER_LATTICE.contains((2, 0))
    assert not CHECKER_LATTICE.contains((1, 0))
    assert CHECKER_LATTICE.contains((2, 0), offset=(2, 0), scale=4)
    assert CHECKER_LATTICE.contains((6, 4), offset=(2, 0), scale=4)
    assert not CHECKER_LATTICE.contains((4, 0), offset=(2, 0), scale=4)
    assert CHECKER_LATTICE.coordinates((3, 1)) == (2, 1)
    with pytest.raises(ValueError):
        Lattice((1, 1), (2, 2))
