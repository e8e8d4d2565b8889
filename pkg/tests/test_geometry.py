from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.errors import EmptyUnionError, NonCubeAlignedError
from src.geometry import (
    CubeUnion,
    Patch,
    PlacedTile,
    PointSet,
    Prototile,
    Rect,
    cube_union_of_patch,
    find_subpatch,
    first_overlap,
    half_units,
    perimeter,
    point_reflect,
    tile_containing,
)

S = Prototile.of("S", 1, 1)
R = Prototile.of("R", 3, 1)


def test_half_units():
    assert half_units(Fraction(-3, 2)) == -3
    assert half_units("5/2") == 5
    assert half_units(4) == 8
    with pytest.raises(ValueError):
        half_units(Fraction(1, 3))


def test_prototile_and_tile_measures():
    assert R.area == 3
    assert R.width == 3 and R.height == 1
    tile = R.at(-3, -1)
    assert tile.anchor == (Fraction(-3, 2), Fraction(-1, 2))
    assert tile.center == (0, 0)
    assert tile.translated(2, 0).center == (1, 0)


def test_rect_contains_and_erosion():
    box = Rect(0, 0, 18, 6)
    assert box.contains(R.at(12, 4))
    assert not box.contains(R.at(14, 4))
    assert box.eroded(6) is None
    assert box.eroded(2) == Rect(2, 2, 14, 2)
    assert box.area == 27


def test_first_overlap_reports_pair():
    tiles = [S.at(0, 0), S.at(2, 0), PlacedTile("S", 1, 1, 2, 2)]
    assert first_overlap(tiles) == (0, 2)
    assert first_overlap(tiles[:2]) is None


def test_patch_is_order_independent():
    a = Patch((S.at(0, 0), R.at(2, 0)))
    b = Patch((R.at(2, 0), S.at(0, 0)))
    assert a == b
    assert a.count_by_type() == {"S": 1, "R": 1}
    assert a.area == 4


def test_tessellates_support():
    support = Rect(0, 0, 8, 2)
    assert Patch((S.at(0, 0), R.at(2, 0)), support).tessellates_support()
    assert not Patch((S.at(0, 0), R.at(0, 0)), support).tessellates_support()
    assert not Patch((S.at(0, 0),), support).tessellates_support()


def test_cube_union_of_centered_rectangle():
    union = cube_union_of_patch(Patch((R.at(-3, -1),)))
    assert union.centers == frozenset({(-1, 0), (0, 0), (1, 0)})
    assert union.area == 3
    assert perimeter(union) == 8


def test_corner_tiles_are_not_cube_aligned():
    with pytest.raises(NonCubeAlignedError):
        cube_union_of_patch(Patch((R.at(0, 0),)))


def test_perimeter_of_l_tromino():
    union = CubeUnion(frozenset({(0, 0), (1, 0), (0, 1)}))
    assert union.perimeter() == 8


def test_perimeter_of_empty_union_raises():
    with pytest.raises(EmptyUnionError):
        perimeter(CubeUnion())


def test_cubes_are_half_open():
    union = CubeUnion(frozenset({(0, 0)}))
    assert union.contains_point(Fraction(-1, 2), Fraction(-1, 2))
    assert not union.contains_point(Fraction(1, 2), 0)
    assert union.contains_point(0.49, 0.0)


@given(st.sets(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), min_size=1, max_size=30))
def test_perimeter_counts_exposed_sides(centers):
    union = CubeUnion(frozenset(centers))
    exposed = sum(
        (x + dx, y + dy) not in centers
        for x, y in centers
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1))
    )
    assert perimeter(union) == exposed


def test_rect_cube_centers():
    assert sorted(Rect(-3, -1, 6, 2).cube_centers()) == [(-1, 0), (0, 0), (1, 0)]
    with pytest.raises(NonCubeAlignedError):
        list(Rect(0, 0, 2, 2).cube_centers())


def test_point_reflect_patch():
    patch = Patch((R.at(0, 0), S.at(6, 0)), Rect(0, 0, 8, 2))
    reflected = point_reflect(patch)
    assert reflected.tiles == tuple(sorted((R.at(-6, -2), S.at(-8, -2))))
    assert reflected.support == Rect(-8, -2, 8, 2)
    assert point_reflect(reflected) == patch


def test_point_reflect_points():
    points = PointSet(((Fraction(1, 2), 1),))
    assert point_reflect(points).points == ((Fraction(-1, 2), -1),)


def test_point_set_rejects_duplicates():
    with pytest.raises(ValueError):
        PointSet(((0, 0), (0, 0)))


def test_point_set_bounding_rect():
    points = PointSet(((Fraction(1, 2), 1), (Fraction(-3, 4), 2)))
    assert points.bounding_rect() == Rect(-2, 2, 4, 3)
    assert PointSet(((0.3, 0.3),)).bounding_rect() == Rect(0, 0, 1, 1)
    with pytest.raises(EmptyUnionError):
        PointSet(()).bounding_rect()


def test_find_subpatch(system):
    host = Patch(system.rule(2).images["R"])
    assert len(find_subpatch(host, Patch((R.at(0, 0),)))) == 6
    pair = Patch((R.at(0, 0), R.at(6, 0)))
    assert sorted(find_subpatch(host, pair)) == [(0, 0), (0, 1), (3, 0)]
    assert find_subpatch(host, Patch(())) == [(0, 0)]


def test_tile_containing():
    patch = Patch((R.at(-3, -1), S.at(3, -1)))
    assert tile_containing(patch, 0, 0) == R.at(-3, -1)
    assert tile_containing(patch, 3, 0) == S.at(3, -1)
    assert tile_containing(patch, 5, 0) is None
