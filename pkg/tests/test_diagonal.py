import random
from fractions import Fraction

import pytest

from src.diagonal import (
    CENTERED,
    CORNER,
    BlockKind,
    below_diagonal,
    count_closed_form,
    crosses_diagonal,
    decomposition_blocks,
    decomposition_counts,
    subdiagonal_patch,
    type_counts_closed_form,
    window_A,
    window_area,
    window_perimeter,
)
from src.errors import BadParametersError, WordTooLongError
from src.geometry import Prototile, Rect, perimeter
from src.rules import act_left
from src.words import Word, all_words

R = Prototile.of("R", 3, 1)


def test_single_rectangle_letter_keeps_three_rectangles():
    staircase = subdiagonal_patch(Word.parse("2"))
    assert staircase.m == 1
    assert staircase.support == Rect(0, 0, 18, 6)
    assert staircase.patch.tiles == (R.at(0, 0), R.at(0, 2), R.at(6, 0))


def test_single_square_letter_keeps_nine_squares():
    staircase = subdiagonal_patch(Word.parse("1"))
    assert staircase.patch.count_by_type() == {"S": 9}


def test_three_rectangle_letters():
    staircase = subdiagonal_patch(Word.parse("222"))
    assert len(staircase.patch) == 621
    assert staircase.patch.count_by_type() == {"S": 405, "R": 216}


def test_diagonal_membership_is_closed():
    support = Rect(0, 0, 18, 6)
    # touches the diagonal only at its north-east corner
    assert below_diagonal(R.at(6, 0), support)
    assert not crosses_diagonal(R.at(6, 0), support)
    assert crosses_diagonal(R.at(12, 0), support)
    assert not below_diagonal(R.at(12, 0), support)


@pytest.mark.parametrize("m", range(1, 5))
def test_closed_form_matches_enumeration(m):
    for w in all_words(m):
        assert len(subdiagonal_patch(w).patch) == count_closed_form(w), str(w)


@pytest.mark.slow
def test_closed_form_matches_enumeration_at_five():
    for w in all_words(5):
        assert len(subdiagonal_patch(w).patch) == count_closed_form(w), str(w)


@pytest.mark.slow
@pytest.mark.parametrize("m", [6, 7])
def test_closed_form_matches_seeded_random_words(m):
    rng = random.Random(m)
    for _ in range(100):
        w = Word(tuple(rng.choice((1, 2)) for _ in range(m)))
        assert len(subdiagonal_patch(w).patch) == count_closed_form(w), str(w)


def test_closed_form_examples():
    assert count_closed_form(Word.constant(2, 2)) == 54
    assert count_closed_form(Word.parse("112")) == 729
    assert count_closed_form(Word.parse("1")) == 9


@pytest.mark.parametrize("m, expected", [(1, (0, 3)), (2, (27, 27)), (3, (405, 216))])
def test_type_counts_closed_form(m, expected):
    assert type_counts_closed_form(m) == expected
    n_s, n_r = expected
    assert n_s + n_r == count_closed_form(Word.constant(2, m))
    assert n_s + 3 * n_r == window_area(m)


@pytest.mark.parametrize("m", range(1, 5))
def test_type_counts_match_enumeration(m):
    counts = subdiagonal_patch(Word.constant(2, m)).patch.count_by_type()
    assert (counts.get("S", 0), counts.get("R", 0)) == type_counts_closed_form(m)


@pytest.mark.parametrize("m", range(1, 5))
def test_window_area_and_perimeter(m):
    window = subdiagonal_patch(Word.constant(2, m)).window
    assert window.area == window_area(m)
    assert perimeter(window) == window_perimeter(m)


@pytest.mark.slow
@pytest.mark.parametrize("m", [5, 6])
def test_rectangle_word_closed_forms_at_scale(m):
    staircase = subdiagonal_patch(Word.constant(2, m))
    assert len(staircase.patch) == 9**m - 3**m * (m + 1)
    counts = staircase.patch.count_by_type()
    assert (counts.get("S", 0), counts.get("R", 0)) == type_counts_closed_form(m)
    assert staircase.window.area == window_area(m) == Fraction(3, 2) * (9**m - 3**m)
    assert perimeter(staircase.window) == window_perimeter(m) == 8 * 3**m - 8


def test_window_examples():
    assert window_area(1) == 9 and window_perimeter(1) == 16
    assert window_area(2) == 108 and window_perimeter(2) == 64
    assert window_area(3) == Fraction(1053)


@pytest.mark.parametrize("m", range(1, 6))
def test_window_a_measures(m):
    window = window_A(m)
    assert window.area == window_area(m)
    assert perimeter(window) == window_perimeter(m)


@pytest.mark.parametrize("m", range(1, 4))
def test_window_a_is_the_centered_staircase(m):
    expected = window_A(m)
    for w in all_words(m):
        staircase = subdiagonal_patch(w, CENTERED)
        assert staircase.window == expected
        assert window_A(m, w) == expected


def test_window_a_checks_arguments():
    with pytest.raises(BadParametersError):
        window_A(0)
    with pytest.raises(BadParametersError):
        window_A(2, Word.parse("1"))


@pytest.mark.parametrize("m", range(1, 4))
def test_crossing_tiles_are_rectangles(system, m):
    for w in all_words(m):
        start = system.corner_tile("R")
        full = act_left(w, start, system)
        crossing = [t for t in full.tiles if crosses_diagonal(t, full.support)]
        assert crossing
        assert {t.tile_type for t in crossing} == {"R"}


def test_decomposition_counts_for_mixed_word():
    counts = decomposition_counts(Word.parse("112"))
    assert [(r.generation, r.kind, r.blocks, r.tiles_per_block) for r in counts.rows] == [
        (1, BlockKind.SQUARE, 81, 1),
        (2, BlockKind.SQUARE, 27, 7),
        (3, BlockKind.RECTANGLE, 3, 153),
    ]
    assert counts.total_tiles == 81 * 1 + 27 * 7 + 3 * 153 == 729
    assert counts.total_area == 81 + 243 + 729 == 1053
    assert counts.as_dict()["rows"][2]["kind"] == "rectangle"


def test_rectangle_word_block_counts():
    counts = decomposition_counts(Word.constant(2, 4))
    assert [r.blocks for r in counts.rows] == [3 ** (4 - j + 1) for j in range(1, 5)]


@pytest.mark.parametrize("m", range(1, 4))
def test_decomposition_agrees_with_enumeration(m):
    for w in all_words(m):
        patch = subdiagonal_patch(w).patch
        counts = decomposition_counts(w)
        assert counts.total_tiles == len(patch)
        assert counts.total_area == window_area(m)
        by_type = patch.count_by_type()
        assert counts.type_counts() == (by_type.get("S", 0), by_type.get("R", 0))


@pytest.mark.parametrize("m", range(1, 4))
def test_blocks_partition_the_staircase(m):
    for w in all_words(m):
        patch = subdiagonal_patch(w).patch
        blocks = decomposition_blocks(w)
        per_generation = {}
        for block in blocks:
            per_generation[block.generation] = per_generation.get(block.generation, 0) + 1
        assert per_generation == {row.generation: row.blocks for row in decomposition_counts(w).rows}
        assert sum(block.rect.area for block in blocks) == window_area(m)
        assert sum(1 for t in patch.tiles for b in blocks if b.rect.contains(t)) == len(patch)


def test_block_kinds_follow_letters():
    blocks = decomposition_blocks(Word.parse("21"))
    assert {b.kind for b in blocks if b.generation == 1} == {BlockKind.RECTANGLE}
    assert {b.kind for b in blocks if b.generation == 2} == {BlockKind.SQUARE}


def test_centered_mode_has_the_same_counts():
    w = Word.parse("1212")
    assert len(subdiagonal_patch(w, CENTERED).patch) == len(subdiagonal_patch(w, CORNER).patch)


def test_budget_is_enforced(monkeypatch):
    with pytest.raises(WordTooLongError):
        subdiagonal_patch(Word.constant(2, 3), budget=100)
    monkeypatch.setenv("STAIRTILE_TILE_BUDGET", "10")
    with pytest.raises(WordTooLongError):
        subdiagonal_patch(Word.parse("12"))


def test_bad_words_and_modes():
    with pytest.raises(BadParametersError):
        subdiagonal_patch(Word())
    with pytest.raises(BadParametersError):
        subdiagonal_patch(Word((3,), alphabet_size=3))
    with pytest.raises(BadParametersError):
        subdiagonal_patch(Word.parse("1"), mode="diagonal")
    with pytest.raises(BadParametersError):
        type_counts_closed_form(0)
