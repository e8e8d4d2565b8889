import random

import numpy as np
import pytest
from hypothesis import given, settings

from src.errors import (
    AreaGapError,
    NotASuffixError,
    OutOfBoundsError,
    OverlapError,
    RuleError,
    UnknownRuleError,
)
from src.geometry import Patch, point_reflect, tile_containing
from src.rules import (
    MixedSystem,
    act_left,
    act_right,
    builtin,
    canonical_name,
    centers,
    check_suffix_containment,
    compose,
    fundamental_domain,
    is_uniformly_primitive,
    iter_substituted,
    periodicity_check,
    right_uniform_prefix_check,
    rule_from_dict,
    rule_to_dict,
    single_system,
    substitution_matrix,
    validate_rule,
)
from src.words import Word, all_words, reverse
from strategies import words

EXPECTED_MATRIX = [[6, 9], [1, 6]]


@pytest.mark.parametrize("name", ["sigma1", "sigma2", "rho1"])
def test_builtin_rules_share_one_matrix(name):
    rule = builtin(name)
    assert substitution_matrix(rule).tolist() == EXPECTED_MATRIX
    report = validate_rule(rule)
    assert report.valid
    assert [(c.id, c.tiles, c.area) for c in report.prototiles] == [("S", 7, 9), ("R", 15, 27)]


def test_rule_aliases():
    assert canonical_name("σ₂") == "sigma2"
    assert canonical_name("ϱ₂") == "rho2"
    assert builtin("rho2").same_images(builtin("sigma2"))
    assert not builtin("rho1").same_images(builtin("sigma1"))
    with pytest.raises(UnknownRuleError):
        builtin("sigma3")


def _broken(edit):
    data = rule_to_dict(builtin("sigma1"))
    edit(data["images"]["S"])
    return rule_from_dict(data)


def test_validation_reports_overlap():
    def edit(image):
        image[1]["x"] = 0

    with pytest.raises(OverlapError) as info:
        validate_rule(_broken(edit))
    assert info.value.tiles == (0, 1)
    assert info.value.prototile == "S"


def test_validation_reports_out_of_bounds():
    def edit(image):
        image[2]["x"] = 3

    with pytest.raises(OutOfBoundsError) as info:
        validate_rule(_broken(edit))
    assert info.value.index == 2


def test_validation_reports_area_gap():
    with pytest.raises(AreaGapError) as info:
        validate_rule(_broken(lambda image: image.pop()))
    assert info.value.deficit == 1


def test_rule_dict_round_trip():
    for name in ("sigma1", "sigma2", "rho1"):
        rule = builtin(name)
        assert rule_from_dict(rule_to_dict(rule)).same_images(rule)


def test_rule_from_dict_rejects_malformed_data():
    with pytest.raises(RuleError):
        rule_from_dict({"name": "x", "inflation": 3})
    data = rule_to_dict(builtin("sigma1"))
    data["images"]["S"][0]["type"] = "Q"
    with pytest.raises(RuleError):
        rule_from_dict(data)


def test_mixed_system_checks_rules(system):
    assert system.alphabet_size == 2
    assert system.inflation == 3
    with pytest.raises(RuleError):
        system.rule(3)
    with pytest.raises(RuleError):
        MixedSystem(())
    with pytest.raises(RuleError):
        MixedSystem((builtin("sigma1"), compose((1, 1), system)))


def test_iter_substituted_without_rules_is_identity(system):
    tiles = system.corner_tile("R").tiles
    assert tuple(iter_substituted(tiles, [])) == tiles


def test_compose_multiplies_matrices(system):
    rule = compose((1, 2), system)
    assert rule.inflation == 9
    validate_rule(rule)
    expected = np.array(EXPECTED_MATRIX) @ np.array(EXPECTED_MATRIX)
    assert substitution_matrix(rule).tolist() == expected.tolist()


def test_uniformly_primitive_at_first_step(system):
    assert is_uniformly_primitive(system, 3) == 1


@pytest.mark.parametrize("m", range(0, 4))
def test_left_action_is_reversed_right_action(system, m):
    for w in all_words(m):
        for tile in ("S", "R"):
            start = system.corner_tile(tile)
            assert act_left(w, start, system) == act_right(reverse(w), start, system)


@pytest.mark.slow
@pytest.mark.parametrize("m", [4, 5])
def test_left_action_is_reversed_right_action_long_words(system, m):
    for w in all_words(m):
        for tile in ("S", "R"):
            start = system.corner_tile(tile)
            assert act_left(w, start, system) == act_right(reverse(w), start, system)


def test_substituted_patches_tessellate(system):
    patch = act_left(Word.parse("121"), system.corner_tile("R"), system)
    assert patch.tessellates_support()
    assert patch.area == 3 * 9**3


@pytest.mark.parametrize("tile", ["S", "R"])
def test_letters_intertwine_under_reflection(system, tile):
    for start in (system.corner_tile(tile), system.centered_tile(tile)):
        assert act_left((1,), point_reflect(start), system) == point_reflect(act_left((2,), start, system))


def test_letters_intertwine_on_substituted_patch(system):
    start = act_left((2,), system.corner_tile("R"), system)
    assert act_left((1,), point_reflect(start), system) == point_reflect(act_left((2,), start, system))


@settings(max_examples=25, deadline=None)
@given(words(min_size=1, max_size=3))
def test_suffix_containment(system, v):
    for u in (Word(v.letters[k:]) for k in range(len(v))):
        for tile in ("S", "R"):
            result = check_suffix_containment(v, u, tile, system)
            assert result.contained
            assert result.translation is not None


def test_suffix_containment_seeded_pairs(system):
    rng = random.Random(50)
    for _ in range(10):
        v = Word(tuple(rng.choice((1, 2)) for _ in range(rng.randint(1, 4))))
        u = Word(v.letters[rng.randrange(len(v)):])
        assert check_suffix_containment(v, u, rng.choice(("S", "R")), system).contained


@pytest.mark.slow
def test_suffix_containment_fifty_seeded_pairs(system):
    rng = random.Random(51)
    for _ in range(50):
        v = Word(tuple(rng.choice((1, 2)) for _ in range(rng.randint(1, 4))))
        u = Word(v.letters[rng.randrange(len(v)):])
        tile = rng.choice(("S", "R"))
        assert check_suffix_containment(v, u, tile, system).contained, (str(v), str(u), tile)


def test_suffix_containment_rejects_non_suffix(system):
    with pytest.raises(NotASuffixError):
        check_suffix_containment(Word.parse("12"), Word.parse("1"), "R", system)


def test_right_uniform_prefix_check(system):
    result = right_uniform_prefix_check(Word.parse("122"), system)
    assert result == {"S": [True, True, True], "R": [True, True, True]}


@pytest.mark.parametrize("m", [2, 3])
def test_rho1_is_periodic(m):
    rho = single_system("rho1")
    patch = act_left(Word.constant(1, m), rho.corner_tile("R"), rho)
    report = periodicity_check(patch, [(3, 0), (0, 2)], collar=3)
    assert report.periodic
    assert report.checked > 0


@pytest.mark.slow
@pytest.mark.parametrize("m", [4, 5])
def test_rho1_is_periodic_at_scale(m):
    rho = single_system("rho1")
    patch = act_left(Word.constant(1, m), rho.corner_tile("R"), rho)
    assert periodicity_check(patch, [(3, 0), (0, 2)], collar=3).periodic


def test_sigma2_squared_is_not_periodic(system):
    patch = act_left(Word.constant(2, 2), system.corner_tile("R"), system)
    report = periodicity_check(patch, [(3, 0), (0, 2)], collar=3)
    assert not report.periodic
    assert report.failure is not None


def test_periodicity_needs_support():
    with pytest.raises(RuleError):
        periodicity_check(Patch(()), [(3, 0)], collar=1)


def test_fundamental_domain_of_rho1():
    rho = single_system("rho1")
    patch = act_left(Word.constant(1, 2), rho.corner_tile("R"), rho)
    cell = fundamental_domain(patch, (3, 2))
    assert cell.count_by_type() == {"R": 1, "S": 3}
    assert cell.area == 6


@pytest.mark.parametrize("seed", range(20))
def test_centered_prefixes_nest_around_origin_rectangle(system, seed):
    rng = random.Random(seed)
    w = Word(tuple(rng.choice((1, 2)) for _ in range(4)))
    origin = system.centered_tile("R").tiles[0]
    previous = None
    for m in range(0, 5):
        patch = act_left(w.prefix(m), system.centered_tile("R"), system)
        assert tile_containing(patch, 0, 0) == origin
        if previous is not None:
            assert previous.is_subpatch_of(patch)
        previous = patch


def test_centers_are_tile_barycenters(system):
    points = centers(system.centered_tile("R"))
    assert points.points == ((0, 0),)
    assert len(centers(act_left((1,), system.corner_tile("R"), system))) == 15
