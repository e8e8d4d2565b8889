import argparse
import json
import logging
import os
import sys
from fractions import Fraction

from .bd import (
    discrepancy_pair,
    discrepancy_vs_lattice,
    hall_window_match,
    lattice_window,
    min_matching_radius,
    parse_density,
    verdict,
)
from .config import load_config, parse_m_range
from .diagonal import (
    CENTERED,
    CORNER,
    count_closed_form,
    decomposition_blocks,
    decomposition_counts,
    subdiagonal_patch,
)
from .errors import AssertionFailedError, StairtileError
from .geometry import cube_union_of_patch
from .render import RenderStyle, render_svg
from .report import jsonable, run_report
from .rules import (
    MixedSystem,
    act_left,
    areas,
    builtin,
    rule_to_dict,
    single_system,
    standard_system,
    substitution_matrix,
    validate_rule,
)
from .spectral import IntMatrix, bd_lattice_classifier
from .storage import (
    load_patch,
    load_points,
    load_rule,
    patch_from_dict,
    points_to_dict,
    read_json,
    save_patch,
    series_records,
    write_json,
    write_series_csv,
    write_svg,
)
from .words import Word, approximation_error, digit_sum, gamma_word, periodic_gamma, periodic_word

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    handlers=[logging.StreamHandler(sys.stderr)],
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_USAGE = 2


def _emit(data) -> None:
    print(json.dumps(jsonable(data), indent=2, sort_keys=True))


def _load_rule(name_or_path: str):
    if name_or_path.endswith(".json"):
        return load_rule(name_or_path)
    return builtin(name_or_path)


def _parse_periods(values: list[str] | None):
    if not values:
        return None
    return tuple(tuple(int(v) for v in item.split(",")) for item in values)


# --- rule ---

def cmd_rule_show(args) -> int:
    rule = _load_rule(args.rule)
    _emit({"rule": rule_to_dict(rule), "matrix": substitution_matrix(rule).tolist()})
    return EXIT_OK


def cmd_rule_validate(args) -> int:
    rule = _load_rule(args.rule)
    report = validate_rule(rule)
    _emit({
        "rule": report.rule,
        "valid": report.valid,
        "prototiles": [{"id": c.id, "tiles": c.tiles, "area": c.area} for c in report.prototiles],
    })
    return EXIT_OK


# --- patch ---

def _system(args) -> MixedSystem:
    if args.rule:
        return single_system(args.rule) if not args.rule.endswith(".json") else MixedSystem((load_rule(args.rule),))
    return standard_system()


def cmd_patch_generate(args) -> int:
    system = _system(args)
    if args.word:
        word = Word.parse(args.word, system.alphabet_size)
    else:
        word = Word.constant(1, args.m)
    start = system.centered_tile(args.tile) if args.mode == CENTERED else system.corner_tile(args.tile)
    patch = act_left(word, start, system)
    logger.info(f"Generated {len(patch)} tiles for {args.tile} under word {word}")
    save_patch(patch, args.out, args.interchange)
    if args.svg:
        write_svg(render_svg(patch, RenderStyle(periods=_parse_periods(args.periods))), args.svg)
    return EXIT_OK


def cmd_patch_render(args) -> int:
    patch = load_patch(args.patch)
    style = RenderStyle(diagonal=args.diagonal, periods=_parse_periods(args.periods))
    write_svg(render_svg(patch, style), args.out)
    return EXIT_OK


# --- staircase ---

def cmd_staircase(args) -> int:
    word = Word.parse(args.word)
    staircase = subdiagonal_patch(word, args.mode)
    save_patch(staircase.patch, args.out, args.interchange)
    logger.info(f"Staircase {word}: {len(staircase.patch)} tiles, window area {staircase.window.area}")
    if args.svg:
        blocks = decomposition_blocks(word, args.mode) if args.blocks else None
        write_svg(render_svg(staircase, RenderStyle(diagonal=True, blocks=blocks)), args.svg)
    return EXIT_OK


def cmd_staircase_counts(args) -> int:
    word = Word.parse(args.word)
    record = {"word": str(word), "m": len(word), "digit_sum": digit_sum(word)}
    everything = not (args.closed_form or args.brute or args.decomposition)
    if args.closed_form or everything:
        record["closed_form"] = count_closed_form(word)
    if args.brute or everything:
        staircase = subdiagonal_patch(word, CORNER)
        record["brute"] = len(staircase.patch)
        record["brute_types"] = staircase.patch.count_by_type()
        record["window_area"] = staircase.window.area
        record["window_perimeter"] = staircase.window.perimeter()
    if args.decomposition or everything:
        record["decomposition"] = decomposition_counts(word).as_dict()
    if "closed_form" in record and "brute" in record:
        record["agree"] = record["closed_form"] == record["brute"]
    _emit(record)
    return EXIT_OK


# --- word ---

def cmd_word_gamma(args) -> int:
    w = gamma_word(args.gamma, args.length)
    _emit({"word": str(w), "digit_sum": digit_sum(w), "error": approximation_error(args.gamma, w)})
    return EXIT_OK


def cmd_word_periodic(args) -> int:
    w = periodic_word(args.p, args.q, args.length)
    gamma = periodic_gamma(args.p, args.q)
    _emit({"word": str(w), "gamma": gamma, "digit_sum": digit_sum(w), "error": approximation_error(gamma, w)})
    return EXIT_OK


# --- spectral ---

def cmd_spectral(args) -> int:
    if args.matrix:
        matrix = IntMatrix(tuple(tuple(int(x) for x in row.split(",")) for row in args.matrix.split(";")))
        if not args.areas:
            raise StairtileError("--areas is required with --matrix")
        tile_areas = [Fraction(a) for a in args.areas.split(",")]
    else:
        rule = _load_rule(args.rule)
        matrix = IntMatrix.of(substitution_matrix(rule))
        tile_areas = areas(rule)
    report = bd_lattice_classifier(matrix, tile_areas, d=args.d, exact=not args.numeric)
    _emit({"matrix": [list(r) for r in matrix.entries], **report.as_dict()})
    return EXIT_OK


# --- bd ---

def cmd_bd_lattice(args) -> int:
    series = discrepancy_vs_lattice(args.word_gen, parse_density(args.alpha), parse_m_range(args.m), brute=args.brute)
    return _finish_series(series, args)


def cmd_bd_pair(args) -> int:
    series = discrepancy_pair(args.w1, args.w2, parse_m_range(args.m))
    return _finish_series(series, args)


def _finish_series(series, args) -> int:
    if args.out:
        write_series_csv(series, args.out)
    _emit({"source1": series.source1, "source2": series.source2,
           "rows": series_records(series), "verdict": verdict(series)})
    return EXIT_OK


def _lattice_region(path: str, points):
    """Lattice window: the patch's cube union, else its support, else the points' box."""
    data = read_json(path)
    if "points" in data:
        return points.bounding_rect()
    patch = patch_from_dict(data)
    try:
        return cube_union_of_patch(patch)
    except StairtileError:
        logger.info("Patch is not cube-aligned; sampling the lattice in its support rectangle")
        return patch.support or patch.bounding_rect()


def cmd_bd_match(args) -> int:
    p1 = load_points(args.p1)
    if args.p2.startswith("lattice:"):
        alpha = parse_density(args.p2.split(":", 1)[1])
        p2 = lattice_window(alpha, _lattice_region(args.p1, p1))
    else:
        p2 = load_points(args.p2)
    if args.radius == "auto":
        outcome = min_matching_radius(p1, p2, require_perfect=args.require_perfect)
    else:
        outcome = hall_window_match(p1, p2, Fraction(args.radius))
    record = {
        "p1": len(p1),
        "p2": len(p2),
        "radius_squared": outcome.radius_squared,
        "radius": round(outcome.radius, 12),
        "pairs": len(outcome.pairs),
        "unmatched": list(outcome.unmatched),
        "deficiency": outcome.deficiency,
    }
    if outcome.hall_violator is not None:
        record["hall_violator"] = points_to_dict(outcome.hall_violator)["points"]
        record["neighbourhood"] = len(outcome.neighbourhood)
        record["violator_side"] = outcome.violator_side
    if args.out:
        write_json(jsonable(record), args.out)
    _emit(record)
    return EXIT_OK


# --- report ---

def cmd_report(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config.seed = args.seed
    if args.tile_budget is not None:
        config.tile_budget = args.tile_budget
    result = run_report(config, args.out)
    logger.info(f"All checks passed; {len(result.artifacts)} artifact(s) written")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stairtile", description="Substitution tilings and staircase discrepancies")
    parser.add_argument("--config", help="YAML config file (default: $STAIRTILE_CONFIG or stairtile.yaml)")
    parser.add_argument("--verbose", action="store_true", help="log at DEBUG level")
    parser.add_argument("--seed", type=int, help="seed for random words and gamma pairs")
    parser.add_argument("--tile-budget", type=int, help="cap on enumerated tiles")
    sub = parser.add_subparsers(dest="command", required=True)

    rule = sub.add_parser("rule", help="inspect substitution rules").add_subparsers(dest="action", required=True)
    p = rule.add_parser("show")
    p.add_argument("rule", help="built-in name or rule JSON file")
    p.set_defaults(func=cmd_rule_show)
    p = rule.add_parser("validate")
    p.add_argument("rule")
    p.set_defaults(func=cmd_rule_validate)

    patch = sub.add_parser("patch", help="generate or render patches").add_subparsers(dest="action", required=True)
    p = patch.add_parser("generate")
    p.add_argument("--rule", help="single rule (name or JSON); default is the sigma1/sigma2 system")
    p.add_argument("--word", help="word such as 112 for the mixed system")
    p.add_argument("--m", type=int, default=1, help="iterations for a single rule")
    p.add_argument("--tile", default="R")
    p.add_argument("--mode", choices=[CORNER, CENTERED], default=CORNER)
    p.add_argument("--out", required=True)
    p.add_argument("--interchange", action="store_true", help="write tiles as {type, x2, y2}")
    p.add_argument("--svg")
    p.add_argument("--periods", nargs="*", help="period overlay, e.g. 3,0 0,2")
    p.set_defaults(func=cmd_patch_generate)
    p = patch.add_parser("render")
    p.add_argument("patch")
    p.add_argument("--out", required=True)
    p.add_argument("--diagonal", action="store_true")
    p.add_argument("--periods", nargs="*")
    p.set_defaults(func=cmd_patch_render)

    p = sub.add_parser("staircase", help="tiles under the diagonal of w.R")
    p.add_argument("--word", required=True)
    p.add_argument("--mode", choices=[CORNER, CENTERED], default=CENTERED)
    p.add_argument("--out", required=True)
    p.add_argument("--interchange", action="store_true", help="write tiles as {type, x2, y2}")
    p.add_argument("--svg")
    p.add_argument("--blocks", action="store_true", help="overlay the generation decomposition")
    p.set_defaults(func=cmd_staircase)

    p = sub.add_parser("staircase-counts", help="closed form, enumeration and decomposition counts")
    p.add_argument("--word", required=True)
    p.add_argument("--closed-form", action="store_true")
    p.add_argument("--brute", action="store_true")
    p.add_argument("--decomposition", action="store_true")
    p.set_defaults(func=cmd_staircase_counts)

    word = sub.add_parser("word", help="gamma and periodic words").add_subparsers(dest="action", required=True)
    p = word.add_parser("gamma")
    p.add_argument("--gamma", required=True, type=Fraction)
    p.add_argument("--length", "--m", dest="length", required=True, type=int, help="prefix length")
    p.set_defaults(func=cmd_word_gamma)
    p = word.add_parser("periodic")
    p.add_argument("--p", required=True, type=int)
    p.add_argument("--q", required=True, type=int)
    p.add_argument("--length", "--m", dest="length", required=True, type=int, help="prefix length")
    p.set_defaults(func=cmd_word_periodic)

    p = sub.add_parser("spectral", help="Perron data and the lattice classifier")
    p.add_argument("--rule", default="sigma2")
    p.add_argument("--matrix", help='rows separated by ";", e.g. "6,9;1,6"')
    p.add_argument("--areas", help="comma-separated prototile areas")
    p.add_argument("--dim", "--d", dest="d", type=int, default=2, help="dimension of the tiling")
    p.add_argument("--numeric", action="store_true", help="skip the exact 2x2 path")
    p.set_defaults(func=cmd_spectral)

    bd = sub.add_parser("bd", help="discrepancy series and window matching").add_subparsers(dest="action", required=True)
    p = bd.add_parser("lattice")
    p.add_argument("--word-gen", required=True, help="gamma:<g>, periodic:<p>,<q>, const:<a> or word:<letters>")
    p.add_argument("--alpha", default="2/3")
    p.add_argument("--m", default="1..10")
    p.add_argument("--brute", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bd_lattice)
    p = bd.add_parser("pair")
    p.add_argument("--w1", required=True)
    p.add_argument("--w2", required=True)
    p.add_argument("--m", default="1..10")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bd_pair)
    p = bd.add_parser("match")
    p.add_argument("--p1", required=True, help="patch or points JSON")
    p.add_argument("--p2", required=True, help="points JSON or lattice:<density>")
    p.add_argument("--radius", default="auto")
    p.add_argument("--require-perfect", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bd_match)

    p = sub.add_parser("report", help="run the scenarios named in the config")
    p.add_argument("--out", help="output directory (default from config)")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    if args.tile_budget is not None:
        os.environ["STAIRTILE_TILE_BUDGET"] = str(args.tile_budget)

    try:
        return args.func(args)
    except AssertionFailedError as e:
        logger.error(f"Report failed: {len(e.failures)} check(s)")
        for failure in e.failures:
            logger.error(f"  {failure}")
        return EXIT_ASSERTION
    except StairtileError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_USAGE
    except (ValueError, ZeroDivisionError) as e:
        logger.error(f"Bad argument: {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
