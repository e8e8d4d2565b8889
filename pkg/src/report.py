"""Scenario runner: reproduces the finite-scale checks and writes artifacts.

Each scenario returns a JSON-ready summary and records failed expectations;
run_report writes every artifact before raising AssertionFailedError.
"""

import logging
import random
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path

from .bd import (
    discrepancy_pair,
    discrepancy_vs_lattice,
    hall_window_match,
    lattice_window,
    min_matching_radius,
    parse_density,
    radius_growth,
    staircase_window,
    verdict,
)
from .config import Config, parse_m_range
from .diagonal import (
    CENTERED,
    count_closed_form,
    decomposition_blocks,
    subdiagonal_patch,
    type_counts_closed_form,
    window_A,
    window_area,
    window_perimeter,
)
from .errors import AssertionFailedError, ReportError, ScenarioUnknownError, StairtileError
from .log_handler import MemoryLogHandler
from .render import RenderStyle, render_svg
from .rules import (
    act_left,
    areas,
    builtin,
    fundamental_domain,
    periodicity_check,
    single_system,
    substitution_matrix,
    validate_rule,
)
from .sources import parse_source
from .spectral import bd_lattice_classifier
from .storage import exact_str, write_json, write_series_csv, write_svg
from .words import Word, all_words

logger = logging.getLogger(__name__)


def jsonable(value):
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (Fraction, int, float)) and not isinstance(value, bool):
        return exact_str(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value


@dataclass
class RunContext:
    out_dir: Path
    seed: int
    budget: int
    failures: list[str] = field(default_factory=list)
    artifacts: list[Path] = field(default_factory=list)
    scenario: str = ""

    def expect(self, condition: bool, message: str) -> bool:
        if not condition:
            self.failures.append(f"{self.scenario}: {message}")
            logger.error(f"Check failed in {self.scenario}: {message}")
        return condition

    def path(self, name: str) -> Path:
        return self.out_dir / self.scenario / name

    def keep(self, path: Path) -> None:
        self.artifacts.append(path)


def _within_budget(m: int, ctx: RunContext) -> bool:
    return 9**m <= ctx.budget


def lattice_discrepancy(params: dict, ctx: RunContext) -> dict:
    word = str(params.get("word", "const:2"))
    alpha = parse_density(params.get("alpha", "2/3"))
    ms = parse_m_range(params.get("m", "1..20"))
    series = discrepancy_vs_lattice(word, alpha, ms, brute=bool(params.get("brute", True)), budget=ctx.budget)
    ctx.keep(write_series_csv(series, ctx.path("series.csv")))
    staircase_family = parse_source(word).label == "const:2" and alpha == Fraction(2, 3)
    for row in series.rows:
        if row.brute is not None:
            ctx.expect(row.brute == row.count1, f"m={row.m}: enumeration {row.brute} != closed form {row.count1}")
        if staircase_family:
            ctx.expect(row.delta == row.m * 3**row.m, f"m={row.m}: |delta| = {row.delta}")
            ctx.expect(row.ratio > Fraction(row.m, 8), f"m={row.m}: ratio {row.ratio} <= m/8")
    return {"source": series.source1, "rows": len(series.rows), "verdict": verdict(series)}


def pair_discrepancy(params: dict, ctx: RunContext) -> dict:
    return _pair(str(params.get("w1", "const:1")), str(params.get("w2", "const:2")),
                 parse_m_range(params.get("m", "1..20")), ctx, "series.csv")


def _pair(source1: str, source2: str, ms: list[int], ctx: RunContext, name: str) -> dict:
    s1, s2 = parse_source(source1), parse_source(source2)
    series = discrepancy_pair(s1, s2, ms)
    ctx.keep(write_series_csv(series, ctx.path(name)))
    if None not in (s1.gamma, s2.gamma, s1.slack, s2.slack):
        gap = abs(s1.gamma - s2.gamma)
        slack = s1.slack + s2.slack
        for row in series.rows:
            if row.m >= 2:
                bound = (row.m * gap - slack) / 8
                ctx.expect(row.ratio >= bound, f"{s1.label} vs {s2.label}, m={row.m}: ratio {row.ratio} < {bound}")
        if slack == 0 and gap:
            tail = [row.ratio for row in series.rows if row.m >= 2]
            ctx.expect(all(a < b for a, b in zip(tail, tail[1:])), f"{s1.label} vs {s2.label}: ratios not increasing")
    return {"w1": s1.label, "w2": s2.label, "rows": len(series.rows), "verdict": verdict(series)}


def spectral(params: dict, ctx: RunContext) -> dict:
    names = params.get("rules", ["sigma1", "sigma2", "rho1"])
    results = {}
    matrices = []
    for name in names:
        rule = builtin(name)
        validate_rule(rule)
        matrix = substitution_matrix(rule)
        matrices.append(matrix.tolist())
        report = bd_lattice_classifier(matrix, areas(rule))
        results[name] = {"matrix": matrix.tolist(), **report.as_dict()}
        ctx.expect(report.perron.left_check, f"{name}: areas are not a left eigenvector")
        if "expect_lambda1" in params:
            expected = Fraction(str(params["expect_lambda1"]))
            ctx.expect(report.perron.lambda1 == expected, f"{name}: lambda1 = {report.perron.lambda1}")
        if "expect_density" in params:
            expected = Fraction(str(params["expect_density"]))
            ctx.expect(report.perron.density == expected, f"{name}: density = {report.perron.density}")
    if params.get("expect_equal_matrices", True):
        ctx.expect(all(m == matrices[0] for m in matrices), "substitution matrices differ")
    ctx.keep(write_json(jsonable(results), ctx.path("spectral.json")))
    return {"rules": list(names)}


def matching(params: dict, ctx: RunContext) -> dict:
    word = parse_source(str(params.get("word", "const:2"))).prefix(int(params.get("m", 3)))
    alpha = parse_density(params.get("alpha", "2/3"))
    points, window = staircase_window(word, budget=ctx.budget)
    lattice = lattice_window(alpha, window)
    radius = params.get("radius", "auto")
    if radius == "auto":
        outcome = min_matching_radius(points, lattice)
        ctx.expect(outcome.perfect, f"no perfect matching at the minimal radius for {word}")
    else:
        outcome = hall_window_match(points, lattice, Fraction(str(radius)))
    summary = {
        "word": str(word),
        "points": len(points),
        "lattice_points": len(lattice),
        "radius_squared": outcome.radius_squared,
        "radius": round(outcome.radius, 12),
        "pairs": len(outcome.pairs),
        "deficiency": outcome.deficiency,
        "hall_violator": len(outcome.hall_violator or ()),
        "neighbourhood": len(outcome.neighbourhood or ()),
    }
    if outcome.hall_violator is not None:
        ctx.expect(
            len(outcome.hall_violator) - len(outcome.neighbourhood) == outcome.deficiency,
            "Hall violator does not certify the deficiency",
        )
    if "growth" in params:
        rows = radius_growth(parse_m_range(params["growth"]), alpha, budget=ctx.budget)
        summary["growth"] = [
            {"m": r.m, "lattice_points": r.lattice_points, "patch_points": r.patch_points,
             "radius_squared": r.radius_squared, "radius": round(r.radius, 12)}
            for r in rows
        ]
        for r in rows:
            ctx.expect(r.deficiency == 0, f"growth m={r.m}: lattice not fully matched")
        for before, after in zip(rows, rows[1:]):
            ctx.expect(after.radius_squared >= before.radius_squared,
                       f"growth m={after.m}: s*^2 {after.radius_squared} below {before.radius_squared} at m={before.m}")
        if len(rows) >= 2:
            ctx.expect(rows[-1].radius_squared > rows[0].radius_squared,
                       f"growth: s* did not increase from m={rows[0].m} to m={rows[-1].m}")
        ctx.keep(write_json(jsonable(summary["growth"]), ctx.path("growth.json")))
    ctx.keep(write_json(jsonable(summary), ctx.path("matching.json")))
    return summary


def periodicity(params: dict, ctx: RunContext) -> dict:
    system = single_system(str(params.get("rule", "rho1")))
    periods = [tuple(v) for v in params.get("periods", [[3, 0], [0, 2]])]
    collar = int(params.get("collar", 3))
    start = system.corner_tile("R")
    results = []
    rendered = False
    for m in parse_m_range(params.get("m", "2..5")):
        if not _within_budget(m, ctx):
            logger.warning(f"Skipping m = {m}: over the tile budget")
            continue
        patch = act_left([1] * m, start, system)
        check = periodicity_check(patch, periods, collar)
        ctx.expect(check.periodic, f"m={m}: translate of {check.failure} missing")
        cell = fundamental_domain(patch, (periods[0][0] or periods[1][0], periods[0][1] or periods[1][1]))
        results.append({"m": m, "periodic": check.periodic, "checked": check.checked,
                        "cell": cell.count_by_type()})
        if not rendered:
            style = RenderStyle(periods=tuple(periods))
            ctx.keep(write_svg(render_svg(patch, style), ctx.path(f"periodic-m{m}.svg")))
            rendered = True
    ctx.keep(write_json(jsonable(results), ctx.path("periodicity.json")))
    return {"checked": len(results)}


def _staircase_checks(ms: list[int], ctx: RunContext) -> list[dict]:
    rows = []
    for m in ms:
        if not _within_budget(m, ctx):
            logger.warning(f"Skipping staircase m = {m}: over the tile budget")
            continue
        w = Word.constant(2, m)
        staircase = subdiagonal_patch(w, CENTERED, budget=ctx.budget)
        counts = staircase.patch.count_by_type()
        n_s, n_r = type_counts_closed_form(m)
        ctx.expect(len(staircase.patch) == 9**m - 3**m * (m + 1), f"m={m}: {len(staircase.patch)} tiles")
        ctx.expect(staircase.window.area == window_area(m), f"m={m}: window area {staircase.window.area}")
        ctx.expect(staircase.window.perimeter() == window_perimeter(m), f"m={m}: perimeter")
        ctx.expect((counts.get("S", 0), counts.get("R", 0)) == (n_s, n_r), f"m={m}: type counts {counts}")
        ctx.expect(staircase.window == window_A(m), f"m={m}: window differs from A_m")
        rows.append({"m": m, "tiles": len(staircase.patch), "S": n_s, "R": n_r,
                     "area": staircase.window.area, "perimeter": staircase.window.perimeter()})
    return rows


def _random_word_checks(m_max: int, per_length: int, ctx: RunContext) -> int:
    rng = random.Random(ctx.seed)
    checked = 0
    for m in range(1, m_max + 1):
        if not _within_budget(m, ctx):
            break
        words = list(all_words(m)) if 2**m <= per_length else [
            Word(tuple(rng.choice((1, 2)) for _ in range(m))) for _ in range(per_length)
        ]
        for w in words:
            brute = len(subdiagonal_patch(w, budget=ctx.budget).patch)
            ctx.expect(brute == count_closed_form(w), f"w={w}: enumeration {brute} != {count_closed_form(w)}")
            checked += 1
    return checked


def thm13(params: dict, ctx: RunContext) -> dict:
    """Periodic rho1 tilings against the aperiodic sigma2 staircases."""
    spectral({"rules": ["sigma1", "sigma2", "rho1"], "expect_lambda1": 9, "expect_density": "2/3"}, ctx)
    staircases = _staircase_checks(parse_m_range(params.get("m", "1..6")), ctx)
    ctx.keep(write_json(jsonable(staircases), ctx.path("staircases.json")))
    checked = _random_word_checks(int(params.get("random_m", 5)), int(params.get("random_words", 100)), ctx)
    lattice_discrepancy({"word": "const:2", "alpha": "2/3", "m": params.get("lattice_m", "1..20"),
                         "brute": False}, ctx)
    periodicity({"rule": "rho1", "m": params.get("periodic_m", "2..5")}, ctx)

    w = Word.constant(2, 3)
    figure = subdiagonal_patch(w, CENTERED, budget=ctx.budget)
    style = RenderStyle(diagonal=True, blocks=decomposition_blocks(w, CENTERED))
    ctx.keep(write_svg(render_svg(figure, style), ctx.path("staircase-m3.svg")))
    return {"staircases": len(staircases), "random_words": checked}


def thm14(params: dict, ctx: RunContext) -> dict:
    """Distinct digit averages give diverging staircase discrepancies."""
    ms = parse_m_range(params.get("m", "1..20"))
    pairs = [tuple(str(g) for g in pair) for pair in params.get("pairs", [["1", "-1"], ["1/2", "-1/2"]])]
    rng = random.Random(ctx.seed)
    for _ in range(int(params.get("random_pairs", 5))):
        g1 = Fraction(rng.randint(-12, 12), 12)
        g2 = Fraction(rng.randint(-12, 12), 12)
        if g1 != g2:
            pairs.append((str(g1), str(g2)))
    results = []
    for index, (g1, g2) in enumerate(pairs):
        results.append(_pair(f"gamma:{g1}", f"gamma:{g2}", ms, ctx, f"pair-{index}.csv"))
    ctx.keep(write_json(jsonable(results), ctx.path("pairs.json")))
    return {"pairs": len(results)}


SCENARIOS: dict[str, Callable[[dict, RunContext], dict]] = {
    "lattice-discrepancy": lattice_discrepancy,
    "pair-discrepancy": pair_discrepancy,
    "spectral": spectral,
    "matching": matching,
    "periodicity": periodicity,
    "thm13": thm13,
    "thm14": thm14,
}


@dataclass
class ReportResult:
    passed: bool
    artifacts: list[Path]
    failures: list[str]


def run_report(config: Config, output_dir: str | Path | None = None) -> ReportResult:
    """Run every configured scenario, then write report.json.

    Raises AssertionFailedError listing every failed check once all artifacts
    are on disk.
    """
    if not config.scenarios:
        raise ReportError("No scenarios configured")
    for scenario in config.scenarios:
        if scenario.name not in SCENARIOS:
            raise ScenarioUnknownError(scenario.name)

    out_dir = Path(output_dir or config.output_dir)
    ctx = RunContext(out_dir=out_dir, seed=config.seed, budget=config.tile_budget)
    summaries = []
    with MemoryLogHandler().attached() as handler:
        for scenario in config.scenarios:
            ctx.scenario = handler.scenario = scenario.name
            before = len(ctx.failures)
            logger.info(f"Running scenario {scenario.name}")
            try:
                data = SCENARIOS[scenario.name](dict(scenario.params), ctx)
            except StairtileError as e:
                ctx.expect(False, f"raised {type(e).__name__}: {e}")
                data = {}
            summaries.append({
                "name": scenario.name,
                "params": jsonable(scenario.params),
                "failures": ctx.failures[before:],
                "data": jsonable(data),
                "log": handler.drain(),
            })

    passed = not ctx.failures
    ctx.artifacts.append(write_json({"passed": passed, "scenarios": summaries}, out_dir / "report.json"))
    logger.info(f"Report finished: {len(summaries)} scenario(s), {len(ctx.failures)} failure(s)")
    if not passed:
        raise AssertionFailedError(ctx.failures)
    return ReportResult(passed=True, artifacts=ctx.artifacts, failures=[])
