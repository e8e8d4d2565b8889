import json
import logging

import pytest

from src.bd import GrowthRow
from src.config import Config, ScenarioConfig, load_config
from src.errors import AssertionFailedError, ConfigParseError, ReportError, ScenarioUnknownError
from src.log_handler import MemoryLogHandler
from src.report import run_report

SMALL_CONFIG = """
tile_budget: 1000000
seed: 3
scenarios:
  - name: spectral
    expect_lambda1: 9
    expect_density: 2/3
  - name: lattice-discrepancy
    word: const:2
    m: 1..4
  - name: pair-discrepancy
    w1: const:1
    w2: const:2
    m: 1..6
  - name: periodicity
    m: 2..3
  - name: matching
    word: const:2
    m: 2
    growth: 1..2
  - name: thm14
    m: 1..12
    random_pairs: 2
"""


def _config(tmp_path, text: str) -> Config:
    path = tmp_path / "stairtile.yaml"
    path.write_text(text)
    return load_config(str(path))


def test_small_report_passes(tmp_path, caplog):
    caplog.set_level(logging.INFO)
    out = tmp_path / "out"
    result = run_report(_config(tmp_path, SMALL_CONFIG), out)
    assert result.passed
    report = json.loads((out / "report.json").read_text())
    assert report["passed"] is True
    assert [s["name"] for s in report["scenarios"]] == [
        "spectral", "lattice-discrepancy", "pair-discrepancy", "periodicity", "matching", "thm14",
    ]
    assert all(s["failures"] == [] for s in report["scenarios"])
    assert any("Running scenario spectral" in r["message"] for r in report["scenarios"][0]["log"])
    assert {r["scenario"] for r in report["scenarios"][1]["log"]} == {"lattice-discrepancy"}
    assert (out / "lattice-discrepancy" / "series.csv").exists()
    assert (out / "periodicity" / "periodic-m2.svg").exists()
    growth = json.loads((out / "matching" / "growth.json").read_text())
    assert [row["m"] for row in growth] == [1, 2]
    assert growth[1]["radius"] > growth[0]["radius"]
    spectral = json.loads((out / "spectral" / "spectral.json").read_text())
    assert spectral["sigma2"]["verdict"] == "Boundary"
    assert spectral["rho1"]["matrix"] == [[6, 9], [1, 6]]


def test_staircase_scenario(tmp_path):
    config = Config(
        tile_budget=10**6,
        scenarios=[ScenarioConfig("thm13", {"m": "1..3", "random_m": 3, "random_words": 4,
                                            "lattice_m": "1..6", "periodic_m": "2..3"})],
    )
    out = tmp_path / "out"
    result = run_report(config, out)
    assert result.passed
    staircases = json.loads((out / "thm13" / "staircases.json").read_text())
    assert [row["tiles"] for row in staircases] == [3, 54, 621]
    assert (out / "thm13" / "staircase-m3.svg").exists()


def test_failed_expectation_still_writes_report(tmp_path):
    config = Config(scenarios=[ScenarioConfig("spectral", {"rules": ["sigma1"], "expect_lambda1": 8})])
    out = tmp_path / "out"
    with pytest.raises(AssertionFailedError) as info:
        run_report(config, out)
    assert len(info.value.failures) == 1
    assert "lambda1" in info.value.failures[0]
    report = json.loads((out / "report.json").read_text())
    assert report["passed"] is False
    assert report["scenarios"][0]["failures"] == info.value.failures


def test_library_errors_become_failures(tmp_path):
    config = Config(tile_budget=10, scenarios=[ScenarioConfig("matching", {"m": 3})])
    with pytest.raises(AssertionFailedError) as info:
        run_report(config, tmp_path / "out")
    assert "WordTooLongError" in info.value.failures[0]


def test_shrinking_growth_radius_fails_the_matching_scenario(tmp_path, monkeypatch):
    rows = [GrowthRow(2, 60, 225, 7.5, 0), GrowthRow(3, 500, 3375, 7.0, 0)]
    monkeypatch.setattr("src.report.radius_growth", lambda ms, alpha, budget=None: rows)
    config = Config(scenarios=[ScenarioConfig("matching", {"word": "const:2", "m": 2, "growth": "2..3"})])
    with pytest.raises(AssertionFailedError) as info:
        run_report(config, tmp_path / "out")
    assert any("growth m=3" in f for f in info.value.failures)
    assert any("did not increase" in f for f in info.value.failures)
    assert (tmp_path / "out" / "matching" / "growth.json").exists()


def test_unknown_scenario_is_rejected_before_running(tmp_path):
    config = Config(scenarios=[ScenarioConfig("spectral"), ScenarioConfig("thm99")])
    with pytest.raises(ScenarioUnknownError):
        run_report(config, tmp_path / "out")
    assert not (tmp_path / "out").exists()


def test_empty_config_is_rejected(tmp_path):
    with pytest.raises(ReportError):
        run_report(Config(), tmp_path / "out")


def test_malformed_yaml_reports_line(tmp_path):
    with pytest.raises(ConfigParseError) as info:
        _config(tmp_path, "seed: 1\n\tbad: 2\n")
    assert info.value.line == 2


def test_non_mapping_config_is_rejected(tmp_path):
    with pytest.raises(ConfigParseError):
        _config(tmp_path, "- spectral\n- thm13\n")
    with pytest.raises(ConfigParseError):
        _config(tmp_path, "scenarios:\n  - 3\n")


def test_log_handler_drains_per_scenario():
    log = logging.getLogger("stairtile.test")
    root = logging.getLogger()
    level = root.level
    root.setLevel(logging.WARNING)
    with MemoryLogHandler().attached() as handler:
        handler.scenario = "first"
        log.info("one")
        log.debug("hidden")
        first = handler.drain()
        handler.scenario = "second"
        log.warning("two")
        second = handler.drain()
    log.info("after")
    assert [(r["scenario"], r["message"]) for r in first] == [("first", "one")]
    assert [(r["scenario"], r["level"]) for r in second] == [("second", "WARNING")]
    assert handler.drain() == []
    assert root.level == logging.WARNING
    root.setLevel(level)
