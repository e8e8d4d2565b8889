import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .errors import ConfigParseError

DEFAULT_TILE_BUDGET = 10**7


@dataclass
class ScenarioConfig:
    name: str
    params: dict = field(default_factory=dict)


@dataclass
class Config:
    tile_budget: int = DEFAULT_TILE_BUDGET
    seed: int = 0
    output_dir: str = "out"
    scenarios: list[ScenarioConfig] = field(default_factory=list)


def load_config(config_path: str | None = None) -> Config:
    """Load configuration from YAML file and environment variables.

    Environment variables take precedence over config file values:
    - STAIRTILE_TILE_BUDGET
    - STAIRTILE_SEED
    - STAIRTILE_OUTPUT_DIR
    """
    if config_path is None:
        config_path = os.environ.get("STAIRTILE_CONFIG", "stairtile.yaml")

    config_data = {}
    config_file = Path(config_path)

    if config_file.exists():
        with open(config_file) as f:
            try:
                config_data = yaml.safe_load(f) or {}
            except yaml.YAMLError as e:
                mark = getattr(e, "problem_mark", None)
                line = mark.line + 1 if mark is not None else None
                raise ConfigParseError(str(config_file), line, str(getattr(e, "problem", e))) from e
        if not isinstance(config_data, dict):
            raise ConfigParseError(str(config_file), 1, "top level must be a mapping")

    tile_budget = int(
        os.environ.get(
            "STAIRTILE_TILE_BUDGET",
            config_data.get("tile_budget", DEFAULT_TILE_BUDGET)
        )
    )
    seed = int(os.environ.get("STAIRTILE_SEED", config_data.get("seed", 0)))
    output_dir = os.environ.get("STAIRTILE_OUTPUT_DIR", config_data.get("output_dir", "out"))

    scenarios = []
    for entry in config_data.get("scenarios", []) or []:
        if isinstance(entry, str):
            scenarios.append(ScenarioConfig(name=entry))
        elif isinstance(entry, dict) and "name" in entry:
            params = {k: v for k, v in entry.items() if k != "name"}
            scenarios.append(ScenarioConfig(name=entry["name"], params=params))
        else:
            raise ConfigParseError(str(config_file), None, f"bad scenario entry: {entry!r}")

    return Config(
        tile_budget=tile_budget,
        seed=seed,
        output_dir=output_dir,
        scenarios=scenarios,
    )


def tile_budget() -> int:
    """Brute-force cap, honouring STAIRTILE_TILE_BUDGET."""
    return int(os.environ.get("STAIRTILE_TILE_BUDGET", DEFAULT_TILE_BUDGET))


def parse_m_range(value) -> list[int]:
    """Accept 5, "5", "2..10", "1,3,5" or a list of ints."""
    if isinstance(value, int):
        return [value]
    if isinstance(value, (list, tuple)):
        return [int(v) for v in value]
    text = str(value).strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(v) for v in text.split(",") if v.strip()]
