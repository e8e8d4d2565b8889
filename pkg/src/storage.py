"""JSON and CSV files for rules, patches, point windows and discrepancy series.

Exact values are written as integers or "p/q" strings so files round-trip
without float drift.
"""

import csv
import json
import logging
from fractions import Fraction
from pathlib import Path

from .bd import DiscrepancySeries
from .errors import StairtileError
from .geometry import Patch, PlacedTile, PointSet, Prototile, Rect, half_units, to_fraction
from .rules import SubstitutionRule, rule_from_dict, rule_to_dict, standard_system

logger = logging.getLogger(__name__)

SERIES_COLUMNS = ["m", "count1", "count2", "boundary", "ratio", "ratio_decimal", "brute"]


def exact_str(value) -> int | str | float:
    """Integers stay integers, other rationals become "p/q"; floats pass through."""
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    return float(value)


def parse_exact(value) -> Fraction | float:
    if isinstance(value, float):
        return value
    return Fraction(value)


def _half(h: int) -> int | str:
    return exact_str(to_fraction(h))


def patch_to_dict(p: Patch, interchange: bool = False) -> dict:
    """Exact x/y/w/h form, or with ``interchange`` the doubled-anchor form
    {"type", "x2", "y2"} whose sizes come from the S/R prototiles."""
    if interchange:
        prototiles = _standard_prototiles()
        for t in p.tiles:
            proto = prototiles.get(t.tile_type)
            if proto is None or (proto.w2, proto.h2) != (t.w2, t.h2):
                raise StairtileError(f"Tile {t} is not an S/R prototile; use the exact form")
        data = {"tiles": [{"type": t.tile_type, "x2": t.x2, "y2": t.y2} for t in p.tiles]}
        if p.support is not None:
            s = p.support
            data["support"] = {"x2": s.x2, "y2": s.y2, "w2": s.w2, "h2": s.h2}
        return data
    data = {
        "tiles": [
            {"type": t.tile_type, "x": _half(t.x2), "y": _half(t.y2), "w": _half(t.w2), "h": _half(t.h2)}
            for t in p.tiles
        ],
        "support": None,
    }
    if p.support is not None:
        s = p.support
        data["support"] = {"x": _half(s.x2), "y": _half(s.y2), "w": _half(s.w2), "h": _half(s.h2)}
    return data


def _standard_prototiles() -> dict[str, Prototile]:
    return {p.id: p for p in standard_system().prototiles}


def _tile_from_dict(t: dict, prototiles: dict[str, Prototile] | None) -> PlacedTile:
    kind = str(t["type"])
    if "x2" in t:
        return prototiles[kind].at(int(t["x2"]), int(t["y2"]))
    return PlacedTile(kind, half_units(t["x"]), half_units(t["y"]), half_units(t["w"]), half_units(t["h"]))


def _rect_from_dict(s: dict) -> Rect:
    if "x2" in s:
        return Rect(int(s["x2"]), int(s["y2"]), int(s["w2"]), int(s["h2"]))
    return Rect(half_units(s["x"]), half_units(s["y"]), half_units(s["w"]), half_units(s["h"]))


def patch_from_dict(data: dict) -> Patch:
    """Read either patch form; doubled-anchor tiles take their size from the S/R prototiles."""
    try:
        raw = data["tiles"]
        prototiles = _standard_prototiles() if any("x2" in t for t in raw) else None
        tiles = tuple(_tile_from_dict(t, prototiles) for t in raw)
        support = _rect_from_dict(data["support"]) if data.get("support") else None
    except (KeyError, TypeError, ValueError) as e:
        raise StairtileError(f"Malformed patch data: {e}") from e
    return Patch(tiles, support)


def write_json(data, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write("\n")
    logger.debug(f"Wrote {path}")
    return path


def read_json(path: str | Path):
    try:
        with open(path) as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise StairtileError(f"Cannot read {path}: {e}") from e


def save_patch(p: Patch, path: str | Path, interchange: bool = False) -> Path:
    return write_json(patch_to_dict(p, interchange), path)


def load_patch(path: str | Path) -> Patch:
    return patch_from_dict(read_json(path))


def save_rule(r: SubstitutionRule, path: str | Path) -> Path:
    return write_json(rule_to_dict(r), path)


def load_rule(path: str | Path) -> SubstitutionRule:
    return rule_from_dict(read_json(path))


def points_to_dict(points: PointSet) -> dict:
    return {"points": [[exact_str(x), exact_str(y)] for x, y in points]}


def load_points(path: str | Path) -> PointSet:
    """A point window from {"points": [[x, y], ...]} or from a patch file (tile centres)."""
    data = read_json(path)
    if "points" in data:
        return PointSet(tuple((parse_exact(x), parse_exact(y)) for x, y in data["points"]))
    patch = patch_from_dict(data)
    return PointSet(tuple(t.center for t in patch.tiles))


def series_records(series: DiscrepancySeries) -> list[dict]:
    return [
        {
            "m": row.m,
            "count1": exact_str(row.count1),
            "count2": exact_str(Fraction(row.count2)),
            "boundary": row.boundary,
            "ratio": exact_str(row.ratio),
            "ratio_decimal": f"{float(row.ratio):.12g}",
            "brute": row.brute if row.brute is not None else "",
        }
        for row in series.rows
    ]


def write_series_csv(series: DiscrepancySeries, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=SERIES_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(series_records(series))
    logger.debug(f"Wrote {len(series.rows)} rows to {path}")
    return path


def write_svg(document: bytes, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(document)
    return path
