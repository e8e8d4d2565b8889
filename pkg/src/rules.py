import json
import logging
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import (
    AreaGapError,
    NotASuffixError,
    NotFoundError,
    OutOfBoundsError,
    OverlapError,
    RuleError,
    RuleValidationError,
    UnknownRuleError,
)
from .geometry import (
    Patch,
    PlacedTile,
    PointSet,
    Prototile,
    Rect,
    first_overlap,
    half_units,
    iter_subpatch_translations,
    to_fraction,
)
from .words import Word, all_words, suffixes

logger = logging.getLogger(__name__)

RULES_DIR = Path(__file__).parent / "data" / "rules"

# rho2 and sigma2 are the same rule
BUILTIN_FILES = {
    "rho1": "rho1.json",
    "sigma1": "sigma1.json",
    "sigma2": "sigma2.json",
    "rho2": "sigma2.json",
}
ALIASES = {
    "ϱ1": "rho1", "ϱ₁": "rho1",
    "ϱ2": "rho2", "ϱ₂": "rho2",
    "σ1": "sigma1", "σ₁": "sigma1",
    "σ2": "sigma2", "σ₂": "sigma2",
}


@dataclass(frozen=True, eq=False)
class SubstitutionRule:
    """Tessellation of each inflated prototile.

    ``images[id]`` lists the tiles of xi*T with xi*T anchored at the origin.
    """
    name: str
    inflation: int
    prototiles: tuple[Prototile, ...]
    images: dict[str, tuple[PlacedTile, ...]] = field(default_factory=dict)

    def __post_init__(self):
        if self.inflation < 2:
            raise RuleError(f"Rule {self.name}: inflation must be an integer > 1")
        ids = [p.id for p in self.prototiles]
        if len(set(ids)) != len(ids):
            raise RuleError(f"Rule {self.name}: prototile ids must be unique")
        object.__setattr__(
            self, "images", {k: tuple(v) for k, v in self.images.items()}
        )
        # per-type offsets, flattened for the expansion loop
        object.__setattr__(self, "_offsets", {
            k: tuple((t.tile_type, t.x2, t.y2, t.w2, t.h2) for t in v)
            for k, v in self.images.items()
        })

    @property
    def ids(self) -> list[str]:
        return [p.id for p in self.prototiles]

    def prototile(self, id: str) -> Prototile:
        for p in self.prototiles:
            if p.id == id:
                return p
        raise RuleError(f"Rule {self.name} has no prototile {id}")

    def substitute_tile(self, tile: PlacedTile) -> list[PlacedTile]:
        xi = self.inflation
        bx = xi * tile.x2
        by = xi * tile.y2
        return [
            PlacedTile(kind, bx + x2, by + y2, w2, h2)
            for kind, x2, y2, w2, h2 in self._offsets[tile.tile_type]
        ]

    def same_images(self, other: "SubstitutionRule") -> bool:
        return (
            self.inflation == other.inflation
            and self.prototiles == other.prototiles
            and all(sorted(self.images[i]) == sorted(other.images[i]) for i in self.ids)
        )


@dataclass
class PrototileCheck:
    id: str
    tiles: int
    area: Fraction


@dataclass
class ValidationReport:
    rule: str
    valid: bool
    prototiles: list[PrototileCheck]


def validate_rule(r: SubstitutionRule) -> ValidationReport:
    """Certify that every image tessellates its inflated prototile.

    Containment, pairwise interior-disjointness and the area identity are checked
    in that order; the first violation raises.
    """
    checks = []
    known = {p.id: p for p in r.prototiles}
    for proto in r.prototiles:
        if proto.id not in r.images:
            raise RuleValidationError("no image given", proto.id)
        image = r.images[proto.id]
        box = Rect(0, 0, r.inflation * proto.w2, r.inflation * proto.h2)
        for index, tile in enumerate(image):
            shape = known.get(tile.tile_type)
            if shape is None or (shape.w2, shape.h2) != (tile.w2, tile.h2):
                raise RuleValidationError(f"tile {index} has unknown type {tile.tile_type}", proto.id)
            if not box.contains(tile):
                raise OutOfBoundsError(proto.id, index)
        overlap = first_overlap(image)
        if overlap is not None:
            raise OverlapError(proto.id, *overlap)
        covered = sum((t.area for t in image), Fraction(0))
        deficit = box.area - covered
        if deficit != 0:
            raise AreaGapError(proto.id, deficit)
        checks.append(PrototileCheck(proto.id, len(image), covered))
    logger.debug(f"Rule {r.name} validated: {[(c.id, c.tiles) for c in checks]}")
    return ValidationReport(rule=r.name, valid=True, prototiles=checks)


def substitution_matrix(r: SubstitutionRule) -> np.ndarray:
    """Entry (i, j) counts tiles of type i in the image of prototile j."""
    ids = r.ids
    index = {id: i for i, id in enumerate(ids)}
    matrix = np.zeros((len(ids), len(ids)), dtype=np.int64)
    for j, id in enumerate(ids):
        for tile in r.images[id]:
            matrix[index[tile.tile_type], j] += 1
    return matrix


def areas(r: SubstitutionRule) -> list[Fraction]:
    return [p.area for p in r.prototiles]


@dataclass(frozen=True, eq=False)
class MixedSystem:
    """Rules sharing one prototile set and one inflation factor; letters are 1-based."""
    rules: tuple[SubstitutionRule, ...]

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        if not self.rules:
            raise RuleError("A mixed system needs at least one rule")
        first = self.rules[0]
        for rule in self.rules:
            if rule.prototiles != first.prototiles:
                raise RuleError(f"Rule {rule.name} uses a different prototile set")
            if rule.inflation != first.inflation:
                raise RuleError(f"Rule {rule.name} uses a different inflation factor")
            validate_rule(rule)

    @property
    def alphabet_size(self) -> int:
        return len(self.rules)

    @property
    def inflation(self) -> int:
        return self.rules[0].inflation

    @property
    def prototiles(self) -> tuple[Prototile, ...]:
        return self.rules[0].prototiles

    def prototile(self, id: str) -> Prototile:
        return self.rules[0].prototile(id)

    def rule(self, letter: int) -> SubstitutionRule:
        if not 1 <= letter <= len(self.rules):
            raise RuleError(f"Letter {letter} outside alphabet 1..{len(self.rules)}")
        return self.rules[letter - 1]

    def corner_tile(self, id: str) -> Patch:
        """Single tile with its south-west corner at the origin."""
        tile = self.prototile(id).at(0, 0)
        return Patch((tile,), Rect(0, 0, tile.w2, tile.h2))

    def centered_tile(self, id: str) -> Patch:
        """Single tile centered at the origin."""
        proto = self.prototile(id)
        if proto.w2 % 2 or proto.h2 % 2:
            raise RuleError(f"Prototile {id} cannot be centered on the half-integer grid")
        tile = proto.at(-proto.w2 // 2, -proto.h2 // 2)
        return Patch((tile,), Rect(tile.x2, tile.y2, tile.w2, tile.h2))


def iter_substituted(
    tiles: Iterable[PlacedTile], rules: Sequence[SubstitutionRule]
) -> Iterator[PlacedTile]:
    """Apply rules[0] first and rules[-1] last; the final generation is streamed."""
    if not rules:
        yield from tiles
        return
    current = list(tiles)
    for rule in rules[:-1]:
        current = [child for tile in current for child in rule.substitute_tile(tile)]
    last = rules[-1]
    for tile in current:
        yield from last.substitute_tile(tile)


def _scaled_support(p: Patch, factor: int) -> Rect | None:
    return p.support.scaled(factor) if p.support is not None else None


def _letters(w: Word | Sequence[int]) -> tuple[int, ...]:
    return tuple(w.letters) if isinstance(w, Word) else tuple(w)


def left_order(w: Word | Sequence[int], system: MixedSystem) -> list[SubstitutionRule]:
    """Rules in application order for the left action: last letter first."""
    return [system.rule(a) for a in reversed(_letters(w))]


def right_order(w: Word | Sequence[int], system: MixedSystem) -> list[SubstitutionRule]:
    return [system.rule(a) for a in _letters(w)]


def act_left(w: Word | Sequence[int], p: Patch, system: MixedSystem) -> Patch:
    """w.P = sigma_{w_1}(sigma_{w_2}(... sigma_{w_m}(P)))."""
    letters = _letters(w)
    tiles = tuple(iter_substituted(p.tiles, left_order(letters, system)))
    return Patch(tiles, _scaled_support(p, system.inflation ** len(letters)))


def act_right(w: Word | Sequence[int], p: Patch, system: MixedSystem) -> Patch:
    """P.w = (... ((P)sigma_{w_1}) ...)sigma_{w_m}."""
    letters = _letters(w)
    tiles = tuple(iter_substituted(p.tiles, right_order(letters, system)))
    return Patch(tiles, _scaled_support(p, system.inflation ** len(letters)))


# --- JSON form ---

def rule_from_dict(data: dict) -> SubstitutionRule:
    try:
        prototiles = tuple(
            Prototile.of(p["id"], p["w"], p["h"]) for p in data["prototiles"]
        )
        known = {p.id: p for p in prototiles}
        images = {}
        for id, entries in data["images"].items():
            tiles = []
            for entry in entries:
                proto = known.get(entry["type"])
                if proto is None:
                    raise RuleError(f"Image of {id} uses unknown tile type {entry['type']}")
                tiles.append(proto.at(half_units(entry["x"]), half_units(entry["y"])))
            images[id] = tuple(tiles)
        return SubstitutionRule(
            name=str(data["name"]),
            inflation=int(data["inflation"]),
            prototiles=prototiles,
            images=images,
        )
    except (KeyError, TypeError, ValueError) as e:
        raise RuleError(f"Malformed rule data: {e}") from e


def _number(h: int):
    value = to_fraction(h)
    return int(value) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def rule_to_dict(r: SubstitutionRule) -> dict:
    return {
        "name": r.name,
        "inflation": r.inflation,
        "prototiles": [
            {"id": p.id, "w": _number(p.w2), "h": _number(p.h2)} for p in r.prototiles
        ],
        "images": {
            id: [
                {"type": t.tile_type, "x": _number(t.x2), "y": _number(t.y2)}
                for t in r.images[id]
            ]
            for id in r.ids
        },
    }


def canonical_name(name: str) -> str:
    key = name.strip()
    key = ALIASES.get(key, key).lower()
    if key not in BUILTIN_FILES:
        raise UnknownRuleError(name)
    return key


@lru_cache(maxsize=None)
def builtin(name: str) -> SubstitutionRule:
    """Load one of the shipped rules: rho1, sigma1, sigma2 (alias rho2)."""
    key = canonical_name(name)
    with open(RULES_DIR / BUILTIN_FILES[key]) as f:
        rule = rule_from_dict(json.load(f))
    validate_rule(rule)
    return rule


@lru_cache(maxsize=None)
def standard_system() -> MixedSystem:
    """Sigma = (sigma1, sigma2) over F = {S, R}."""
    return MixedSystem((builtin("sigma1"), builtin("sigma2")))


def single_system(name: str) -> MixedSystem:
    return MixedSystem((builtin(name),))


def compose(rules: Sequence[int], system: MixedSystem) -> SubstitutionRule:
    """The rule T -> act_left(rules, T), with inflation xi ** len(rules)."""
    letters = tuple(rules)
    if not letters:
        raise RuleError("compose needs at least one letter")
    images = {
        proto.id: act_left(letters, system.corner_tile(proto.id), system).tiles
        for proto in system.prototiles
    }
    return SubstitutionRule(
        name="compose(" + ",".join(str(a) for a in letters) + ")",
        inflation=system.inflation ** len(letters),
        prototiles=system.prototiles,
        images=images,
    )


def is_uniformly_primitive(system: MixedSystem, m_max: int) -> int:
    """Smallest m0 <= m_max such that every word of length m0 applied to every
    prototile produces tiles of every type.

    Only the zero pattern of the count matrices matters, so products are clipped to 0/1.
    """
    if m_max < 1:
        raise RuleError("m_max must be at least 1")
    patterns = [np.minimum(substitution_matrix(r), 1) for r in system.rules]
    ids = [p.id for p in system.prototiles]
    failure = None
    for m in range(1, m_max + 1):
        failure = None
        for word in all_words(m, system.alphabet_size):
            product = np.eye(len(ids), dtype=np.int64)
            for a in word:
                product = np.minimum(product @ patterns[a - 1], 1)
            columns = np.all(product > 0, axis=0)
            if not columns.all():
                failure = (word, ids[int(np.argmin(columns))])
                break
        if failure is None:
            logger.info(f"System is uniformly primitive with m0 = {m}")
            return m
    word, proto = failure
    raise NotFoundError(m_max, word=str(word), prototile=proto)


def centers(p: Patch) -> PointSet:
    """One point at the barycenter of every tile."""
    return PointSet(tuple(t.center for t in p.tiles))


@dataclass
class SuffixContainment:
    contained: bool
    translation: tuple[Fraction, Fraction] | None


def check_suffix_containment(
    v: Word, u: Word, tile: str, system: MixedSystem
) -> SuffixContainment:
    """Whether T.v contains a translate of T.u (right action), with a witness."""
    if not u.is_suffix_of(v):
        raise NotASuffixError(u, v)
    start = system.corner_tile(tile)
    host = act_right(v, start, system)
    needle = act_right(u, start, system)
    for dx2, dy2 in iter_subpatch_translations(host, needle):
        return SuffixContainment(True, (to_fraction(dx2), to_fraction(dy2)))
    logger.warning(f"{tile}.{v} holds no copy of {tile}.{u}")
    return SuffixContainment(False, None)


def right_uniform_prefix_check(v: Word, system: MixedSystem) -> dict[str, list[bool]]:
    """check_suffix_containment for every non-empty suffix of v and every prototile."""
    return {
        proto.id: [
            check_suffix_containment(v, u, proto.id, system).contained for u in suffixes(v)
        ]
        for proto in system.prototiles
    }


@dataclass
class PeriodicityReport:
    periodic: bool
    checked: int
    failure: tuple[PlacedTile, tuple[int, int]] | None = None


def periodicity_check(
    patch: Patch, periods: Sequence[tuple[int, int]], collar: int
) -> PeriodicityReport:
    """Every tile inside the support eroded by ``collar`` has its translates by
    each period (whole units) in the patch as well."""
    if patch.support is None:
        raise RuleError("Periodicity needs a patch with a support rectangle")
    inner = patch.support.eroded(2 * collar)
    if inner is None:
        return PeriodicityReport(periodic=True, checked=0)
    tiles = patch.tile_set()
    checked = 0
    for tile in patch.tiles:
        if not inner.contains(tile):
            continue
        checked += 1
        for px, py in periods:
            if tile.translated(2 * px, 2 * py) not in tiles:
                return PeriodicityReport(False, checked, (tile, (px, py)))
    return PeriodicityReport(periodic=True, checked=checked)


def fundamental_domain(
    patch: Patch, periods: tuple[int, int], origin: tuple[int, int] | None = None
) -> Patch:
    """Tiles anchored in the cell [x, x+a) x [y, y+b) for axis periods (a, 0), (0, b).

    ``origin`` is in whole units and defaults to the south-west support corner.
    """
    a, b = periods
    if origin is None:
        if patch.support is None:
            raise RuleError("Need an origin or a support rectangle")
        x0, y0 = patch.support.x2, patch.support.y2
    else:
        x0, y0 = 2 * origin[0], 2 * origin[1]
    cell = [
        t for t in patch.tiles
        if x0 <= t.x2 < x0 + 2 * a and y0 <= t.y2 < y0 + 2 * b
    ]
    return Patch(tuple(cell), None)
