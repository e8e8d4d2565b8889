"""Staircase patches: the tiles of w.R lying under the NW-SE diagonal of the
support, their closed-form counts and the generation decomposition.

Only the two-letter system over {S, R} is covered here.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from . import config
from .errors import BadParametersError, WordTooLongError
from .geometry import CubeUnion, Patch, PlacedTile, Rect, cube_union_of_patch
from .rules import iter_substituted, left_order, standard_system, substitution_matrix
from .words import Word, digit_sum

logger = logging.getLogger(__name__)

CORNER = "corner"
CENTERED = "centered"


class BlockKind(str, Enum):
    SQUARE = "square"
    RECTANGLE = "rectangle"


def below_diagonal(tile: PlacedTile | Rect, support: Rect) -> bool:
    """Whether the tile lies in the closed region under the NW-SE diagonal of support.

    The region is convex and the defining form grows in x and y, so testing the
    north-east corner is enough.
    """
    ex = tile.x2 + tile.w2 - support.x2
    ey = tile.y2 + tile.h2 - support.y2
    return support.h2 * ex + support.w2 * ey <= support.w2 * support.h2


def crosses_diagonal(tile: PlacedTile | Rect, support: Rect) -> bool:
    """Whether the diagonal line meets the interior of the tile."""
    limit = support.w2 * support.h2
    sw = support.h2 * (tile.x2 - support.x2) + support.w2 * (tile.y2 - support.y2)
    ne = support.h2 * (tile.x2 + tile.w2 - support.x2) + support.w2 * (tile.y2 + tile.h2 - support.y2)
    return sw < limit < ne


@dataclass
class StaircasePatch:
    word: Word
    patch: Patch
    window: CubeUnion
    mode: str = CORNER

    @property
    def m(self) -> int:
        return len(self.word)

    @property
    def support(self) -> Rect:
        return self.patch.support


def _start(mode: str):
    system = standard_system()
    if mode == CORNER:
        return system.corner_tile("R")
    if mode == CENTERED:
        return system.centered_tile("R")
    raise BadParametersError(f"Unknown mode {mode!r}; use {CORNER} or {CENTERED}")


def check_budget(m: int, budget: int | None = None) -> None:
    budget = config.tile_budget() if budget is None else budget
    tiles = 9**m
    if tiles > budget:
        raise WordTooLongError(m, tiles, budget)


def subdiagonal_patch(w: Word, mode: str = CORNER, budget: int | None = None) -> StaircasePatch:
    """Enumerate act_left(w, R) and keep the tiles under the support diagonal.

    In corner mode the support's south-west corner is the origin; in centered
    mode R sits centered at the origin and the window is anchored at the
    south-west corner of the generation-(m+1) rectangle. Corner-mode tiles are
    not cube-aligned, so the window is taken after shifting by (1/2, 1/2).
    """
    if len(w) < 1:
        raise BadParametersError("Staircase patches need a non-empty word")
    if any(a not in (1, 2) for a in w):
        raise BadParametersError(f"Staircase words are over {{1, 2}}, got {w}")
    check_budget(len(w), budget)

    system = standard_system()
    start = _start(mode)
    support = start.support.scaled(system.inflation ** len(w))
    tiles = tuple(
        tile
        for tile in iter_substituted(start.tiles, left_order(w, system))
        if below_diagonal(tile, support)
    )
    patch = Patch(tiles, support)
    aligned = patch if mode == CENTERED else patch.translated(1, 1)
    window = cube_union_of_patch(aligned)
    logger.debug(f"Staircase for w = {w} ({mode}): {len(tiles)} tiles, {window.area} cubes")
    return StaircasePatch(word=w, patch=patch, window=window, mode=mode)


def count_closed_form(w: Word) -> int:
    """#P_m^w = 9^m - 3^m (1 - D(w))."""
    m = len(w)
    return 9**m - 3**m * (1 - digit_sum(w))


def type_counts_closed_form(m: int) -> tuple[int, int]:
    """(n_m(S), n_m(R)) for the word 2^m."""
    if m < 1:
        raise BadParametersError(f"m must be positive, got {m}")
    n_s = 3 * (9**m - 3**m * (2 * m + 1))
    n_r = 9**m + 3**m * (2 * m - 1)
    return n_s // 4, n_r // 4


def window_area(m: int) -> Fraction:
    return Fraction(3, 2) * (9**m - 3**m)


def window_perimeter(m: int) -> int:
    return 8 * 3**m - 8


@dataclass
class GenerationRow:
    generation: int
    kind: BlockKind
    blocks: int
    tiles_per_block: int
    types_per_block: tuple[int, int]
    block_area: int

    @property
    def tiles(self) -> int:
        return self.blocks * self.tiles_per_block

    @property
    def area(self) -> int:
        return self.blocks * self.block_area


@dataclass
class DecompositionCounts:
    word: Word
    rows: list[GenerationRow] = field(default_factory=list)

    @property
    def total_tiles(self) -> int:
        return sum(row.tiles for row in self.rows)

    @property
    def total_area(self) -> int:
        return sum(row.area for row in self.rows)

    def type_counts(self) -> tuple[int, int]:
        n_s = sum(row.blocks * row.types_per_block[0] for row in self.rows)
        n_r = sum(row.blocks * row.types_per_block[1] for row in self.rows)
        return n_s, n_r

    def as_dict(self) -> dict:
        return {
            "word": str(self.word),
            "rows": [
                {
                    "generation": row.generation,
                    "kind": row.kind.value,
                    "blocks": row.blocks,
                    "tiles_per_block": row.tiles_per_block,
                    "block_area": row.block_area,
                }
                for row in self.rows
            ],
            "total_tiles": self.total_tiles,
            "total_area": self.total_area,
        }


def decomposition_counts(w: Word) -> DecompositionCounts:
    """Blocks of each generation under the diagonal of w.R.

    Letter j contributes 9 * 3^(m-j) squares of generation j when it is 1 and
    3 * 3^(m-j) rectangles when it is 2; a generation-j block holds the tiles of
    M^(j-1) applied to its prototile.
    """
    system = standard_system()
    # sigma1 and sigma2 share one matrix
    matrix = substitution_matrix(system.rule(1))
    index = {p.id: i for i, p in enumerate(system.prototiles)}
    m = len(w)
    rows = []
    power = np.eye(len(index), dtype=object)
    for j, letter in enumerate(w, start=1):
        if letter == 1:
            kind, blocks, proto = BlockKind.SQUARE, 9 * 3 ** (m - j), "S"
        else:
            kind, blocks, proto = BlockKind.RECTANGLE, 3 * 3 ** (m - j), "R"
        column = power[:, index[proto]]
        types = (int(column[index["S"]]), int(column[index["R"]]))
        area = int(system.prototile(proto).area) * 9 ** (j - 1)
        rows.append(GenerationRow(j, kind, blocks, int(sum(column)), types, area))
        power = power.dot(matrix.astype(object))
    return DecompositionCounts(word=w, rows=rows)


@dataclass(frozen=True)
class Block:
    generation: int
    kind: BlockKind
    rect: Rect


def decomposition_blocks(w: Word, mode: str = CORNER) -> list[Block]:
    """Placed generation blocks under the diagonal, read off the rule images.

    Under-diagonal tiles of each image become blocks; crossing tiles are R and
    are split again one generation down.
    """
    system = standard_system()
    root = _start(mode).support.scaled(system.inflation ** len(w))
    base = system.prototile("R")
    blocks = []
    stack = [(root, len(w))]
    while stack:
        rect, j = stack.pop()
        if j == 0:
            continue
        rule = system.rule(w[j - 1])
        factor = rect.w2 // (system.inflation * base.w2)
        for tile in rule.images["R"]:
            child = Rect(
                rect.x2 + factor * tile.x2,
                rect.y2 + factor * tile.y2,
                factor * tile.w2,
                factor * tile.h2,
            )
            if below_diagonal(child, rect):
                kind = BlockKind.SQUARE if tile.tile_type == "S" else BlockKind.RECTANGLE
                blocks.append(Block(j, kind, child))
            elif crosses_diagonal(child, rect):
                stack.append((child, j - 1))
    blocks.sort(key=lambda b: (b.generation, b.rect.x2, b.rect.y2))
    return blocks


def window_A(m: int, word: Word | None = None) -> CubeUnion:
    """Cube union under the diagonal of the centered generation-(m+1) rectangle.

    The shape does not depend on the word; one is accepted for symmetry with
    subdiagonal_patch and only its length is checked.
    """
    if m < 1:
        raise BadParametersError(f"m must be positive, got {m}")
    if word is not None and len(word) != m:
        raise BadParametersError(f"Word {word} does not have length {m}")
    centers: set[tuple[int, int]] = set()
    stack = [(Rect(-(3 ** (m + 1)), -(3**m), 2 * 3 ** (m + 1), 2 * 3**m), m)]
    while stack:
        rect, j = stack.pop()
        if j == 0:
            continue
        u2 = rect.h2 // 3
        for a, b in ((0, 0), (3, 0), (0, 1)):
            centers.update(Rect(rect.x2 + a * u2, rect.y2 + b * u2, 3 * u2, u2).cube_centers())
        for a, b in ((0, 2), (3, 1), (6, 0)):
            stack.append((Rect(rect.x2 + a * u2, rect.y2 + b * u2, 3 * u2, u2), j - 1))
    return CubeUnion(frozenset(centers))
