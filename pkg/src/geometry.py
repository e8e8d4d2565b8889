"""Exact rectangle and cube-union arithmetic on the half-integer grid.

All coordinates are stored as integers counting half-units, so a tile anchored at
(-3/2, -1/2) has ``x2 == -3`` and ``y2 == -1``. Nothing in this module rounds.
"""

import logging
import math
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import NamedTuple

from .errors import EmptyUnionError, NonCubeAlignedError

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


def half_units(value) -> int:
    """Convert an exact value (int, Fraction, numeric string) to half-units."""
    doubled = Fraction(value) * 2
    if doubled.denominator != 1:
        raise ValueError(f"{value} is not a multiple of 1/2")
    return int(doubled)


def to_fraction(h: int) -> Fraction:
    return Fraction(h, 2)


@dataclass(frozen=True, order=True)
class Prototile:
    id: str
    w2: int
    h2: int

    def __post_init__(self):
        if self.w2 <= 0 or self.h2 <= 0:
            raise ValueError(f"Prototile {self.id} must have positive size")

    @classmethod
    def of(cls, id: str, width, height) -> "Prototile":
        return cls(id, half_units(width), half_units(height))

    @property
    def width(self) -> Fraction:
        return to_fraction(self.w2)

    @property
    def height(self) -> Fraction:
        return to_fraction(self.h2)

    @property
    def area(self) -> Fraction:
        return Fraction(self.w2 * self.h2, 4)

    def at(self, x2: int, y2: int) -> "PlacedTile":
        return PlacedTile(self.id, x2, y2, self.w2, self.h2)


class PlacedTile(NamedTuple):
    """A prototile translated so its south-west corner sits at (x2, y2)."""
    tile_type: str
    x2: int
    y2: int
    w2: int
    h2: int

    @property
    def anchor(self) -> tuple[Fraction, Fraction]:
        return to_fraction(self.x2), to_fraction(self.y2)

    @property
    def area(self) -> Fraction:
        return Fraction(self.w2 * self.h2, 4)

    @property
    def center(self) -> tuple[Fraction, Fraction]:
        return Fraction(2 * self.x2 + self.w2, 4), Fraction(2 * self.y2 + self.h2, 4)

    def translated(self, dx2: int, dy2: int) -> "PlacedTile":
        return self._replace(x2=self.x2 + dx2, y2=self.y2 + dy2)


@dataclass(frozen=True)
class Rect:
    """Half-open box [x, x+w) x [y, y+h) in half-units."""
    x2: int
    y2: int
    w2: int
    h2: int

    def __post_init__(self):
        if self.w2 <= 0 or self.h2 <= 0:
            raise ValueError(f"Rect needs positive width and height, got {self.w2}x{self.h2}")

    @property
    def anchor(self) -> tuple[Fraction, Fraction]:
        return to_fraction(self.x2), to_fraction(self.y2)

    @property
    def width(self) -> Fraction:
        return to_fraction(self.w2)

    @property
    def height(self) -> Fraction:
        return to_fraction(self.h2)

    @property
    def area(self) -> Fraction:
        return Fraction(self.w2 * self.h2, 4)

    def contains(self, tile: PlacedTile) -> bool:
        return (
            self.x2 <= tile.x2 and tile.x2 + tile.w2 <= self.x2 + self.w2
            and self.y2 <= tile.y2 and tile.y2 + tile.h2 <= self.y2 + self.h2
        )

    def scaled(self, factor: int) -> "Rect":
        """Image under x -> factor * x."""
        return Rect(self.x2 * factor, self.y2 * factor, self.w2 * factor, self.h2 * factor)

    def translated(self, dx2: int, dy2: int) -> "Rect":
        return Rect(self.x2 + dx2, self.y2 + dy2, self.w2, self.h2)

    def cube_centers(self) -> Iterator[tuple[int, int]]:
        """Integer centers of the unit cubes tiling this box; needs odd anchor, even size."""
        if self.x2 % 2 == 0 or self.y2 % 2 == 0 or self.w2 % 2 or self.h2 % 2:
            raise NonCubeAlignedError(self)
        x0 = (self.x2 + 1) // 2
        y0 = (self.y2 + 1) // 2
        for dx in range(self.w2 // 2):
            for dy in range(self.h2 // 2):
                yield x0 + dx, y0 + dy

    def eroded(self, collar2: int) -> "Rect | None":
        """Shrink by a collar on every side; None when nothing is left."""
        if self.w2 <= 2 * collar2 or self.h2 <= 2 * collar2:
            return None
        return Rect(self.x2 + collar2, self.y2 + collar2, self.w2 - 2 * collar2, self.h2 - 2 * collar2)


def first_overlap(tiles: Iterable[PlacedTile]) -> tuple[int, int] | None:
    """Indices of the first pair of tiles with intersecting interiors.

    Tiles are rasterised on the half-unit grid; every half-unit cell is owned by
    at most one tile.
    """
    owner: dict[tuple[int, int], int] = {}
    for index, tile in enumerate(tiles):
        for cx in range(tile.x2, tile.x2 + tile.w2):
            for cy in range(tile.y2, tile.y2 + tile.h2):
                previous = owner.setdefault((cx, cy), index)
                if previous != index:
                    return previous, index
    return None


@dataclass(frozen=True)
class Patch:
    """Finite collection of placed tiles, optionally tessellating a support rectangle.

    Tiles are kept sorted so two patches with the same tiles compare equal.
    """
    tiles: tuple[PlacedTile, ...]
    support: Rect | None = None

    def __post_init__(self):
        object.__setattr__(self, "tiles", tuple(sorted(self.tiles)))

    def __len__(self) -> int:
        return len(self.tiles)

    def __iter__(self) -> Iterator[PlacedTile]:
        return iter(self.tiles)

    @property
    def area(self) -> Fraction:
        return Fraction(sum(t.w2 * t.h2 for t in self.tiles), 4)

    def count_by_type(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for tile in self.tiles:
            counts[tile.tile_type] = counts.get(tile.tile_type, 0) + 1
        return counts

    def tile_set(self) -> frozenset[PlacedTile]:
        return frozenset(self.tiles)

    def bounding_rect(self) -> Rect:
        if not self.tiles:
            raise EmptyUnionError()
        x0 = min(t.x2 for t in self.tiles)
        y0 = min(t.y2 for t in self.tiles)
        x1 = max(t.x2 + t.w2 for t in self.tiles)
        y1 = max(t.y2 + t.h2 for t in self.tiles)
        return Rect(x0, y0, x1 - x0, y1 - y0)

    def translated(self, dx2: int, dy2: int) -> "Patch":
        support = self.support.translated(dx2, dy2) if self.support else None
        return Patch(tuple(t.translated(dx2, dy2) for t in self.tiles), support)

    def is_subpatch_of(self, other: "Patch") -> bool:
        return self.tile_set() <= other.tile_set()

    def tessellates_support(self) -> bool:
        """Area identity, containment and disjointness together."""
        if self.support is None:
            return False
        if self.area != self.support.area:
            return False
        if not all(self.support.contains(t) for t in self.tiles):
            return False
        return first_overlap(self.tiles) is None



def tile_containing(p: Patch, x2: int, y2: int) -> PlacedTile | None:
    """The tile whose half-open box holds the half-unit point (x2, y2)."""
    for tile in p.tiles:
        if tile.x2 <= x2 < tile.x2 + tile.w2 and tile.y2 <= y2 < tile.y2 + tile.h2:
            return tile
    return None


@dataclass(frozen=True)
class CubeUnion:
    """Finite union of unit cubes C(x) = [x - 1/2, x + 1/2)^2 with integer centers x."""
    centers: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __len__(self) -> int:
        return len(self.centers)

    @property
    def area(self) -> int:
        return len(self.centers)

    def adjacent_pairs(self) -> int:
        centers = self.centers
        return sum(
            ((x + 1, y) in centers) + ((x, y + 1) in centers)
            for x, y in centers
        )

    def perimeter(self) -> int:
        return perimeter(self)

    def translated(self, dx: int, dy: int) -> "CubeUnion":
        return CubeUnion(frozenset((x + dx, y + dy) for x, y in self.centers))

    def contains_point(self, x, y) -> bool:
        """Whether (x, y) lies in the union (cubes are half-open)."""
        cx = math.floor(x + HALF)
        cy = math.floor(y + HALF)
        return (cx, cy) in self.centers

    def bounds(self) -> tuple[int, int, int, int]:
        """Smallest and largest center coordinates: (xmin, ymin, xmax, ymax)."""
        if not self.centers:
            raise EmptyUnionError()
        xs = [x for x, _ in self.centers]
        ys = [y for _, y in self.centers]
        return min(xs), min(ys), max(xs), max(ys)


def cube_union_of_patch(p: Patch) -> CubeUnion:
    """Set of integer centers x whose cube C(x) is covered by the tiles of p."""
    centers: set[tuple[int, int]] = set()
    for tile in p.tiles:
        # half-integer anchor and whole-unit size
        if tile.x2 % 2 == 0 or tile.y2 % 2 == 0 or tile.w2 % 2 or tile.h2 % 2:
            raise NonCubeAlignedError(tile)
        centers.update(Rect(tile.x2, tile.y2, tile.w2, tile.h2).cube_centers())
    return CubeUnion(frozenset(centers))


def perimeter(u: CubeUnion) -> int:
    """Length of the boundary of the union: 4n minus 2 per edge-adjacent pair."""
    if not u.centers:
        raise EmptyUnionError()
    return 4 * len(u.centers) - 2 * u.adjacent_pairs()


@dataclass(frozen=True)
class PointSet:
    """Finite window of a Delone set.

    Coordinates are Fractions for points built from tiles, so distances between
    them are exact; sampled lattices with irrational spacing carry floats.
    """
    points: tuple[tuple[Real, Real], ...]

    def __post_init__(self):
        if len(set(self.points)) != len(self.points):
            raise ValueError("PointSet contains duplicate points")

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def translated(self, dx, dy) -> "PointSet":
        return PointSet(tuple((x + dx, y + dy) for x, y in self.points))

    def is_exact(self) -> bool:
        return all(isinstance(c, (int, Fraction)) for point in self.points for c in point)

    def bounding_rect(self) -> Rect:
        """Smallest half-unit box [x0, x1) x [y0, y1) holding every point."""
        if not self.points:
            raise EmptyUnionError()
        x0 = math.floor(min(2 * x for x, _ in self.points))
        y0 = math.floor(min(2 * y for _, y in self.points))
        x1 = math.floor(max(2 * x for x, _ in self.points)) + 1
        y1 = math.floor(max(2 * y for _, y in self.points)) + 1
        return Rect(x0, y0, x1 - x0, y1 - y0)


def point_reflect(p: Patch | PointSet) -> Patch | PointSet:
    """Image under x -> -x; reflected tiles stay anchored at their south-west corner."""
    if isinstance(p, PointSet):
        return PointSet(tuple((-x, -y) for x, y in p.points))
    tiles = tuple(t._replace(x2=-t.x2 - t.w2, y2=-t.y2 - t.h2) for t in p.tiles)
    support = None
    if p.support is not None:
        s = p.support
        support = Rect(-s.x2 - s.w2, -s.y2 - s.h2, s.w2, s.h2)
    return Patch(tiles, support)


def iter_subpatch_translations(host: Patch, needle: Patch) -> Iterator[tuple[int, int]]:
    """Half-unit vectors t with needle + t a sub-collection of host, in sorted order."""
    if not needle.tiles:
        yield (0, 0)
        return
    if len(needle) > len(host):
        return
    host_tiles = host.tile_set()
    box = host.bounding_rect()
    nbox = needle.bounding_rect()
    pivot = needle.tiles[0]
    rest = needle.tiles[1:]
    for tile in host.tiles:
        if tile.tile_type != pivot.tile_type or tile.w2 != pivot.w2 or tile.h2 != pivot.h2:
            continue
        dx2 = tile.x2 - pivot.x2
        dy2 = tile.y2 - pivot.y2
        if not box.contains(PlacedTile("", nbox.x2 + dx2, nbox.y2 + dy2, nbox.w2, nbox.h2)):
            continue
        if all(t.translated(dx2, dy2) in host_tiles for t in rest):
            yield dx2, dy2


def find_subpatch(host: Patch, needle: Patch) -> list[tuple[Fraction, Fraction]]:
    """All translation vectors carrying needle onto a sub-patch of host."""
    found = [
        (to_fraction(dx2), to_fraction(dy2))
        for dx2, dy2 in iter_subpatch_translations(host, needle)
    ]
    logger.debug(f"find_subpatch: {len(found)} translation(s) of a {len(needle)}-tile needle")
    return found
