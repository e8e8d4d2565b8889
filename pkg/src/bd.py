"""Bounded-displacement tooling on finite windows.

Discrepancy series compare point counts in the staircase windows A_m against
a second word or a lattice of the same density, scaled by the window perimeter.
The matcher checks the finite Hall condition behind BD-maps: every point of
the smaller set must be paired with a distinct partner within distance s.
"""

import bisect
import logging
import math
from collections import defaultdict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from . import config
from .diagonal import (
    CENTERED,
    below_diagonal,
    check_budget,
    count_closed_form,
    subdiagonal_patch,
    window_A,
    window_area,
    window_perimeter,
)
from .errors import BadParametersError, UnboundedError, WordTooLongError
from .geometry import CubeUnion, PointSet, Rect, point_reflect
from .matching import BipartiteGraph, HopcroftKarp
from .rules import act_left, centers, standard_system
from .sources import WordGenerator, parse_source
from .words import Word

logger = logging.getLogger(__name__)

DENSITY_TOLERANCE = 1e-9


def boundary_constant(s: float, d: int) -> float:
    """c(s) = 2 * 3^(d-1) * (1 + 2(s*sqrt(d) + d))^d."""
    if s <= 0 or d < 1:
        raise BadParametersError(f"Need s > 0 and d >= 1, got s={s}, d={d}")
    return 2 * 3 ** (d - 1) * (1 + 2 * (s * math.sqrt(d) + d)) ** d


@dataclass
class DiscrepancyRow:
    m: int
    count1: int
    count2: int | Fraction
    boundary: int
    ratio: Fraction
    brute: int | None = None

    @property
    def delta(self) -> Fraction:
        return abs(Fraction(self.count1) - Fraction(self.count2))


@dataclass
class DiscrepancySeries:
    source1: str
    source2: str
    rows: list[DiscrepancyRow] = field(default_factory=list)

    def ratios(self) -> list[Fraction]:
        return [row.ratio for row in self.rows]

    def row(self, m: int) -> DiscrepancyRow:
        for row in self.rows:
            if row.m == m:
                return row
        raise KeyError(m)


def _row(m: int, count1, count2) -> DiscrepancyRow:
    boundary = window_perimeter(m)
    ratio = abs(Fraction(count1) - Fraction(count2)) / boundary
    return DiscrepancyRow(m=m, count1=count1, count2=count2, boundary=boundary, ratio=ratio)


def _brute_count(w: Word, budget: int) -> int | None:
    try:
        return len(subdiagonal_patch(w, budget=budget).patch)
    except WordTooLongError:
        return None


def discrepancy_vs_lattice(
    w_source: "str | WordGenerator",
    alpha,
    m_range: Iterable[int],
    brute: bool = False,
    budget: int | None = None,
) -> DiscrepancySeries:
    """|#P_m^w - alpha * area(A_m)| / perimeter(A_m) for each m.

    With ``brute`` the closed-form count is checked against an enumerated patch
    whenever 9^m fits the tile budget.
    """
    source = parse_source(w_source)
    alpha = Fraction(alpha)
    if alpha <= 0:
        raise BadParametersError(f"alpha must be positive, got {alpha}")
    budget = config.tile_budget() if budget is None else budget
    series = DiscrepancySeries(source.label, f"lattice density {alpha}")
    for m in m_range:
        w = source.prefix(m)
        count = count_closed_form(w)
        row = _row(m, count, alpha * window_area(m))
        if brute:
            row.brute = _brute_count(w, budget)
            if row.brute is not None and row.brute != count:
                logger.error(f"Closed form {count} disagrees with enumeration {row.brute} for w = {w}")
        series.rows.append(row)
    logger.info(f"Lattice discrepancy for {source.label}: {len(series.rows)} rows")
    return series


def discrepancy_pair(
    w1_source: "str | WordGenerator", w2_source: "str | WordGenerator", m_range: Iterable[int]
) -> DiscrepancySeries:
    """Count difference of the staircases of two words; equals 3^m |D(w1(m)) - D(w2(m))|."""
    s1 = parse_source(w1_source)
    s2 = parse_source(w2_source)
    series = DiscrepancySeries(s1.label, s2.label)
    for m in m_range:
        series.rows.append(_row(m, count_closed_form(s1.prefix(m)), count_closed_form(s2.prefix(m))))
    return series


def reflection_pair_series(
    m_range: Iterable[int], budget: int | None = None
) -> DiscrepancySeries:
    """Staircase counts of Lambda (word 1^m) against -Lambda.

    Reflecting act_left(1^m, R) through the origin gives act_left(2^m, R), so
    the second count is read off the reflected patch when it fits the budget and
    from the closed form for 2^m otherwise.
    """
    budget = config.tile_budget() if budget is None else budget
    system = standard_system()
    start = system.centered_tile("R")
    series = DiscrepancySeries("const:1", "reflected const:1")
    for m in m_range:
        ones = Word.constant(1, m)
        twos = Word.constant(2, m)
        count1 = count_closed_form(ones)
        count2 = count_closed_form(twos)
        row = _row(m, count1, count2)
        try:
            check_budget(m, budget)
        except WordTooLongError:
            series.rows.append(row)
            continue
        reflected = point_reflect(act_left(ones, start, system))
        support = reflected.support
        row.brute = sum(1 for t in reflected.tiles if below_diagonal(t, support))
        if row.brute != count2:
            logger.error(f"Reflected staircase has {row.brute} tiles, closed form says {count2}")
        series.rows.append(row)
    return series


class SeriesVerdict(str, Enum):
    DIVERGING = "diverging"
    INCONCLUSIVE = "inconclusive at tested scale"


def verdict(series: DiscrepancySeries, bound: Fraction | int = 1) -> SeriesVerdict:
    """Finite-scale reading of a ratio series.

    "diverging" needs at least three rows, a last ratio above ``bound`` and
    growth by half since the middle of the range. Bounded series are never
    read as evidence of equivalence.
    """
    ratios = series.ratios()
    if len(ratios) < 3:
        return SeriesVerdict.INCONCLUSIVE
    last = ratios[-1]
    middle = ratios[len(ratios) // 2]
    if last > bound and last >= Fraction(3, 2) * middle:
        return SeriesVerdict.DIVERGING
    return SeriesVerdict.INCONCLUSIVE


class DensityVerdict(str, Enum):
    NO_BD_MAP_POSSIBLE = "NoBDMapPossible"
    SAME_DENSITY = "SameDensity"


def density_compare(pd1, pd2) -> DensityVerdict:
    """Different natural densities rule out an unscaled BD-map.

    Accepts PerronData or bare densities.
    """
    a1 = getattr(pd1, "density", pd1)
    a2 = getattr(pd2, "density", pd2)
    if isinstance(a1, (int, Fraction)) and isinstance(a2, (int, Fraction)):
        same = Fraction(a1) == Fraction(a2)
    else:
        same = abs(float(a1) - float(a2)) <= DENSITY_TOLERANCE * max(1.0, abs(float(a1)))
    return DensityVerdict.SAME_DENSITY if same else DensityVerdict.NO_BD_MAP_POSSIBLE


# --- matching ---

@dataclass
class MatchOutcome:
    radius_squared: Fraction | float
    pairs: list[tuple[int, int]]
    unmatched: tuple[int, int]
    deficiency: int
    hall_violator: tuple | None = None
    neighbourhood: tuple | None = None
    violator_side: int | None = None

    @property
    def radius(self) -> float:
        return math.sqrt(float(self.radius_squared))

    @property
    def perfect(self) -> bool:
        return self.deficiency == 0


def _squared(a, b):
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    return dx * dx + dy * dy


class _WindowInstance:
    """Two point windows with the smaller one on the U side of the graph."""

    def __init__(self, p1: PointSet, p2: PointSet):
        self.p1 = p1
        self.p2 = p2
        self.exact = p1.is_exact() and p2.is_exact()
        self.swapped = len(p1) > len(p2)
        self.small, self.large = (p2.points, p1.points) if self.swapped else (p1.points, p2.points)

    def radius_squared(self, s):
        if s < 0:
            raise BadParametersError(f"Radius must be non-negative, got {s}")
        if self.exact and isinstance(s, (int, float, Fraction)):
            return Fraction(s) ** 2
        return float(s) ** 2

    def edges(self, r2) -> list[tuple]:
        """(d2, i, j) for all pairs within squared distance r2, sorted by d2."""
        cell = math.isqrt(math.ceil(r2)) + 1
        buckets: dict[tuple[int, int], list[int]] = defaultdict(list)
        for j, (x, y) in enumerate(self.large):
            buckets[(math.floor(x / cell), math.floor(y / cell))].append(j)
        found = []
        for i, point in enumerate(self.small):
            kx = math.floor(point[0] / cell)
            ky = math.floor(point[1] / cell)
            for dx in (-1, 0, 1):
                for dy in (-1, 0, 1):
                    for j in buckets.get((kx + dx, ky + dy), ()):
                        d2 = _squared(point, self.large[j])
                        if d2 <= r2:
                            found.append((d2, i, j))
        found.sort()
        return found

    def diameter_squared(self):
        points = self.small + self.large
        xs = [p[0] for p in points]
        ys = [p[1] for p in points]
        return (max(xs) - min(xs)) ** 2 + (max(ys) - min(ys)) ** 2

    def solve(self, r2, edges: list[tuple] | None = None) -> MatchOutcome:
        if edges is None:
            edges = self.edges(r2)
        else:
            edges = edges[: bisect.bisect_right(edges, (r2, math.inf, math.inf))]
        graph = BipartiteGraph(len(self.small), len(self.large), [(i, j) for _, i, j in edges])
        hk = HopcroftKarp(graph)
        pairs = hk()
        deficiency = len(self.small) - len(pairs)
        outcome = MatchOutcome(
            radius_squared=r2,
            pairs=[(j, i) for i, j in pairs] if self.swapped else pairs,
            unmatched=(len(self.p1) - len(pairs), len(self.p2) - len(pairs)),
            deficiency=deficiency,
        )
        if deficiency:
            violator, neighbourhood = hk.hall_violator()
            outcome.hall_violator = tuple(self.small[i] for i in violator)
            outcome.neighbourhood = tuple(self.large[j] for j in neighbourhood)
            outcome.violator_side = 2 if self.swapped else 1
        return outcome


def hall_window_match(p1: PointSet, p2: PointSet, s) -> MatchOutcome:
    """Maximum matching of the smaller window into the other with edges ||x - y|| <= s.

    Distances are compared as exact squares when both windows carry rational
    coordinates. A deficient outcome carries a Hall violator F from the smaller
    side together with its neighbourhood N(F).
    """
    instance = _WindowInstance(p1, p2)
    outcome = instance.solve(instance.radius_squared(s))
    logger.debug(
        f"Match at s = {outcome.radius:.6g}: {len(outcome.pairs)} pairs, deficiency {outcome.deficiency}"
    )
    return outcome


def min_matching_radius(
    p1: PointSet, p2: PointSet, require_perfect: bool = False
) -> MatchOutcome:
    """Smallest pairwise distance s* at which the smaller window is fully matched.

    Size imbalance is reported through ``unmatched``; with ``require_perfect``
    it raises UnboundedError instead, since no radius can match both sides.
    """
    instance = _WindowInstance(p1, p2)
    if require_perfect and len(p1) != len(p2):
        raise UnboundedError(len(p1), len(p2))
    zero = Fraction(0) if instance.exact else 0.0
    if not instance.small:
        return instance.solve(zero)

    # doubling search for an upper radius
    limit = instance.diameter_squared()
    hi = Fraction(1) if instance.exact else 1.0
    while not instance.solve(hi).perfect:
        if hi > limit:
            raise UnboundedError(len(p1), len(p2))
        hi *= 4

    edges = instance.edges(hi)
    candidates = sorted({d2 for d2, _, _ in edges})
    lo_index, hi_index = 0, len(candidates) - 1
    while lo_index < hi_index:
        mid = (lo_index + hi_index) // 2
        if instance.solve(candidates[mid], edges).perfect:
            hi_index = mid
        else:
            lo_index = mid + 1
    outcome = instance.solve(candidates[lo_index], edges)
    logger.info(
        f"Minimal matching radius {outcome.radius:.6g} for {len(p1)} vs {len(p2)} points"
    )
    return outcome


# --- lattice windows ---

def _rational_sqrt(value: Fraction) -> Fraction | None:
    num = math.isqrt(value.numerator)
    den = math.isqrt(value.denominator)
    if num * num == value.numerator and den * den == value.denominator:
        return Fraction(num, den)
    return None


def lattice_spacing(alpha) -> Fraction | float:
    """Spacing c with c*Z^2 of natural density alpha, i.e. c = alpha^(-1/2)."""
    alpha = Fraction(alpha)
    if alpha <= 0:
        raise BadParametersError(f"alpha must be positive, got {alpha}")
    exact = _rational_sqrt(1 / alpha)
    return exact if exact is not None else math.sqrt(1 / float(alpha))


def parse_density(text) -> Fraction:
    """Lattice density from "2/3", "0.5" or "sqrt(2/3)".

    ``sqrt(q)`` names the lattice paired with density q (the one written
    sqrt(q)Z^2 next to staircase windows); it resolves to density q.
    """
    raw = str(text).strip().lower()
    if raw.startswith("sqrt(") and raw.endswith(")"):
        raw = raw[len("sqrt("):-1].strip()
    try:
        alpha = Fraction(raw)
    except (ValueError, ZeroDivisionError) as e:
        raise BadParametersError(f"Cannot read a lattice density from {text!r}") from e
    if alpha <= 0:
        raise BadParametersError(f"alpha must be positive, got {alpha}")
    return alpha


def _region_bounds(region: CubeUnion | Rect):
    if isinstance(region, Rect):
        x0, y0 = region.anchor
        return x0, y0, x0 + region.width, y0 + region.height
    xmin, ymin, xmax, ymax = region.bounds()
    half = Fraction(1, 2)
    return xmin - half, ymin - half, xmax + half, ymax + half


def _region_contains(region: CubeUnion | Rect, x, y) -> bool:
    if isinstance(region, Rect):
        return region.x2 <= 2 * x < region.x2 + region.w2 and region.y2 <= 2 * y < region.y2 + region.h2
    return region.contains_point(x, y)


def _region_centroid(region: CubeUnion | Rect):
    if isinstance(region, Rect):
        x0, y0, x1, y1 = _region_bounds(region)
        return (x0 + x1) / 2, (y0 + y1) / 2
    n = len(region.centers)
    return (
        Fraction(sum(x for x, _ in region.centers), n),
        Fraction(sum(y for _, y in region.centers), n),
    )


def lattice_window(alpha, region: CubeUnion | Rect, clip: int | None = None) -> PointSet:
    """Points of the density-alpha square lattice inside region.

    Coordinates are Fractions when alpha^(-1/2) is rational. ``clip`` keeps the
    given number of points nearest the centroid of the region.
    """
    c = lattice_spacing(alpha)
    x0, y0, x1, y1 = _region_bounds(region)
    points = [
        (i * c, j * c)
        for i in range(math.ceil(x0 / c), math.floor(x1 / c) + 1)
        for j in range(math.ceil(y0 / c), math.floor(y1 / c) + 1)
        if _region_contains(region, i * c, j * c)
    ]
    if clip is not None and clip < len(points):
        cx, cy = _region_centroid(region)
        points.sort(key=lambda p: (_squared(p, (cx, cy)), p[1], p[0]))
        points = sorted(points[:clip])
    return PointSet(tuple(points))


@dataclass
class GrowthRow:
    m: int
    lattice_points: int
    patch_points: int
    radius_squared: Fraction | float
    deficiency: int

    @property
    def radius(self) -> float:
        return math.sqrt(float(self.radius_squared))


def radius_growth(
    ms: Sequence[int], alpha=Fraction(2, 3), budget: int | None = None
) -> list[GrowthRow]:
    """Minimal radius matching the lattice points of A_m into tile centres of the
    whole centered patch 2^m.R.

    The staircase holds m*3^m fewer tiles than the lattice has points in A_m, so
    the radius grows with m. Staircase centres alone are not monotone at small
    m; the target set is the whole patch.
    """
    system = standard_system()
    start = system.centered_tile("R")
    rows = []
    for m in ms:
        check_budget(m, budget)
        lattice = lattice_window(alpha, window_A(m))
        patch = act_left(Word.constant(2, m), start, system)
        outcome = min_matching_radius(lattice, centers(patch))
        rows.append(GrowthRow(m, len(lattice), len(patch), outcome.radius_squared, outcome.deficiency))
        logger.info(f"m = {m}: s* = {outcome.radius:.6g} for {len(lattice)} lattice points")
    return rows


def staircase_window(w: Word, budget: int | None = None) -> tuple[PointSet, CubeUnion]:
    """Tile centres of the centered staircase for w and its window A_m."""
    staircase = subdiagonal_patch(w, mode=CENTERED, budget=budget)
    return centers(staircase.patch), staircase.window