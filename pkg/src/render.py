import logging
from dataclasses import dataclass, field

from lxml import etree

from .diagonal import Block, StaircasePatch
from .errors import GeometryError
from .geometry import Patch, Rect

logger = logging.getLogger(__name__)

SVG_NS = "http://www.w3.org/2000/svg"

DEFAULT_FILLS = {"S": "#e9c46a", "R": "#2a9d8f"}


@dataclass
class RenderStyle:
    fills: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_FILLS))
    fallback_fill: str = "#cccccc"
    stroke: str = "#1d1d1d"
    stroke_width: int = 1
    scale: int = 10  # SVG units per half-unit
    diagonal: bool = False
    periods: tuple[tuple[int, int], ...] | None = None
    blocks: list[Block] | None = None
    block_stroke: str = "#e76f51"


def _el(parent, tag: str, attrs: dict):
    return etree.SubElement(parent, f"{{{SVG_NS}}}{tag}", {k: str(v) for k, v in attrs.items()})


def render_svg(p: Patch | StaircasePatch, style: RenderStyle | None = None) -> bytes:
    """One <rect> per tile in half-unit coordinates scaled to integers.

    The y axis is flipped so north is up. Identical inputs give identical bytes.
    """
    style = style or RenderStyle()
    patch = p.patch if isinstance(p, StaircasePatch) else p
    if not patch.tiles:
        raise GeometryError("Cannot render an empty patch")
    box = patch.support or patch.bounding_rect()
    k = style.scale
    top = box.y2 + box.h2

    def x(x2: int) -> int:
        return (x2 - box.x2) * k

    def y(y2: int) -> int:
        return (top - y2) * k

    width, height = box.w2 * k, box.h2 * k
    root = etree.Element(f"{{{SVG_NS}}}svg", nsmap={None: SVG_NS})
    for name, value in (("width", width), ("height", height), ("viewBox", f"0 0 {width} {height}")):
        root.set(name, str(value))

    tiles = _el(root, "g", {"class": "tiles", "stroke": style.stroke, "stroke-width": style.stroke_width})
    for t in patch.tiles:
        _el(tiles, "rect", {
            "class": t.tile_type,
            "x": x(t.x2),
            "y": y(t.y2 + t.h2),
            "width": t.w2 * k,
            "height": t.h2 * k,
            "fill": style.fills.get(t.tile_type, style.fallback_fill),
        })

    if style.blocks:
        overlay = _el(root, "g", {
            "class": "blocks", "fill": "none", "stroke": style.block_stroke,
            "stroke-width": 3 * style.stroke_width,
        })
        for block in style.blocks:
            r = block.rect
            _el(overlay, "rect", {
                "class": f"{block.kind.value} gen-{block.generation}",
                "x": x(r.x2), "y": y(r.y2 + r.h2), "width": r.w2 * k, "height": r.h2 * k,
            })

    if style.periods:
        _period_overlay(root, box, style, x, y)

    if style.diagonal:
        _el(root, "line", {
            "class": "diagonal",
            "x1": x(box.x2), "y1": y(box.y2 + box.h2),
            "x2": x(box.x2 + box.w2), "y2": y(box.y2),
            "stroke": style.block_stroke, "stroke-width": 2 * style.stroke_width,
        })

    document = etree.tostring(root, pretty_print=True, xml_declaration=True, encoding="utf-8")
    logger.debug(f"Rendered {len(patch)} tiles into a {width}x{height} SVG")
    return document


def _period_overlay(root, box: Rect, style: RenderStyle, x, y) -> None:
    """Dashed outline of the period cell at the south-west corner of the box."""
    k = style.scale
    a = next((px for px, py in style.periods if py == 0 and px > 0), None)
    b = next((py for px, py in style.periods if px == 0 and py > 0), None)
    if a is None or b is None:
        raise GeometryError("Period overlay needs periods (a, 0) and (0, b)")
    cell = Rect(box.x2, box.y2, 2 * a, 2 * b)
    _el(root, "rect", {
        "class": "period-cell", "fill": "none", "stroke": style.block_stroke,
        "stroke-width": 2 * style.stroke_width, "stroke-dasharray": f"{2 * k} {k}",
        "x": x(cell.x2), "y": y(cell.y2 + cell.h2), "width": cell.w2 * k, "height": cell.h2 * k,
    })
