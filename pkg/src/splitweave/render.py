"""Interpreter and deterministic SVG emitter.

interpret() lowers a validated Program to a flat SceneGraph (paint-ordered
primitives); emit_svg() serializes it byte-stably: fixed attribute order,
rounded coordinates with trimmed zeros, defs sorted by motif id, no ids or
timestamps that could vary between runs. Raster output goes through a
pluggable rasterizer and is explicitly outside the determinism contract.
"""

from __future__ import annotations

import math
import xml.sax.saxutils
from dataclasses import dataclass
from typing import Optional, Protocol, Union

from .core import (
    CanvasSpec, Color, Diagnostic, FieldExpr, Layer, Node, Program, fmt_number,
    lerp_color, quantize, validate,
)
from .errors import SplitWeaveError, StructureMismatch, UnknownMotif
from .fields import FieldContext, eval_color, eval_number
from .geometry import (
    Fragment, FragmentSet, Polygon, merge_fragments, polygon_bbox, polygon_centroid,
    polygon_inset, split_brick, split_grid, split_stripes, split_voronoi,
    transform_polygon, MIN_FRAGMENT_AREA, polygon_area,
)
from .motifs import MotifDef, MotifRegistry, builtin_registry
from .parser import SemanticError
from .rng import derive

Affine = tuple[float, float, float, float, float, float]  # SVG (a b c d e f)


@dataclass(frozen=True)
class FilledPath:
    polygon: Polygon
    fill: Color
    opacity: float = 1.0
    corner_radius: float = 0.0


@dataclass(frozen=True)
class StrokedPath:
    polygon: Polygon
    stroke: Color
    stroke_width: float
    opacity: float = 1.0
    corner_radius: float = 0.0


@dataclass(frozen=True)
class MotifInstance:
    motif_id: str
    transform: Affine
    fill: Optional[Color] = None
    opacity: float = 1.0


Element = Union[FilledPath, StrokedPath, MotifInstance]


@dataclass(frozen=True)
class SceneGraph:
    canvas: CanvasSpec
    defs: tuple[MotifDef, ...]
    elements: tuple[Element, ...]
    warnings: tuple[Diagnostic, ...] = ()


@dataclass(frozen=True)
class RenderOptions:
    precision: int = 3
    raster_size: Optional[int] = None

    def __post_init__(self):
        if not 1 <= self.precision <= 6:
            raise ValueError(f"precision must lie in 1..6, got {self.precision}")


@dataclass(frozen=True)
class PatternImage:
    svg_text: str
    raster_bytes: Optional[bytes] = None
    warnings: tuple[Diagnostic, ...] = ()


class Rasterizer(Protocol):
    def rasterize(self, scene: SceneGraph, registry: MotifRegistry, size: int) -> bytes: ...


def _run_fragmenter(frag: Node, canvas: CanvasSpec, seed: int, layer_index: int) -> FragmentSet:
    if frag.kind == "grid":
        return split_grid(canvas, frag.get("rows"), frag.get("cols"))
    if frag.kind == "brick":
        return split_brick(canvas, frag.get("rows"), frag.get("cols"), frag.get("offset"))
    if frag.kind == "stripes":
        return split_stripes(canvas, frag.get("n"), frag.get("orientation"))
    return split_voronoi(canvas, frag.get("n"), derive(seed, "voronoi", layer_index),
                         frag.get("relax"))


@dataclass
class _FragState:
    fragment: Fragment
    polygon: Polygon
    round_radius: float = 0.0

    def context(self, fs_len: int, row_count, col_count, canvas: CanvasSpec,
                seed: int) -> FieldContext:
        return FieldContext(self.fragment.id, self.fragment.row, self.fragment.col,
                            polygon_centroid(self.polygon), fs_len, row_count,
                            col_count, canvas, seed)


def _affine_about(cx: float, cy: float, a: float, b: float, c: float, d: float) -> Affine:
    # linear part (a b c d) applied about the pivot (cx, cy)
    return (a, b, c, d, cx - a * cx - c * cy, cy - b * cx - d * cy)


def _motif_transform(motif: MotifDef, polygon: Polygon, margin: float, scale: float,
                     angle_deg: float, flipped: bool) -> Affine:
    x0, y0, x1, y1 = polygon_bbox(polygon)
    bw, bh = x1 - x0, y1 - y0
    m = min(max(margin, 0.0), 0.45)
    avail_w, avail_h = bw * (1.0 - 2.0 * m), bh * (1.0 - 2.0 * m)
    gx0, gy0, gx1, gy1 = motif.bbox()
    gw, gh = max(gx1 - gx0, 1e-9), max(gy1 - gy0, 1e-9)
    s = min(avail_w / gw, avail_h / gh) * scale
    cx, cy = polygon_centroid(polygon)
    theta = math.radians(angle_deg)
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    fx = -1.0 if flipped else 1.0
    # rotate . flip . scale, then place the motif's unit-box center on the
    # fragment centroid
    a = cos_t * fx * s
    b = sin_t * fx * s
    c = -sin_t * s
    d = cos_t * s
    mx, my = (gx0 + gx1) / 2.0, (gy0 + gy1) / 2.0
    e = cx - (a * mx + c * my)
    f = cy - (b * mx + d * my)
    return (a, b, c, d, e, f)


def interpret(p: Program, seed: int, registry: Optional[MotifRegistry] = None) -> SceneGraph:
    """Lower a validated program to paint-ordered primitives."""
    diagnostics = validate(p)
    if diagnostics:
        raise SemanticError(diagnostics)
    registry = registry or builtin_registry()
    elements: list[Element] = []
    warnings: list[Diagnostic] = []
    defs_used: set[str] = set()

    for li, layer in enumerate(p.layers):
        base = f"/layer[{li}]"
        try:
            fs = _run_fragmenter(layer.fragmenter, p.canvas, seed, li)
        except SplitWeaveError as exc:
            exc.node_path = exc.node_path or f"{base}/fragmenter"
            raise
        for w in fs.warnings:
            warnings.append(Diagnostic(f"{base}/fragmenter", w))
        for mi, mnode in enumerate(layer.merges):
            try:
                fs = merge_fragments(fs, mnode.get("key"), p.canvas, seed)
            except SplitWeaveError as exc:
                exc.node_path = exc.node_path or f"{base}/merges[{mi}]"
                raise
        row_count, col_count = fs.row_count, fs.col_count
        count = len(fs.fragments)
        states = [_FragState(f, f.boundary) for f in fs.fragments]

        for oi, op in enumerate(layer.fragment_ops):
            op_path = f"{base}/fragmentOps[{oi}]"
            alive = []
            for st in states:
                ctx = st.context(count, row_count, col_count, p.canvas, seed)
                try:
                    if op.kind == "inset":
                        d = eval_number(op.get("d"), ctx)
                        st.polygon = polygon_inset(st.polygon, d)
                    elif op.kind == "scale":
                        s = eval_number(op.get("factor"), ctx)
                        cx, cy = polygon_centroid(st.polygon)
                        st.polygon = transform_polygon(
                            st.polygon, _affine_about(cx, cy, s, 0.0, 0.0, s))
                        st.round_radius *= s
                    elif op.kind == "rotate":
                        ang = math.radians(eval_number(op.get("angle"), ctx))
                        cos_t, sin_t = math.cos(ang), math.sin(ang)
                        cx, cy = polygon_centroid(st.polygon)
                        st.polygon = transform_polygon(
                            st.polygon, _affine_about(cx, cy, cos_t, sin_t, -sin_t, cos_t))
                    else:  # round
                        st.round_radius = eval_number(op.get("radius"), ctx)
                except SplitWeaveError as exc:
                    exc.node_path = exc.node_path or op_path
                    raise
                if op.kind == "inset" and (not st.polygon
                                           or polygon_area(st.polygon) < MIN_FRAGMENT_AREA):
                    warnings.append(Diagnostic(
                        op_path, f"fragment {st.fragment.id} collapsed below "
                                 f"{MIN_FRAGMENT_AREA} px^2 and was dropped"))
                    continue
                alive.append(st)
            states = alive

        for si, style in enumerate(layer.styles):
            st_path = f"{base}/style[{si}]"
            for st in states:
                ctx = st.context(count, row_count, col_count, p.canvas, seed)
                try:
                    if style.kind == "fill":
                        elements.append(FilledPath(st.polygon, eval_color(style.get("color"), ctx),
                                                   layer.opacity, st.round_radius))
                    elif style.kind == "outline":
                        elements.append(StrokedPath(st.polygon, eval_color(style.get("color"), ctx),
                                                    eval_number(style.get("width"), ctx),
                                                    layer.opacity, st.round_radius))
                    else:  # place-motif
                        motif_id = style.get("motif")
                        if motif_id not in registry:
                            raise UnknownMotif(f"unknown motif {motif_id!r}")
                        motif = registry.get(motif_id)
                        margin = eval_number(style.get("margin"), ctx)
                        scale = eval_number(style.get("scale"), ctx)
                        angle = eval_number(style.get("rotate"), ctx)
                        flipped = eval_number(style.get("flip"), ctx) >= 0.5
                        fill_field = style.get("fill")
                        fill = eval_color(fill_field, ctx) if fill_field is not None else None
                        defs_used.add(motif_id)
                        elements.append(MotifInstance(
                            motif_id, _motif_transform(motif, st.polygon, margin, scale,
                                                       angle, flipped),
                            fill, layer.opacity))
                except SplitWeaveError as exc:
                    exc.node_path = exc.node_path or st_path
                    raise
    defs = tuple(registry.get(mid) for mid in sorted(defs_used))
    return SceneGraph(p.canvas, defs, tuple(elements), tuple(warnings))


# ---------------------------------------------------------------------------
# SVG emission

_XML_HEADER = '<?xml version="1.0" encoding="UTF-8"?>'
SVG_NS = "http://www.w3.org/2000/svg"
XLINK_NS = "http://www.w3.org/1999/xlink"


def _fmt_coord(v: float, precision: int) -> str:
    s = format(v, f".{precision}f").rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _corner_arc_path(polygon: Polygon, radius: float, precision: int) -> str:
    """Path with one arc per corner; the radius is clamped per corner to half
    the shorter incident edge."""
    fmt = lambda v: _fmt_coord(v, precision)
    n = len(polygon)
    lengths = []
    for i in range(n):
        ax, ay = polygon[i]
        bx, by = polygon[(i + 1) % n]
        lengths.append(math.sqrt((bx - ax) ** 2 + (by - ay) ** 2))
    parts = []
    for i in range(n):
        px, py = polygon[i]
        lin, lout = lengths[i - 1], lengths[i]
        rc = min(radius, lin / 2.0, lout / 2.0)
        qx, qy = polygon[i - 1]
        nx, ny = polygon[(i + 1) % n]
        if rc < 10.0 ** (-precision) or lin < 1e-9 or lout < 1e-9:
            parts.append(("corner", (px, py)))
            continue
        t_in = (px - (px - qx) / lin * rc, py - (py - qy) / lin * rc)
        t_out = (px + (nx - px) / lout * rc, py + (ny - py) / lout * rc)
        cross = (px - qx) * (ny - py) - (py - qy) * (nx - px)
        sweep = 1 if cross >= 0 else 0
        parts.append(("arc", (t_in, t_out, rc, sweep)))
    cmds = []
    for i, (kind, data) in enumerate(parts):
        if kind == "corner":
            x, y = data
            cmds.append(f"{'M' if i == 0 else 'L'} {fmt(x)} {fmt(y)}")
        else:
            (ix, iy), (ox, oy), rc, sweep = data
            cmds.append(f"{'M' if i == 0 else 'L'} {fmt(ix)} {fmt(iy)}")
            cmds.append(f"A {fmt(rc)} {fmt(rc)} 0 0 {sweep} {fmt(ox)} {fmt(oy)}")
    cmds.append("Z")
    return " ".join(cmds)


def _polygon_path(polygon: Polygon, radius: float, precision: int) -> str:
    if radius > 0:
        return _corner_arc_path(polygon, radius, precision)
    fmt = lambda v: _fmt_coord(v, precision)
    cmds = [f"{'M' if i == 0 else 'L'} {fmt(x)} {fmt(y)}" for i, (x, y) in enumerate(polygon)]
    return " ".join(cmds) + " Z"


def _attrs(pairs: dict[str, str]) -> str:
    return " ".join(f'{k}="{xml.sax.saxutils.escape(v, {chr(34): "&quot;"})}"'
                    for k, v in sorted(pairs.items()))


def _motif_def_path(motif: MotifDef, precision: int) -> str:
    fmt = lambda v: _fmt_coord(v, precision)
    parts = []
    for contour in motif.contours:
        for i, (x, y) in enumerate(contour):
            parts.append(f"{'M' if i == 0 else 'L'} {fmt(x)} {fmt(y)}")
        parts.append("Z")
    return " ".join(parts)


def emit_svg(g: SceneGraph, opts: RenderOptions = RenderOptions()) -> str:
    """Serialize a scene byte-stably (same graph -> same text, always)."""
    p = opts.precision
    w, h = g.canvas.width, g.canvas.height
    lines = [_XML_HEADER]
    root = {"height": str(h), "viewBox": f"0 0 {w} {h}", "width": str(w),
            "xmlns": SVG_NS, "xmlns:xlink": XLINK_NS}
    lines.append(f"<svg {_attrs(root)}>")
    if g.defs:
        lines.append("<defs>")
        for motif in g.defs:  # already sorted by id
            attrs = {"d": _motif_def_path(motif, max(p, 4)),
                     "fill-rule": "evenodd",
                     "id": f"motif-{motif.motif_id.replace('/', '-')}"}
            lines.append(f"<path {_attrs(attrs)}/>")
        lines.append("</defs>")
    lines.append(f'<rect {_attrs({"fill": g.canvas.background.hex, "height": str(h), "width": str(w), "x": "0", "y": "0"})}/>')
    for el in g.elements:
        if isinstance(el, FilledPath):
            attrs = {"d": _polygon_path(el.polygon, el.corner_radius, p),
                     "fill": el.fill.hex}
            if el.opacity < 1.0:
                attrs["opacity"] = fmt_number(el.opacity)
            lines.append(f"<path {_attrs(attrs)}/>")
        elif isinstance(el, StrokedPath):
            attrs = {"d": _polygon_path(el.polygon, el.corner_radius, p),
                     "fill": "none", "stroke": el.stroke.hex,
                     "stroke-width": _fmt_coord(el.stroke_width, p)}
            if el.opacity < 1.0:
                attrs["opacity"] = fmt_number(el.opacity)
            lines.append(f"<path {_attrs(attrs)}/>")
        else:
            a, b, c, d, e, f = el.transform
            fmt = lambda v: _fmt_coord(v, max(p, 4))
            attrs = {"transform": f"matrix({fmt(a)} {fmt(b)} {fmt(c)} {fmt(d)} {fmt(e)} {fmt(f)})",
                     "xlink:href": f"#motif-{el.motif_id.replace('/', '-')}"}
            attrs["fill"] = el.fill.hex if el.fill is not None else "#000000"
            if el.opacity < 1.0:
                attrs["opacity"] = fmt_number(el.opacity)
            lines.append(f"<use {_attrs(attrs)}/>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render(p: Program, seed: int, opts: RenderOptions = RenderOptions(),
           registry: Optional[MotifRegistry] = None,
           rasterizer: Optional[Rasterizer] = None) -> PatternImage:
    registry = registry or builtin_registry()
    scene = interpret(p, seed, registry)
    svg_text = emit_svg(scene, opts)
    raster = None
    if opts.raster_size:
        if rasterizer is None:
            from .raster import PillowRasterizer
            rasterizer = PillowRasterizer()
        raster = rasterizer.rasterize(scene, registry, opts.raster_size)
    return PatternImage(svg_text, raster, scene.warnings)


# ---------------------------------------------------------------------------
# Program interpolation (animation frames)


def _lerp_number(a, b, t: float, as_int: bool):
    if t == 0.0:
        return a
    if t == 1.0:
        return b
    v = a + (b - a) * t
    if as_int:
        return int(math.floor(v + 0.5))  # round half-up keeps frames valid
    return quantize(v)


def _interp_value(a, b, t: float, what: str):
    if isinstance(a, FieldExpr) or isinstance(b, FieldExpr):
        if not (isinstance(a, FieldExpr) and isinstance(b, FieldExpr)):
            raise StructureMismatch(f"{what}: field vs literal")
        return _interp_field(a, b, t, what)
    if isinstance(a, Color) or isinstance(b, Color):
        if not (isinstance(a, Color) and isinstance(b, Color)):
            raise StructureMismatch(f"{what}: color vs non-color")
        return a if t == 0.0 else b if t == 1.0 else lerp_color(a, b, t)
    if isinstance(a, str) or isinstance(b, str):
        if a != b:
            raise StructureMismatch(f"{what}: names differ ({a!r} vs {b!r})")
        return a
    if a is None or b is None:
        if a is not b:
            raise StructureMismatch(f"{what}: optional parameter present on one side only")
        return None
    if isinstance(a, tuple) or isinstance(b, tuple):
        if not (isinstance(a, tuple) and isinstance(b, tuple)) or len(a) != len(b):
            raise StructureMismatch(f"{what}: value lists differ in length")
        return tuple(_interp_value(x, y, t, what) for x, y in zip(a, b))
    both_int = isinstance(a, int) and isinstance(b, int)
    return _lerp_number(a, b, t, both_int)


def _interp_field(a: FieldExpr, b: FieldExpr, t: float, what: str) -> FieldExpr:
    if a.kind != b.kind:
        raise StructureMismatch(f"{what}: field kinds differ ({a.kind} vs {b.kind})")
    params = tuple((name, _interp_value(va, b.get(name), t, f"{what}/{name}"))
                   for name, va in a.params)
    return FieldExpr(a.kind, params)


def _interp_node(a: Node, b: Node, t: float, what: str) -> Node:
    if a.kind != b.kind:
        raise StructureMismatch(f"{what}: node kinds differ ({a.kind} vs {b.kind})")
    params = tuple((name, _interp_value(va, b.get(name), t, f"{what}/{name}"))
                   for name, va in a.params)
    return Node(a.kind, params)


def interpolate_programs(p: Program, q: Program, t: float) -> Program:
    """Literal-wise interpolation between structurally identical programs.
    The structural walk always runs, so endpoint frames still raise
    StructureMismatch on incompatible inputs; leaf values short-circuit at
    t=0 / t=1, making the endpoints exact."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0,1], got {t}")
    if p.style_tag != q.style_tag:
        raise StructureMismatch(f"style tags differ ({p.style_tag} vs {q.style_tag})")
    if len(p.layers) != len(q.layers):
        raise StructureMismatch(f"layer counts differ ({len(p.layers)} vs {len(q.layers)})")
    canvas = CanvasSpec(
        _lerp_number(p.canvas.width, q.canvas.width, t, True),
        _lerp_number(p.canvas.height, q.canvas.height, t, True),
        lerp_color(p.canvas.background, q.canvas.background, t),
    )
    layers = []
    for i, (la, lb) in enumerate(zip(p.layers, q.layers)):
        what = f"/layer[{i}]"
        for slot, sa, sb in (("merges", la.merges, lb.merges),
                             ("fragmentOps", la.fragment_ops, lb.fragment_ops),
                             ("style", la.styles, lb.styles)):
            if len(sa) != len(sb):
                raise StructureMismatch(f"{what}: {slot} lengths differ")
        layers.append(Layer(
            _interp_node(la.fragmenter, lb.fragmenter, t, f"{what}/fragmenter"),
            tuple(_interp_node(a, b, t, f"{what}/merges") for a, b in zip(la.merges, lb.merges)),
            tuple(_interp_node(a, b, t, f"{what}/fragmentOps")
                  for a, b in zip(la.fragment_ops, lb.fragment_ops)),
            tuple(_interp_node(a, b, t, f"{what}/style") for a, b in zip(la.styles, lb.styles)),
            _lerp_number(la.opacity, lb.opacity, t, False),
        ))
    return Program(canvas, tuple(layers), p.style_tag)
