"""Program AST, node schemas, addressing, validation and structural equality.

The AST is deliberately generic: a Node is (kind, ordered params) and every
node kind is described by one row of the schema tables below. The parser,
printer, validator, edit operators and interpolator are all table-driven off
these schemas, so adding a node means adding a row, not touching five modules.

Numeric literals are canonicalized to at most 6 fractional digits at
construction time, which makes float equality, printing and re-parsing agree
byte for byte.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace
from typing import Any, Iterator, Optional, Union

from .errors import KindMismatch, PathNotFound

MAX_FRACTION_DIGITS = 6


def quantize(x: float) -> float:
    """Snap a real to the canonical 6-decimal grid (idempotent)."""
    if isinstance(x, bool):
        raise TypeError("bool is not a number literal")
    if isinstance(x, int):
        return float(x)
    return float(format(x, f".{MAX_FRACTION_DIGITS}f"))


def fmt_number(v: Union[int, float]) -> str:
    """Canonical decimal text: no exponent, trailing zeros trimmed."""
    if isinstance(v, bool):
        raise TypeError("bool is not a number literal")
    if isinstance(v, int):
        return str(v)
    if v != v or v in (float("inf"), float("-inf")):
        raise ValueError(f"non-finite literal {v!r}")
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    s = format(v, f".{MAX_FRACTION_DIGITS}f").rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


@dataclass(frozen=True)
class Color:
    r: int
    g: int
    b: int

    def __post_init__(self):
        for name, v in (("r", self.r), ("g", self.g), ("b", self.b)):
            if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v <= 255:
                raise ValueError(f"color component {name}={v!r} outside 0..255")

    @property
    def hex(self) -> str:
        return f"#{self.r:02X}{self.g:02X}{self.b:02X}"

    @classmethod
    def parse(cls, text: str) -> "Color":
        m = re.fullmatch(r"#([0-9a-fA-F]{6})", text)
        if not m:
            raise ValueError(f"malformed color {text!r}, expected #RRGGBB")
        h = m.group(1)
        return cls(int(h[0:2], 16), int(h[2:4], 16), int(h[4:6], 16))

    def __str__(self) -> str:
        return self.hex


def lerp_color(a: Color, b: Color, t: float) -> Color:
    def comp(x: int, y: int) -> int:
        v = math.floor(x + (y - x) * t + 0.5)  # round half-up, 8-bit sRGB
        return max(0, min(255, v))

    return Color(comp(a.r, b.r), comp(a.g, b.g), comp(a.b, b.b))


# ---------------------------------------------------------------------------
# Schemas


@dataclass(frozen=True)
class ParamSpec:
    name: str
    vtype: str  # int | real | color | enum | ident | number_or_color
    lo: Optional[float] = None
    hi: Optional[float] = None
    hi_exclusive: bool = False
    choices: Optional[tuple[str, ...]] = None
    allow_field: bool = False
    default: Any = None
    optional: bool = False  # may be absent (stored as None)
    int_values: bool = False  # numeric values must be whole (merge keys)
    is_list: bool = False  # tuple of numbers or tuple of colors


AXES = ("row", "col", "id")

FRAGMENTER_KINDS = ("grid", "brick", "stripes", "voronoi")
MERGE_KINDS = ("merge",)
OP_KINDS = ("inset", "scale", "rotate", "round")
STYLE_KINDS = ("fill", "outline", "place-motif")
FIELD_KINDS = ("const", "alt", "ramp", "checker", "radial", "cycle", "jitter")

NODE_SPECS: dict[str, tuple[ParamSpec, ...]] = {
    "grid": (
        ParamSpec("rows", "int", 1, 64, default=2),
        ParamSpec("cols", "int", 1, 64, default=2),
    ),
    "brick": (
        ParamSpec("rows", "int", 1, 64, default=2),
        ParamSpec("cols", "int", 1, 64, default=2),
        ParamSpec("offset", "real", 0.0, 1.0, hi_exclusive=True, default=0.5),
    ),
    "stripes": (
        ParamSpec("n", "int", 1, 128, default=4),
        ParamSpec("orientation", "enum", choices=("horizontal", "vertical"), default="vertical"),
    ),
    "voronoi": (
        ParamSpec("n", "int", 2, 256, default=8),
        ParamSpec("relax", "int", 0, 5, default=0),
    ),
    # merge's default key is a FieldExpr; the row is patched in below, after
    # FieldExpr is defined.
    "merge": (),
    "inset": (ParamSpec("d", "real", 0.0, 64.0, allow_field=True, default=4.0),),
    "scale": (ParamSpec("factor", "real", 0.01, 4.0, allow_field=True, default=1.0),),
    "rotate": (ParamSpec("angle", "real", -360.0, 360.0, allow_field=True, default=0.0),),
    "round": (ParamSpec("radius", "real", 0.0, 128.0, allow_field=True, default=8.0),),
    "fill": (ParamSpec("color", "color", allow_field=True, default=Color(0, 0, 0)),),
    "outline": (
        ParamSpec("color", "color", allow_field=True, default=Color(0, 0, 0)),
        ParamSpec("width", "real", 0.1, 16.0, allow_field=True, default=1.0),
    ),
    "place-motif": (
        ParamSpec("motif", "ident", default="circle"),
        ParamSpec("scale", "real", 0.01, 4.0, allow_field=True, default=1.0),
        ParamSpec("rotate", "real", -360.0, 360.0, allow_field=True, default=0.0),
        ParamSpec("flip", "real", 0.0, 1.0, allow_field=True, default=0.0),
        ParamSpec("fill", "color", allow_field=True, optional=True),
        ParamSpec("margin", "real", 0.0, 0.45, allow_field=True, default=0.1),
    ),
}

FIELD_SPECS: dict[str, tuple[ParamSpec, ...]] = {
    "const": (ParamSpec("value", "number_or_color", default=0.0),),
    "alt": (
        ParamSpec("axis", "enum", choices=AXES, default="id"),
        ParamSpec("values", "number_or_color", is_list=True, default=(0.0, 1.0)),
    ),
    "ramp": (
        ParamSpec("axis", "enum", choices=AXES, default="id"),
        ParamSpec("from", "number_or_color", default=0.0),
        ParamSpec("to", "number_or_color", default=1.0),
    ),
    "checker": (ParamSpec("values", "number_or_color", is_list=True, default=(0.0, 1.0)),),
    "radial": (
        ParamSpec("cx", "real", 0.0, 1.0, default=0.5),
        ParamSpec("cy", "real", 0.0, 1.0, default=0.5),
        ParamSpec("from", "number_or_color", default=0.0),
        ParamSpec("to", "number_or_color", default=1.0),
    ),
    "cycle": (
        ParamSpec("key", "enum", choices=AXES, default="id"),
        ParamSpec("values", "number_or_color", is_list=True, default=(0.0, 1.0)),
    ),
    "jitter": (
        ParamSpec("salt", "int", 0, 2**31 - 1, default=0),
        ParamSpec("min", "real", default=0.0),
        ParamSpec("max", "real", default=1.0),
    ),
}

CANVAS_SPECS = (
    ParamSpec("width", "int", 16, 4096, default=256),
    ParamSpec("height", "int", 16, 4096, default=256),
    ParamSpec("background", "color", default=Color(255, 255, 255)),
)

LAYER_SPECS = (ParamSpec("opacity", "real", 0.0, 1.0, default=1.0),)
PROGRAM_SPECS = (ParamSpec("style", "enum", choices=("mtp", "sfp", "custom"), default="custom"),)

STYLE_TAGS = ("mtp", "sfp", "custom")


# ---------------------------------------------------------------------------
# AST values


@dataclass(frozen=True)
class FieldExpr:
    kind: str
    params: tuple[tuple[str, Any], ...]

    def get(self, name: str) -> Any:
        for k, v in self.params:
            if k == name:
                return v
        raise KeyError(name)

    def value_type(self) -> str:
        """'color' or 'number', judged from the literal values it carries."""
        for k, v in self.params:
            if k in ("value", "from", "to", "min", "max"):
                return "color" if isinstance(v, Color) else "number"
            if k == "values":
                return "color" if v and isinstance(v[0], Color) else "number"
        return "number"


@dataclass(frozen=True)
class Node:
    kind: str
    params: tuple[tuple[str, Any], ...]

    def get(self, name: str) -> Any:
        for k, v in self.params:
            if k == name:
                return v
        raise KeyError(name)


# The merge-key default could not reference FieldExpr before its definition;
# patch it in now (alt over id is valid under every fragmenter).
def _default_merge_key() -> "FieldExpr":
    return FieldExpr("alt", (("axis", "id"), ("values", (0, 1))))


NODE_SPECS["merge"] = (
    ParamSpec("key", "int", -1_000_000, 1_000_000, allow_field=True, int_values=True,
              default=_default_merge_key()),
)


def _canon_value(spec: ParamSpec, value: Any) -> Any:
    """Normalize a parameter value to its canonical stored form."""
    if value is None:
        if spec.optional:
            return None
        raise ValueError(f"parameter {spec.name} is required")
    if isinstance(value, FieldExpr):
        return value
    if spec.is_list:
        items = tuple(value)
        return tuple(it if isinstance(it, Color) else _canon_number(it) for it in items)
    if spec.vtype == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValueError(f"parameter {spec.name} expects an integer, got {value!r}")
        return value
    if spec.vtype == "real":
        return quantize(value)
    if spec.vtype in ("enum", "ident"):
        if not isinstance(value, str):
            raise ValueError(f"parameter {spec.name} expects a name, got {value!r}")
        return value
    if spec.vtype == "color":
        if not isinstance(value, Color):
            raise ValueError(f"parameter {spec.name} expects a color, got {value!r}")
        return value
    if spec.vtype == "number_or_color":
        if isinstance(value, Color):
            return value
        return _canon_number(value)
    raise ValueError(f"unknown vtype {spec.vtype}")


def _canon_number(v: Any):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValueError(f"expected a number, got {v!r}")
    return v if isinstance(v, int) else quantize(v)


def _build_params(specs: tuple[ParamSpec, ...], given: dict[str, Any], what: str):
    unknown = set(given) - {s.name for s in specs}
    if unknown:
        raise ValueError(f"unknown parameter(s) {sorted(unknown)} for {what}")
    out = []
    for spec in specs:
        value = given.get(spec.name, spec.default)
        out.append((spec.name, _canon_value(spec, value)))
    return tuple(out)


def node(kind: str, **params: Any) -> Node:
    if kind not in NODE_SPECS:
        raise ValueError(f"unknown node kind {kind!r}")
    return Node(kind, _build_params(NODE_SPECS[kind], params, kind))


def field(kind: str, **params: Any) -> FieldExpr:
    if kind not in FIELD_SPECS:
        raise ValueError(f"unknown field kind {kind!r}")
    # allow trailing-underscore aliases for Python keywords
    cleaned = {k.rstrip("_"): v for k, v in params.items()}
    return FieldExpr(kind, _build_params(FIELD_SPECS[kind], cleaned, kind))


@dataclass(frozen=True)
class CanvasSpec:
    width: int
    height: int
    background: Color


@dataclass(frozen=True)
class Layer:
    fragmenter: Node
    merges: tuple[Node, ...] = ()
    fragment_ops: tuple[Node, ...] = ()
    styles: tuple[Node, ...] = ()
    opacity: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "merges", tuple(self.merges))
        object.__setattr__(self, "fragment_ops", tuple(self.fragment_ops))
        object.__setattr__(self, "styles", tuple(self.styles))
        object.__setattr__(self, "opacity", quantize(self.opacity))


@dataclass(frozen=True)
class Program:
    canvas: CanvasSpec
    layers: tuple[Layer, ...]
    style_tag: str = "custom"
    version: int = 1

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))


def ast_equals(p: Program, q: Program) -> bool:
    """Structural equality; literals were canonicalized at construction so
    plain dataclass equality is exact."""
    return p == q


# ---------------------------------------------------------------------------
# Node paths

SLOT_NAMES = ("fragmenter", "merges", "fragmentOps", "style")

_SEGMENT_RE = re.compile(r"([A-Za-z]+)(?:\[([A-Za-z0-9_./#-]+)\])?$")


@dataclass(frozen=True)
class NodePath:
    """Parsed form of /layer[i]/<slot>[j]/param[name] (plus /canvas...)."""

    segments: tuple[tuple, ...]

    @classmethod
    def parse(cls, text: str) -> "NodePath":
        if not text.startswith("/") or text == "/":
            raise ValueError(f"malformed path {text!r}")
        segs = []
        for raw in text[1:].split("/"):
            m = _SEGMENT_RE.match(raw)
            if not m:
                raise ValueError(f"malformed path segment {raw!r} in {text!r}")
            name, arg = m.group(1), m.group(2)
            if name in ("layer", "merges", "fragmentOps"):
                if arg is None or not arg.isdigit():
                    raise ValueError(f"segment {name!r} requires a numeric index in {text!r}")
                segs.append((name, int(arg)))
            elif name == "style":
                if arg is not None and not arg.isdigit():
                    raise ValueError(f"style index must be numeric in {text!r}")
                segs.append((name, int(arg) if arg is not None else 0))
            elif name in ("canvas", "fragmenter"):
                if arg is not None:
                    raise ValueError(f"segment {name!r} takes no index in {text!r}")
                segs.append((name,))
            elif name == "param":
                if arg is None:
                    raise ValueError(f"param segment requires a name in {text!r}")
                segs.append((name, arg))
            else:
                raise ValueError(f"unknown path segment {name!r} in {text!r}")
        return cls(tuple(segs))

    def __str__(self) -> str:
        parts = []
        for seg in self.segments:
            if len(seg) == 1:
                parts.append(seg[0])
            else:
                parts.append(f"{seg[0]}[{seg[1]}]")
        return "/" + "/".join(parts)


def _as_path(path: Union[str, NodePath]) -> NodePath:
    return path if isinstance(path, NodePath) else NodePath.parse(path)


def path_of(*segments) -> str:
    return str(NodePath(tuple(segments)))


def _slot_list(layer: Layer, slot: str):
    if slot == "merges":
        return layer.merges
    if slot == "fragmentOps":
        return layer.fragment_ops
    if slot == "style":
        return layer.styles
    raise AssertionError(slot)


def resolve_path(p: Program, path: Union[str, NodePath]):
    """Return the addressed subtree (Layer, Node, literal or FieldExpr)."""
    np_ = _as_path(path)
    segs = list(np_.segments)
    if not segs:
        raise PathNotFound(f"empty path {np_}")
    head = segs.pop(0)
    if head[0] == "canvas":
        if not segs:
            return p.canvas
        seg = segs.pop(0)
        if seg[0] == "param" and not segs:
            for spec in CANVAS_SPECS:
                if spec.name == seg[1]:
                    return getattr(p.canvas, seg[1])
            raise PathNotFound(f"canvas has no parameter {seg[1]!r}")
        raise PathNotFound(f"cannot resolve {np_}")
    if head[0] != "layer":
        raise PathNotFound(f"cannot resolve {np_}")
    if head[1] >= len(p.layers):
        raise PathNotFound(f"layer index {head[1]} out of range (program has {len(p.layers)})")
    layer = p.layers[head[1]]
    if not segs:
        return layer
    seg = segs.pop(0)
    if seg[0] == "param":
        if segs or seg[1] != "opacity":
            raise PathNotFound(f"cannot resolve {np_}")
        return layer.opacity
    if seg[0] == "fragmenter":
        target = layer.fragmenter
    elif seg[0] in ("merges", "fragmentOps", "style"):
        lst = _slot_list(layer, seg[0])
        if seg[1] >= len(lst):
            raise PathNotFound(f"{seg[0]} index {seg[1]} out of range in {np_}")
        target = lst[seg[1]]
    else:
        raise PathNotFound(f"cannot resolve {np_}")
    if not segs:
        return target
    seg = segs.pop(0)
    if seg[0] != "param" or segs:
        raise PathNotFound(f"cannot resolve {np_}")
    try:
        return target.get(seg[1])
    except KeyError:
        raise PathNotFound(f"node {target.kind!r} has no parameter {seg[1]!r}") from None


def _family(kind: str) -> str:
    if kind in FRAGMENTER_KINDS:
        return "fragmenter"
    if kind in MERGE_KINDS:
        return "merge"
    return kind


def value_kind_legal(spec: ParamSpec, value: Any) -> bool:
    """Coarse legality of a value at a parameter slot (ranges are validate's
    job; this is the substitution/edit kind check)."""
    if value is None:
        return spec.optional
    if isinstance(value, FieldExpr):
        if not spec.allow_field:
            return False
        want = "color" if spec.vtype == "color" else "number"
        return value.value_type() == want
    if spec.vtype == "int":
        return isinstance(value, int) and not isinstance(value, bool)
    if spec.vtype == "real":
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if spec.vtype == "color":
        return isinstance(value, Color)
    if spec.vtype in ("enum", "ident"):
        return isinstance(value, str)
    return False


def _with_param(obj, name: str, value: Any):
    params = tuple((k, value if k == name else v) for k, v in obj.params)
    return type(obj)(obj.kind, params)


def substitute(p: Program, path: Union[str, NodePath], subtree: Any) -> Program:
    """Return a new Program differing from p only at path."""
    np_ = _as_path(path)
    resolve_path(p, np_)  # PathNotFound on failure
    segs = list(np_.segments)
    head = segs[0]
    if head[0] == "canvas":
        if len(segs) == 1:
            if not isinstance(subtree, CanvasSpec):
                raise KindMismatch("canvas slot requires a CanvasSpec")
            return replace(p, canvas=subtree)
        name = segs[1][1]
        spec = next(s for s in CANVAS_SPECS if s.name == name)
        if not value_kind_legal(spec, subtree) or isinstance(subtree, FieldExpr):
            raise KindMismatch(f"illegal value for canvas parameter {name!r}")
        return replace(p, canvas=replace(p.canvas, **{name: subtree}))

    li = head[1]
    layer = p.layers[li]
    if len(segs) == 1:
        if not isinstance(subtree, Layer):
            raise KindMismatch("layer slot requires a Layer")
        new_layer = subtree
    else:
        seg = segs[1]
        if seg[0] == "param":  # layer opacity
            if not isinstance(subtree, (int, float)) or isinstance(subtree, bool):
                raise KindMismatch("layer opacity requires a number")
            new_layer = replace(layer, opacity=quantize(subtree))
        elif seg[0] == "fragmenter":
            new_layer = _substitute_in_node_slot(layer, "fragmenter", None, segs[2:], subtree)
        else:
            new_layer = _substitute_in_node_slot(layer, seg[0], seg[1], segs[2:], subtree)
    layers = tuple(new_layer if i == li else l for i, l in enumerate(p.layers))
    return replace(p, layers=layers)


def _substitute_in_node_slot(layer: Layer, slot: str, index, rest, subtree) -> Layer:
    current = layer.fragmenter if slot == "fragmenter" else _slot_list(layer, slot)[index]
    if rest:  # param substitution
        name = rest[0][1]
        spec = next(s for s in NODE_SPECS[current.kind] if s.name == name)
        if not value_kind_legal(spec, subtree):
            raise KindMismatch(f"illegal value for parameter {name!r} of {current.kind!r}")
        new_node = _with_param(current, name, _canon_value(spec, subtree))
    else:
        if not isinstance(subtree, Node):
            raise KindMismatch(f"slot {slot!r} requires a node")
        want = {"fragmenter": "fragmenter", "merges": "merge"}.get(slot)
        fam = _family(subtree.kind)
        if want is not None:
            if fam != want:
                raise KindMismatch(f"node kind {subtree.kind!r} not legal in slot {slot!r}")
        elif slot == "fragmentOps":
            if subtree.kind not in OP_KINDS:
                raise KindMismatch(f"node kind {subtree.kind!r} not legal in slot {slot!r}")
        elif slot == "style":
            if subtree.kind not in STYLE_KINDS:
                raise KindMismatch(f"node kind {subtree.kind!r} not legal in slot {slot!r}")
        new_node = subtree
    if slot == "fragmenter":
        return replace(layer, fragmenter=new_node)
    lst = list(_slot_list(layer, slot))
    lst[index] = new_node
    key = {"merges": "merges", "fragmentOps": "fragment_ops", "style": "styles"}[slot]
    return replace(layer, **{key: tuple(lst)})


# ---------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class Diagnostic:
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


def axes_for_fragmenter(frag: Node) -> frozenset[str]:
    if frag.kind in ("grid", "brick"):
        return frozenset(("row", "col", "id"))
    if frag.kind == "stripes":
        axis = "row" if frag.get("orientation") == "horizontal" else "col"
        return frozenset((axis, "id"))
    return frozenset(("id",))  # voronoi


def field_axis_needs(f: FieldExpr) -> frozenset[str]:
    if f.kind in ("alt", "ramp"):
        axis = f.get("axis")
        return frozenset((axis,)) if axis != "id" else frozenset()
    if f.kind == "cycle":
        key = f.get("key")
        return frozenset((key,)) if key != "id" else frozenset()
    if f.kind == "checker":
        return frozenset(("row", "col"))
    return frozenset()


def field_range(f: FieldExpr):
    """Conservative bounds on eval_field outputs.

    Numeric fields return (lo, hi); color fields return the tuple of
    generator colors (endpoints / value list)."""
    if f.kind == "const":
        v = f.get("value")
        return (v,) if isinstance(v, Color) else (v, v)
    if f.kind in ("alt", "cycle", "checker"):
        values = f.get("values")
        if values and isinstance(values[0], Color):
            return tuple(values)
        return (min(values), max(values))
    if f.kind in ("ramp", "radial"):
        a, b = f.get("from"), f.get("to")
        if isinstance(a, Color):
            return (a, b)
        return (min(a, b), max(a, b))
    if f.kind == "jitter":
        return (f.get("min"), f.get("max"))
    raise AssertionError(f.kind)


def _check_literal(spec: ParamSpec, value, path: str, out: list):
    if spec.vtype == "int":
        if not (isinstance(value, int) and not isinstance(value, bool)):
            out.append(Diagnostic(path, f"{spec.name} must be an integer"))
            return
    elif spec.vtype == "real":
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            out.append(Diagnostic(path, f"{spec.name} must be a number"))
            return
        if not math.isfinite(value):
            out.append(Diagnostic(path, f"{spec.name} must be finite"))
            return
    elif spec.vtype == "enum":
        if value not in (spec.choices or ()):
            out.append(Diagnostic(path, f"{spec.name} must be one of {spec.choices}"))
        return
    elif spec.vtype == "ident":
        if not isinstance(value, str) or not value:
            out.append(Diagnostic(path, f"{spec.name} must be a non-empty name"))
        return
    elif spec.vtype == "color":
        if not isinstance(value, Color):
            out.append(Diagnostic(path, f"{spec.name} must be a color"))
        return
    if spec.lo is not None and value < spec.lo:
        out.append(Diagnostic(path, f"{spec.name}={fmt_number(value)} below minimum {fmt_number(spec.lo)}"))
    if spec.hi is not None:
        if spec.hi_exclusive and value >= spec.hi:
            out.append(Diagnostic(path, f"{spec.name}={fmt_number(value)} must be < {fmt_number(spec.hi)}"))
        elif not spec.hi_exclusive and value > spec.hi:
            out.append(Diagnostic(path, f"{spec.name}={fmt_number(value)} above maximum {fmt_number(spec.hi)}"))


def _check_field(spec: ParamSpec, f: FieldExpr, axes: frozenset[str], path: str, out: list):
    if not spec.allow_field:
        out.append(Diagnostic(path, f"{spec.name} does not accept field expressions"))
        return
    # internal shape of the field
    if f.kind in ("alt", "cycle", "checker"):
        values = f.get("values")
        if len(values) < 1:
            out.append(Diagnostic(path, f"{f.kind} requires at least one value"))
            return
        if f.kind == "checker" and len(values) != 2:
            out.append(Diagnostic(path, "checker requires exactly 2 values"))
            return
        kinds = {type(v) is Color for v in values}
        if len(kinds) > 1:
            out.append(Diagnostic(path, f"{f.kind} values must be all-numeric or all-color"))
            return
        for v in values:
            if not isinstance(v, Color) and not math.isfinite(v):
                out.append(Diagnostic(path, f"{f.kind} values must be finite"))
                return
    if f.kind in ("ramp", "radial"):
        a, b = f.get("from"), f.get("to")
        if isinstance(a, Color) != isinstance(b, Color):
            out.append(Diagnostic(path, f"{f.kind} endpoints must both be numbers or both colors"))
            return
        for v in (a, b):
            if not isinstance(v, Color) and not math.isfinite(v):
                out.append(Diagnostic(path, f"{f.kind} endpoints must be finite"))
                return
    if f.kind == "radial":
        for c in ("cx", "cy"):
            v = f.get(c)
            if not 0.0 <= v <= 1.0:
                out.append(Diagnostic(path, f"radial {c} must lie in the unit canvas [0,1]"))
    if f.kind == "jitter":
        if f.get("min") > f.get("max"):
            out.append(Diagnostic(path, "jitter min must not exceed max"))
            return
        if not (math.isfinite(f.get("min")) and math.isfinite(f.get("max"))):
            out.append(Diagnostic(path, "jitter bounds must be finite"))
            return
    # value type vs slot type
    want = "color" if spec.vtype == "color" else "number"
    if f.value_type() != want:
        out.append(Diagnostic(path, f"{f.value_type()} field feeds a {want} slot"))
        return
    # axis availability
    missing = field_axis_needs(f) - axes
    if missing:
        out.append(Diagnostic(path, f"field references unavailable axis {sorted(missing)[0]!r}"))
        return
    # numeric envelope must stay inside the slot range
    if want == "number" and spec.lo is not None:
        lo, hi = field_range(f)
        if lo < spec.lo or (spec.hi is not None and (hi >= spec.hi if spec.hi_exclusive else hi > spec.hi)):
            out.append(Diagnostic(
                path, f"field range [{fmt_number(lo)}, {fmt_number(hi)}] exceeds "
                      f"{spec.name} bounds [{fmt_number(spec.lo)}, {fmt_number(spec.hi)}]"))
    if spec.int_values and want == "number":
        if f.kind in ("alt", "cycle", "checker"):
            if any(float(v) != int(v) for v in f.get("values")):
                out.append(Diagnostic(path, f"{spec.name} values must be integers"))
        elif f.kind == "const":
            if float(f.get("value")) != int(f.get("value")):
                out.append(Diagnostic(path, f"{spec.name} must be integer-valued"))
        else:
            out.append(Diagnostic(path, f"{spec.name} requires an integer-valued field "
                                        f"(const/alt/checker/cycle), got {f.kind}"))


def _check_node(n: Node, axes: frozenset[str], base: str, out: list):
    for spec in NODE_SPECS[n.kind]:
        value = n.get(spec.name)
        path = f"{base}/param[{spec.name}]"
        if value is None:
            if not spec.optional:
                out.append(Diagnostic(path, f"{spec.name} is required"))
            continue
        if isinstance(value, FieldExpr):
            _check_field(spec, value, axes, path, out)
        else:
            _check_literal(spec, value, path, out)
            if spec.int_values and isinstance(value, float) and value != int(value):
                out.append(Diagnostic(path, f"{spec.name} must be integer-valued"))


def validate(p: Program) -> list[Diagnostic]:
    """Full semantic validation; an empty list means the program is valid."""
    out: list[Diagnostic] = []
    if p.version != 1:
        out.append(Diagnostic("/", f"unsupported program version {p.version}"))
    if p.style_tag not in STYLE_TAGS:
        out.append(Diagnostic("/", f"style must be one of {STYLE_TAGS}"))
    for spec in CANVAS_SPECS:
        _check_literal(spec, getattr(p.canvas, spec.name), f"/canvas/param[{spec.name}]", out)
    if len(p.layers) < 1:
        out.append(Diagnostic("/", "program requires at least one layer"))
    for i, layer in enumerate(p.layers):
        lb = f"/layer[{i}]"
        if not 0.0 <= layer.opacity <= 1.0:
            out.append(Diagnostic(f"{lb}/param[opacity]", "opacity must lie in [0,1]"))
        frag = layer.fragmenter
        if frag.kind not in FRAGMENTER_KINDS:
            out.append(Diagnostic(f"{lb}/fragmenter", f"{frag.kind!r} is not a fragmenter"))
            continue
        base_axes = axes_for_fragmenter(frag)
        _check_node(frag, base_axes, f"{lb}/fragmenter", out)
        for j, m in enumerate(layer.merges):
            if m.kind != "merge":
                out.append(Diagnostic(f"{lb}/merges[{j}]", f"{m.kind!r} is not a merge"))
                continue
            axes = base_axes if j == 0 else frozenset(("id",))
            _check_node(m, axes, f"{lb}/merges[{j}]", out)
        axes = base_axes if not layer.merges else frozenset(("id",))
        for j, op in enumerate(layer.fragment_ops):
            if op.kind not in OP_KINDS:
                out.append(Diagnostic(f"{lb}/fragmentOps[{j}]", f"{op.kind!r} is not a fragment op"))
                continue
            _check_node(op, axes, f"{lb}/fragmentOps[{j}]", out)
        if not layer.styles:
            out.append(Diagnostic(lb, "layer requires at least one style"))
        seen_styles: set[str] = set()
        for j, st in enumerate(layer.styles):
            if st.kind not in STYLE_KINDS:
                out.append(Diagnostic(f"{lb}/style[{j}]", f"{st.kind!r} is not a style"))
                continue
            if st.kind in seen_styles:
                out.append(Diagnostic(f"{lb}/style[{j}]", f"duplicate {st.kind} style in layer"))
            seen_styles.add(st.kind)
            _check_node(st, axes, f"{lb}/style[{j}]", out)
    return out


# ---------------------------------------------------------------------------
# Pre-order node enumeration (shared by the edit operators)


def iter_nodes(p: Program) -> Iterator[tuple[str, str, Node]]:
    """Yield (family, path, node) in pre-order."""
    for i, layer in enumerate(p.layers):
        yield "fragmenter", f"/layer[{i}]/fragmenter", layer.fragmenter
        for j, m in enumerate(layer.merges):
            yield "merge", f"/layer[{i}]/merges[{j}]", m
        for j, op in enumerate(layer.fragment_ops):
            yield op.kind, f"/layer[{i}]/fragmentOps[{j}]", op
        for j, st in enumerate(layer.styles):
            yield st.kind, f"/layer[{i}]/style[{j}]", st


def nominal_fragment_count(p: Program) -> int:
    """Static pre-merge cell count summed over layers."""
    total = 0
    for layer in p.layers:
        f = layer.fragmenter
        if f.kind == "grid":
            total += f.get("rows") * f.get("cols")
        elif f.kind == "brick":
            rows, cols = f.get("rows"), f.get("cols")
            extra = rows // 2 if f.get("offset") > 0 else 0
            total += rows * cols + extra
        elif f.kind == "stripes":
            total += f.get("n")
        else:
            total += f.get("n")
    return total
