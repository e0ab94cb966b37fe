"""Fragment-ID-aware parameter maps: evaluation of field expressions.

A field turns one parameter slot into a per-fragment function of the
fragment's id / row / col / centroid. Evaluation is pure; jitter noise is
keyed by (program seed, salt, fragment id) so layer order never changes it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

from .core import CanvasSpec, Color, FieldExpr, lerp_color
from .errors import AxisUnavailable, FieldTypeError
from .rng import unit_from_key

# Unit-square half-diagonal: distance from the center to a corner. Radial
# fields divide by it so ramp endpoints are reachable at canvas corners.
HALF_DIAGONAL = 0.7071


@dataclass(frozen=True)
class FieldContext:
    fragment_id: int
    row: Optional[int]
    col: Optional[int]
    centroid: tuple[float, float]
    fragment_count: int
    row_count: Optional[int]
    col_count: Optional[int]
    canvas: CanvasSpec
    program_seed: int = 0


def _axis_index(axis: str, ctx: FieldContext) -> int:
    if axis == "id":
        return ctx.fragment_id
    value = ctx.row if axis == "row" else ctx.col
    if value is None:
        raise AxisUnavailable(f"fragment carries no {axis} coordinate")
    return value


def _axis_count(axis: str, ctx: FieldContext) -> int:
    if axis == "id":
        return ctx.fragment_count
    count = ctx.row_count if axis == "row" else ctx.col_count
    if count is None:
        raise AxisUnavailable(f"fragment set carries no {axis} extent")
    return count


def _lerp(a, b, t: float):
    if isinstance(a, Color):
        return lerp_color(a, b, t)
    return a + (b - a) * t


def eval_field(f: Union[FieldExpr, int, float, Color], ctx: FieldContext):
    """Evaluate a field (or pass a literal through) for one fragment."""
    if not isinstance(f, FieldExpr):
        return f
    kind = f.kind
    if kind == "const":
        return f.get("value")
    if kind == "alt":
        values = f.get("values")
        return values[_axis_index(f.get("axis"), ctx) % len(values)]
    if kind == "ramp":
        axis = f.get("axis")
        count = _axis_count(axis, ctx)
        t = 0.0 if count <= 1 else _axis_index(axis, ctx) / (count - 1)
        return _lerp(f.get("from"), f.get("to"), t)
    if kind == "checker":
        if ctx.row is None or ctx.col is None:
            raise AxisUnavailable("checker requires both row and col")
        values = f.get("values")
        return values[(ctx.row + ctx.col) % 2]
    if kind == "radial":
        nx = ctx.centroid[0] / ctx.canvas.width
        ny = ctx.centroid[1] / ctx.canvas.height
        dx, dy = nx - f.get("cx"), ny - f.get("cy")
        t = min(1.0, max(0.0, math.sqrt(dx * dx + dy * dy) / HALF_DIAGONAL))
        return _lerp(f.get("from"), f.get("to"), t)
    if kind == "cycle":
        values = f.get("values")
        return values[_axis_index(f.get("key"), ctx) % len(values)]
    if kind == "jitter":
        lo, hi = f.get("min"), f.get("max")
        u = unit_from_key(ctx.program_seed, "jitter", f.get("salt"), ctx.fragment_id)
        return lo + (hi - lo) * u
    raise AssertionError(kind)


def eval_number(f, ctx: FieldContext) -> float:
    v = eval_field(f, ctx)
    if isinstance(v, Color):
        raise FieldTypeError("color field feeds a numeric slot")
    return float(v)


def eval_color(f, ctx: FieldContext) -> Color:
    v = eval_field(f, ctx)
    if not isinstance(v, Color):
        raise FieldTypeError("numeric field feeds a color slot")
    return v


def eval_int(f, ctx: FieldContext) -> int:
    v = eval_field(f, ctx)
    if isinstance(v, Color):
        raise FieldTypeError("color field feeds an integer slot")
    if isinstance(v, float):
        if v != int(v):
            raise FieldTypeError(f"expected an integer value, got {v}")
        return int(v)
    return v
