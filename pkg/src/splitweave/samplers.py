"""Seeded program samplers for the two pattern styles.

Motif tiling programs (mtp) place a repeated vector tile per cell of a grid
or brick split, varying scale / rotation / color across fragments. Split
filling programs (sfp) carve the canvas (voronoi, stripes, grid, brick),
optionally merge fragments, and paint per-fragment colors with optional inset
and outline. Every range and mixture weight lives in SamplerConfig so
experiments can override them from one JSON file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields as dc_fields, replace
from typing import Optional

from .core import Color, Layer, Node, Program, CanvasSpec, field, node, quantize
from .motifs import MotifRegistry, builtin_registry
from .palette import Palette, sample_palette
from .rng import Rng, derive

CANVAS_SIZE = 512


@dataclass(frozen=True)
class SamplerConfig:
    """All sampler ranges and mixture weights (int ranges are inclusive)."""

    mtp_grid_rows: tuple[int, int] = (2, 8)
    mtp_grid_cols: tuple[int, int] = (2, 8)
    mtp_brick_rows: tuple[int, int] = (2, 6)
    mtp_brick_cols: tuple[int, int] = (2, 6)
    mtp_brick_offset: tuple[float, float] = (0.25, 0.75)
    mtp_fragmenter_weights: tuple[tuple[str, float], ...] = (("grid", 0.65), ("brick", 0.35))
    mtp_second_layer_prob: float = 0.35
    mtp_scale_range: tuple[float, float] = (0.4, 1.2)
    mtp_rotation_range: tuple[float, float] = (0.0, 359.0)
    mtp_margin_range: tuple[float, float] = (0.05, 0.2)
    mtp_flip_prob: float = 0.2

    sfp_fragmenter_weights: tuple[tuple[str, float], ...] = (
        ("voronoi", 0.35), ("stripes", 0.2), ("grid", 0.25), ("brick", 0.2))
    sfp_voronoi_sites: tuple[int, int] = (6, 40)
    sfp_voronoi_relax: tuple[int, int] = (0, 2)
    sfp_stripes_n: tuple[int, int] = (3, 16)
    sfp_grid_rows: tuple[int, int] = (2, 8)
    sfp_grid_cols: tuple[int, int] = (2, 8)
    sfp_brick_rows: tuple[int, int] = (2, 6)
    sfp_brick_cols: tuple[int, int] = (2, 6)
    sfp_brick_offset: tuple[float, float] = (0.25, 0.75)
    sfp_merge_prob: float = 0.3
    sfp_inset_prob: float = 0.5
    sfp_inset_range: tuple[float, float] = (1.0, 8.0)
    sfp_outline_prob: float = 0.5
    sfp_outline_width: tuple[float, float] = (1.0, 4.0)

    # edit mixtures (kind label, weight); see edits.sample_edit
    mtp_edit_weights: tuple[tuple[str, float], ...] = (
        ("replace-motif", 0.3), ("replace-scale-field", 0.25),
        ("replace-rotate-field", 0.2), ("insert-motif-layer", 0.25),
        ("remove-motif-layer", 0.0))
    sfp_edit_weights: tuple[tuple[str, float], ...] = (
        ("replace-fragmenter", 0.3), ("replace-color-field", 0.25),
        ("insert-outline", 0.15), ("remove-outline", 0.15),
        ("change-merge-key", 0.15))

    @classmethod
    def from_json(cls, path: str) -> "SamplerConfig":
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        known = {f.name for f in dc_fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown sampler config keys: {sorted(unknown)}")
        coerced = {}
        for key, value in raw.items():
            if isinstance(value, list):
                if value and isinstance(value[0], list):
                    coerced[key] = tuple((str(k), float(w)) for k, w in value)
                else:
                    coerced[key] = tuple(value)
            else:
                coerced[key] = value
        return replace(cls(), **coerced)


DEFAULT_CONFIG = SamplerConfig()


def _uniform_q(rng: Rng, lo: float, hi: float) -> float:
    return quantize(rng.uniform(lo, hi))


def _sample_numeric_field(rng: Rng, lo: float, hi: float, axes: tuple[str, ...]):
    """const / alt / ramp / checker with values inside [lo, hi]."""
    kinds = ["const", "alt", "ramp"]
    if "row" in axes and "col" in axes:
        kinds.append("checker")
    kind = rng.choice(kinds)
    if kind == "const":
        return field("const", value=_uniform_q(rng, lo, hi))
    if kind == "checker":
        return field("checker", values=(_uniform_q(rng, lo, hi), _uniform_q(rng, lo, hi)))
    axis = rng.choice([a for a in ("row", "col", "id") if a in axes])
    if kind == "alt":
        count = rng.randint(2, 3)
        return field("alt", axis=axis, values=tuple(_uniform_q(rng, lo, hi) for _ in range(count)))
    return field("ramp", axis=axis, from_=_uniform_q(rng, lo, hi), to=_uniform_q(rng, lo, hi))


def _color_pair(rng: Rng, palette: Palette) -> tuple[Color, Color]:
    a = rng.choice(palette.colors)
    rest = tuple(c for c in palette.colors if c != a) or (a,)
    return a, rng.choice(rest)


def _sample_color_field(rng: Rng, palette: Palette, axes: tuple[str, ...]):
    kinds = ["const", "cycle", "ramp", "radial"]
    if "row" in axes and "col" in axes:
        kinds.append("checker")
    kind = rng.choice(kinds)
    colors = palette.colors
    if kind == "const":
        return field("const", value=rng.choice(colors))
    if kind == "checker":
        return field("checker", values=_color_pair(rng, palette))
    if kind == "radial":
        a, b = _color_pair(rng, palette)
        return field("radial", cx=_uniform_q(rng, 0.2, 0.8), cy=_uniform_q(rng, 0.2, 0.8),
                     from_=a, to=b)
    if kind == "ramp":
        axis = rng.choice([a for a in ("row", "col", "id") if a in axes])
        a, b = _color_pair(rng, palette)
        return field("ramp", axis=axis, from_=a, to=b)
    key = rng.choice([a for a in ("row", "col", "id") if a in axes])
    count = rng.randint(2, min(4, len(colors)))
    start = rng.randint(0, len(colors) - 1)
    chosen = tuple(colors[(start + i) % len(colors)] for i in range(count))
    return field("cycle", key=key, values=chosen)


def _axes_of(fragmenter: Node, merged: bool) -> tuple[str, ...]:
    if merged:
        return ("id",)
    if fragmenter.kind in ("grid", "brick"):
        return ("row", "col", "id")
    if fragmenter.kind == "stripes":
        return (("row", "id") if fragmenter.get("orientation") == "horizontal" else ("col", "id"))
    return ("id",)


def sample_mtp_fragmenter(rng: Rng, config: SamplerConfig) -> Node:
    kind = rng.weighted_choice(config.mtp_fragmenter_weights)
    if kind == "grid":
        return node("grid", rows=rng.randint(*config.mtp_grid_rows),
                    cols=rng.randint(*config.mtp_grid_cols))
    return node("brick", rows=rng.randint(*config.mtp_brick_rows),
                cols=rng.randint(*config.mtp_brick_cols),
                offset=_uniform_q(rng, *config.mtp_brick_offset))


def sample_motif_style(rng: Rng, palette: Palette, registry: MotifRegistry,
                       axes: tuple[str, ...], config: SamplerConfig) -> Node:
    motif = rng.choice(registry.ids())
    params = {
        "motif": motif,
        "scale": _sample_numeric_field(rng, *config.mtp_scale_range, axes=axes),
        "rotate": _sample_numeric_field(rng, *config.mtp_rotation_range, axes=axes),
        "fill": _sample_color_field(rng, palette, axes),
        "margin": _uniform_q(rng, *config.mtp_margin_range),
    }
    if rng.unit() < config.mtp_flip_prob:
        axis = rng.choice([a for a in ("row", "col", "id") if a in axes])
        params["flip"] = field("alt", axis=axis, values=(0, 1))
    return node("place-motif", **params)


def sample_mtp(seed: int, registry: Optional[MotifRegistry] = None,
               config: SamplerConfig = DEFAULT_CONFIG) -> Program:
    registry = registry or builtin_registry()
    rng = Rng(derive(seed, "mtp"))
    palette = sample_palette(rng.next_u64())
    background = palette.lightest()
    layer_count = 2 if rng.unit() < config.mtp_second_layer_prob else 1
    layers = []
    for _ in range(layer_count):
        frag = sample_mtp_fragmenter(rng, config)
        axes = _axes_of(frag, merged=False)
        layers.append(Layer(frag, styles=(sample_motif_style(rng, palette, registry,
                                                             axes, config),)))
    canvas = CanvasSpec(CANVAS_SIZE, CANVAS_SIZE, background)
    return Program(canvas, tuple(layers), "mtp")


def sample_sfp_fragmenter(rng: Rng, config: SamplerConfig) -> Node:
    kind = rng.weighted_choice(config.sfp_fragmenter_weights)
    if kind == "voronoi":
        return node("voronoi", n=rng.randint(*config.sfp_voronoi_sites),
                    relax=rng.randint(*config.sfp_voronoi_relax))
    if kind == "stripes":
        return node("stripes", n=rng.randint(*config.sfp_stripes_n),
                    orientation=rng.choice(("horizontal", "vertical")))
    if kind == "grid":
        return node("grid", rows=rng.randint(*config.sfp_grid_rows),
                    cols=rng.randint(*config.sfp_grid_cols))
    return node("brick", rows=rng.randint(*config.sfp_brick_rows),
                cols=rng.randint(*config.sfp_brick_cols),
                offset=_uniform_q(rng, *config.sfp_brick_offset))


def _sample_merge_key(rng: Rng, axes: tuple[str, ...]):
    if "row" in axes and "col" in axes and rng.unit() < 0.3:
        return field("checker", values=(0, 1))
    axis = rng.choice([a for a in ("row", "col", "id") if a in axes])
    count = rng.randint(2, 3)
    return field("alt", axis=axis, values=tuple(range(count)))


def _merge_is_clean(frag: Node, key, canvas: CanvasSpec) -> bool:
    """Dry-run a merge on a seed-independent fragmenter (grid/brick/stripes
    geometry never depends on the render seed, so this is decidable here)."""
    from .errors import UnsupportedTopology
    from .geometry import merge_fragments, split_brick, split_grid, split_stripes
    if frag.kind == "grid":
        fs = split_grid(canvas, frag.get("rows"), frag.get("cols"))
    elif frag.kind == "brick":
        fs = split_brick(canvas, frag.get("rows"), frag.get("cols"), frag.get("offset"))
    elif frag.kind == "stripes":
        fs = split_stripes(canvas, frag.get("n"), frag.get("orientation"))
    else:
        return False  # voronoi merges vary with the render seed; never sampled
    try:
        merge_fragments(fs, key, canvas)
        return True
    except UnsupportedTopology:
        return False


def sample_sfp(seed: int, registry: Optional[MotifRegistry] = None,
               config: SamplerConfig = DEFAULT_CONFIG) -> Program:
    rng = Rng(derive(seed, "sfp"))
    palette = sample_palette(rng.next_u64())
    background = palette.lightest()
    canvas = CanvasSpec(CANVAS_SIZE, CANVAS_SIZE, background)
    frag = sample_sfp_fragmenter(rng, config)
    merges = ()
    if frag.kind != "voronoi" and rng.unit() < config.sfp_merge_prob:
        for _ in range(8):
            key = _sample_merge_key(rng, _axes_of(frag, merged=False))
            if _merge_is_clean(frag, key, canvas):
                merges = (node("merge", key=key),)
                break
    axes = _axes_of(frag, merged=bool(merges))
    ops = ()
    if rng.unit() < config.sfp_inset_prob:
        lo, hi = config.sfp_inset_range
        if rng.unit() < 0.25:
            d = field("alt", axis=rng.choice([a for a in ("row", "col", "id") if a in axes]),
                      values=(_uniform_q(rng, lo, hi), _uniform_q(rng, lo, hi)))
        else:
            d = field("const", value=_uniform_q(rng, lo, hi))
        ops = (node("inset", d=d),)
    styles = [node("fill", color=_sample_color_field(rng, palette, axes))]
    if rng.unit() < config.sfp_outline_prob:
        styles.append(node("outline", color=palette.darkest(),
                           width=_uniform_q(rng, *config.sfp_outline_width)))
    layer = Layer(frag, merges, ops, tuple(styles))
    return Program(canvas, (layer,), "sfp")


def sample_program(style: str, seed: int, registry: Optional[MotifRegistry] = None,
                   config: SamplerConfig = DEFAULT_CONFIG) -> Program:
    if style == "mtp":
        return sample_mtp(seed, registry, config)
    if style == "sfp":
        return sample_sfp(seed, registry, config)
    raise ValueError(f"unknown style {style!r} (expected mtp or sfp)")
