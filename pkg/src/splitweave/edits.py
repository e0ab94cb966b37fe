"""Edit operators: serializable insert / remove / replace transformations.

A descriptor addresses its target by (node family, pre-order ordinal) rather
than an absolute path, so the same descriptor can apply to two structurally
different programs - which is exactly what makes a quartet's edit relation
consistent by construction. Applying a descriptor never mutates; the result
is re-validated and InvalidResult is raised if it no longer passes.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Union

from .core import (
    FRAGMENTER_KINDS, NODE_SPECS, OP_KINDS, STYLE_KINDS, Color, FieldExpr, Layer,
    Node, NodePath, Program, field, iter_nodes, node, validate, value_kind_legal,
)
from .errors import IncompatibleEdit, InvalidResult
from .motifs import MotifRegistry, builtin_registry
from .palette import sample_palette
from .rng import Rng, derive
from .samplers import (
    DEFAULT_CONFIG, SamplerConfig, _sample_color_field, _sample_numeric_field,
    _uniform_q, sample_mtp_fragmenter, sample_motif_style, sample_sfp_fragmenter,
)

# Node families addressable by selectors; "layer" targets whole layers.
FAMILIES = ("fragmenter", "merge", "inset", "scale", "rotate", "round",
            "fill", "outline", "place-motif", "layer")

# slot arity caps consulted by insert/remove compatibility
MAX_LAYERS = 4
MAX_MERGES = 2
MAX_OPS = 6

Payload = Union[Node, Layer, FieldExpr, int, float, str, Color, None]


@dataclass(frozen=True)
class NodeSelector:
    target: str  # family name
    ordinal: int  # k-th node of that family in pre-order (layer index for inserts)
    param: Optional[str] = None  # address a parameter instead of the whole node

    def __post_init__(self):
        if self.target not in FAMILIES:
            raise ValueError(f"unknown selector target {self.target!r}")
        if self.ordinal < 0:
            raise ValueError("selector ordinal must be >= 0")

    def __str__(self) -> str:
        base = f"{self.target}#{self.ordinal}"
        return f"{base}.{self.param}" if self.param else base


@dataclass(frozen=True)
class EditDescriptor:
    kind: str  # insert | remove | replace
    selector: NodeSelector
    payload: Payload = None

    def __post_init__(self):
        if self.kind not in ("insert", "remove", "replace"):
            raise ValueError(f"unknown edit kind {self.kind!r}")
        if (self.payload is None) != (self.kind == "remove"):
            raise ValueError("payload required unless kind is remove")
        if self.kind == "insert" and self.selector.param is not None:
            raise ValueError("insert cannot target a parameter")

    def __str__(self) -> str:
        return f"{self.kind} {self.selector}"


def _family_of(n: Node) -> str:
    if n.kind in FRAGMENTER_KINDS:
        return "fragmenter"
    if n.kind == "merge":
        return "merge"
    return n.kind


def _payload_family(payload: Payload) -> Optional[str]:
    if isinstance(payload, Layer):
        return "layer"
    if isinstance(payload, Node):
        return _family_of(payload)
    return None


def _matches(p: Program, sel: NodeSelector):
    """Resolve (family, ordinal) -> (path string, node), or None."""
    hits = [(path, n) for fam, path, n in iter_nodes(p) if fam == sel.target]
    if sel.ordinal < len(hits):
        return hits[sel.ordinal]
    return None


def is_compatible(p: Program, e: EditDescriptor) -> bool:
    sel = e.selector
    if e.kind == "replace":
        if sel.target == "layer":
            return sel.param is None and sel.ordinal < len(p.layers) \
                and isinstance(e.payload, Layer)
        hit = _matches(p, sel)
        if hit is None:
            return False
        _, target = hit
        if sel.param is None:
            return _payload_family(e.payload) == sel.target
        for spec in NODE_SPECS[target.kind]:
            if spec.name == sel.param:
                return value_kind_legal(spec, e.payload)
        return False
    if e.kind == "insert":
        fam = _payload_family(e.payload)
        if fam != sel.target:
            return False
        if fam == "layer":
            return len(p.layers) < MAX_LAYERS
        if fam == "fragmenter":
            return False  # exactly one fragmenter per layer, always
        if sel.ordinal >= len(p.layers):
            return False
        layer = p.layers[sel.ordinal]
        if fam == "merge":
            return len(layer.merges) < MAX_MERGES
        if fam in OP_KINDS:
            return len(layer.fragment_ops) < MAX_OPS
        # styles: at most one node of each kind per layer
        return all(st.kind != fam for st in layer.styles)
    # remove
    if sel.target == "layer":
        return sel.param is None and sel.ordinal < len(p.layers) and len(p.layers) >= 2
    if sel.target == "fragmenter":
        return False
    hit = _matches(p, sel)
    if hit is None or sel.param is not None:
        return False
    path = hit[0]
    if sel.target in STYLE_KINDS:
        layer_index = int(path.split("]")[0].split("[")[1])
        return len(p.layers[layer_index].styles) >= 2
    return True


def apply_edit(p: Program, e: EditDescriptor) -> Program:
    if not is_compatible(p, e):
        raise IncompatibleEdit(f"edit {e} is not applicable to this program")
    sel = e.selector
    if e.kind == "replace":
        if sel.target == "layer":
            layers = tuple(e.payload if i == sel.ordinal else l
                           for i, l in enumerate(p.layers))
            result = replace(p, layers=layers)
        else:
            path, _ = _matches(p, sel)
            from .core import substitute
            target_path = path if sel.param is None else f"{path}/param[{sel.param}]"
            result = substitute(p, target_path, e.payload)
    elif e.kind == "insert":
        if sel.target == "layer":
            result = replace(p, layers=p.layers + (e.payload,))
        else:
            layer = p.layers[sel.ordinal]
            if sel.target == "merge":
                new_layer = replace(layer, merges=layer.merges + (e.payload,))
            elif sel.target in OP_KINDS:
                new_layer = replace(layer, fragment_ops=layer.fragment_ops + (e.payload,))
            else:
                new_layer = replace(layer, styles=layer.styles + (e.payload,))
            result = replace(p, layers=tuple(new_layer if i == sel.ordinal else l
                                             for i, l in enumerate(p.layers)))
    else:  # remove
        if sel.target == "layer":
            result = replace(p, layers=tuple(l for i, l in enumerate(p.layers)
                                             if i != sel.ordinal))
        else:
            path, _ = _matches(p, sel)
            segs = NodePath.parse(path).segments
            layer_index = segs[0][1]
            slot, idx = segs[1][0], (segs[1][1] if len(segs[1]) > 1 else 0)
            layer = p.layers[layer_index]
            if slot == "merges":
                new_layer = replace(layer, merges=tuple(
                    m for i, m in enumerate(layer.merges) if i != idx))
            elif slot == "fragmentOps":
                new_layer = replace(layer, fragment_ops=tuple(
                    o for i, o in enumerate(layer.fragment_ops) if i != idx))
            else:
                new_layer = replace(layer, styles=tuple(
                    s for i, s in enumerate(layer.styles) if i != idx))
            result = replace(p, layers=tuple(new_layer if i == layer_index else l
                                             for i, l in enumerate(p.layers)))
    diagnostics = validate(result)
    if diagnostics:
        raise InvalidResult(f"edit {e} produced an invalid program", diagnostics)
    return result


def selector_for_inserted(p: Program, e: EditDescriptor) -> NodeSelector:
    """Selector that removes the node just inserted by e (inverse pairing)."""
    if e.kind != "insert":
        raise ValueError("inverse pairing is defined for insert edits only")
    fam = e.selector.target
    if fam == "layer":
        return NodeSelector("layer", len(p.layers))
    count = sum(1 for f, _, _ in iter_nodes(p) if f == fam)
    edited = apply_edit(p, e)
    hits = [(path, n) for f, path, n in iter_nodes(edited) if f == fam]
    for ordinal, (path, _) in enumerate(hits):
        layer_index = int(path.split("]")[0].split("[")[1])
        if layer_index == e.selector.ordinal and ordinal >= _ordinal_before(p, e, layer_index):
            return NodeSelector(fam, ordinal)
    return NodeSelector(fam, count)


def _ordinal_before(p: Program, e: EditDescriptor, layer_index: int) -> int:
    fam = e.selector.target
    count = 0
    for f, path, _ in iter_nodes(p):
        li = int(path.split("]")[0].split("[")[1])
        if li > layer_index:
            break
        if f == fam:
            count += 1
    return count


# ---------------------------------------------------------------------------
# Edit sampling (style-conditioned tables)


def sample_edit(seed: int, style: str, registry: Optional[MotifRegistry] = None,
                config: SamplerConfig = DEFAULT_CONFIG) -> EditDescriptor:
    """Sample a descriptor; payload parameters (including colors) are drawn
    here once, so both programs of a quartet receive identical new values."""
    registry = registry or builtin_registry()
    rng = Rng(derive(seed, "edit", 0 if style == "mtp" else 1))
    if style == "mtp":
        weights = [w for w in config.mtp_edit_weights if w[1] > 0]
    elif style == "sfp":
        weights = [w for w in config.sfp_edit_weights if w[1] > 0]
    else:
        raise ValueError(f"unknown style {style!r}")
    label = rng.weighted_choice(weights)
    palette = sample_palette(rng.next_u64())

    if label == "replace-fragmenter":
        return EditDescriptor("replace", NodeSelector("fragmenter", 0),
                              sample_sfp_fragmenter(rng, config))
    if label == "replace-color-field":
        # id-keyed fields stay valid under every fragmenter and after merges
        return EditDescriptor("replace", NodeSelector("fill", 0, "color"),
                              _sample_color_field(rng, palette, ("id",)))
    if label == "insert-outline":
        payload = node("outline", color=palette.darkest(),
                       width=_uniform_q(rng, *config.sfp_outline_width))
        return EditDescriptor("insert", NodeSelector("outline", 0), payload)
    if label == "remove-outline":
        return EditDescriptor("remove", NodeSelector("outline", 0))
    if label == "change-merge-key":
        count = rng.randint(2, 4)
        payload = field("alt", axis="id", values=tuple(range(count)))
        return EditDescriptor("replace", NodeSelector("merge", 0, "key"), payload)
    if label == "replace-motif":
        return EditDescriptor("replace", NodeSelector("place-motif", 0, "motif"),
                              rng.choice(registry.ids()))
    if label == "replace-scale-field":
        payload = _sample_numeric_field(rng, *config.mtp_scale_range, axes=("id",))
        return EditDescriptor("replace", NodeSelector("place-motif", 0, "scale"), payload)
    if label == "replace-rotate-field":
        payload = _sample_numeric_field(rng, *config.mtp_rotation_range, axes=("id",))
        return EditDescriptor("replace", NodeSelector("place-motif", 0, "rotate"), payload)
    if label == "insert-motif-layer":
        frag = sample_mtp_fragmenter(rng, config)
        style_node = sample_motif_style(rng, palette, registry, ("row", "col", "id"), config)
        return EditDescriptor("insert", NodeSelector("layer", 0),
                              Layer(frag, styles=(style_node,)))
    if label == "remove-motif-layer":
        return EditDescriptor("remove", NodeSelector("layer", 1))
    raise AssertionError(label)


# ---------------------------------------------------------------------------
# Serialization ("(edit ...)" surface form)


def print_edit(e: EditDescriptor) -> str:
    from .parser import _fmt_node, _fmt_value  # canonical value formatting

    parts = [f"(edit :kind {e.kind} :target {e.selector.target} :ordinal {e.selector.ordinal}"]
    if e.selector.param:
        parts.append(f":param {e.selector.param}")
    if e.payload is not None:
        if isinstance(e.payload, Layer):
            body = _print_layer_inline(e.payload)
        elif isinstance(e.payload, Node):
            body = _fmt_node(e.payload)
        else:
            body = _fmt_value(e.payload)
        parts.append(f":payload {body}")
    return " ".join(parts) + ")\n"


def _print_layer_inline(layer: Layer) -> str:
    from .core import fmt_number
    from .parser import _fmt_node

    nodes = [layer.fragmenter, *layer.merges, *layer.fragment_ops, *layer.styles]
    inner = " ".join(_fmt_node(n) for n in nodes)
    return f"(layer {inner} :opacity {fmt_number(layer.opacity)})"


def parse_edit(text: str) -> EditDescriptor:
    from .parser import (
        FIELD_KINDS, IDENT, KEYWORD, LPAREN, RPAREN, ParseError, _Reader,
        _read_field, _read_layer, _read_node, _read_scalar, describe, tokenize,
    )
    from .core import FRAGMENTER_KINDS as FK, MERGE_KINDS as MK

    r = _Reader(tokenize(text))
    head = r.open_form(("edit",), "edit")
    kind = target = None
    ordinal = 0
    param = None
    payload = None
    seen = set()
    while r.peek().type == KEYWORD:
        key = r.next()
        name = key.value
        if name in seen:
            raise ParseError(f"duplicate keyword :{name} for edit", key.span)
        seen.add(name)
        if name == "kind":
            kind = r.expect(IDENT, "edit kind").value
        elif name == "target":
            target = r.expect(IDENT, "selector target").value
        elif name == "ordinal":
            tok = r.next()
            if tok.type != "number" or not isinstance(tok.value, int):
                raise ParseError("ordinal expects an integer", tok.span)
            ordinal = tok.value
        elif name == "param":
            param = r.expect(IDENT, "parameter name").value
        elif name == "payload":
            tok = r.peek()
            if tok.type == LPAREN:
                head2 = r.peek(1)
                if head2.type == IDENT and head2.value == "layer":
                    payload = _read_layer(r)
                elif head2.type == IDENT and head2.value in FIELD_KINDS:
                    payload = _read_field(r)
                elif head2.type == IDENT and (head2.value in FK or head2.value in MK
                                              or head2.value in NODE_SPECS):
                    payload = _read_node(r, (head2.value,), head2.value)[0]
                else:
                    raise ParseError(f"found {describe(head2)} where a payload form "
                                     f"was expected", head2.span)
            else:
                payload = _read_scalar(r, "edit payload")
        else:
            raise ParseError(f"unknown keyword :{name} for edit", key.span,
                             (":kind", ":target", ":ordinal", ":param", ":payload"))
    r.expect(RPAREN, "')' closing edit")
    if kind is None or target is None:
        span = head.span
        raise ParseError("edit requires :kind and :target", span)
    try:
        return EditDescriptor(kind, NodeSelector(target, ordinal, param), payload)
    except ValueError as exc:
        raise ParseError(str(exc), head.span) from None
