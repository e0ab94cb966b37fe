"""Surface syntax: parse pattern text into a Program and pretty-print the
canonical form back.

The grammar is a parenthesized keyword form:

    program   := "(" "pattern" kv* canvas layer+ ")"
    canvas    := "(" "canvas" kv* ")"
    layer     := "(" "layer" fragmenter merge* fragop* style+ kv* ")"
    fragmenter:= "(" ("grid"|"brick"|"stripes"|"voronoi") kv* ")"
    merge     := "(" "merge" kv* ")"
    fragop    := "(" ("inset"|"scale"|"rotate"|"round") kv* ")"
    style     := "(" ("fill"|"outline"|"place-motif") kv* ")"
    kv        := keyword value ;  keyword := ":" ident
    value     := number | color | ident | string | field | "(" value* ")"
    field     := "(" ("const"|"alt"|"ramp"|"checker"|"radial"|"cycle"|"jitter") kv* ")"

Comments run from ";" to end of line; whitespace is free. The reader is
tolerant (keywords in any order, omitted keywords take documented defaults);
the writer is strict (fixed keyword order, canonical numbers, LF endings).
Unknown keywords are a hard parse error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .core import (
    CANVAS_SPECS, FIELD_KINDS, FIELD_SPECS, FRAGMENTER_KINDS, LAYER_SPECS, NODE_SPECS,
    OP_KINDS, PROGRAM_SPECS, STYLE_KINDS, CanvasSpec, Color, FieldExpr, Layer, Node,
    ParamSpec, Program, fmt_number, quantize, validate,
)
from .errors import SplitWeaveError


@dataclass(frozen=True)
class SourceSpan:
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __str__(self) -> str:
        return f"{self.start_line}:{self.start_col}-{self.end_line}:{self.end_col}"


class ParseError(SplitWeaveError):
    def __init__(self, message: str, span: SourceSpan, expected: tuple[str, ...] = ()):
        super().__init__(message)
        self.span = span
        self.expected = tuple(expected)

    def __str__(self) -> str:
        base = f"{self.span}: {self.args[0]}"
        if self.expected:
            base += f" (expected {', '.join(self.expected)})"
        return base


class SemanticError(SplitWeaveError):
    def __init__(self, diagnostics):
        self.diagnostics = tuple(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


# ---------------------------------------------------------------------------
# Tokenizer

LPAREN, RPAREN, KEYWORD, NUMBER, STRING, IDENT, EOF = (
    "(", ")", "keyword", "number", "string", "ident", "end of input")

_IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_-]*")
_NUMBER_RE = re.compile(r"-?(?:\d+\.\d*|\.\d+|\d+)")


@dataclass(frozen=True)
class Token:
    type: str
    text: str
    span: SourceSpan
    value: object = None


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col, i = 1, 1, 0
    n = len(text)

    def span(l0, c0):
        return SourceSpan(l0, c0, line, col)

    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
                col += 1
            continue
        l0, c0 = line, col
        if ch in "()":
            i += 1
            col += 1
            tokens.append(Token(ch, ch, span(l0, c0)))
            continue
        if ch == ":":
            m = _IDENT_RE.match(text, i + 1)
            if not m:
                col += 1
                raise ParseError("bare ':' is not a keyword", span(l0, c0), ("keyword",))
            word = m.group(0)
            i = m.end()
            col += 1 + len(word)
            tokens.append(Token(KEYWORD, ":" + word, span(l0, c0), word))
            continue
        if ch == '"':
            j = i + 1
            out = []
            while j < n and text[j] != '"':
                if text[j] == "\\" and j + 1 < n and text[j + 1] in ('"', "\\"):
                    out.append(text[j + 1])
                    j += 2
                elif text[j] == "\n":
                    break
                else:
                    out.append(text[j])
                    j += 1
            if j >= n or text[j] != '"':
                col += j - i
                raise ParseError("unterminated string", span(l0, c0), ('"',))
            col += j + 1 - i
            tokens.append(Token(STRING, text[i:j + 1], span(l0, c0), "".join(out)))
            i = j + 1
            continue
        m = _NUMBER_RE.match(text, i)
        if m:
            word = m.group(0)
            i = m.end()
            col += len(word)
            if "." in word:
                value = quantize(float(word))
            else:
                value = int(word)
            tokens.append(Token(NUMBER, word, span(l0, c0), value))
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            word = m.group(0)
            i = m.end()
            col += len(word)
            tokens.append(Token(IDENT, word, span(l0, c0), word))
            continue
        col += 1
        raise ParseError(f"unexpected character {ch!r}", span(l0, c0))
    end = SourceSpan(line, col, line, col)
    tokens.append(Token(EOF, "", end))
    return tokens


class _Reader:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.type != EOF:
            self.pos += 1
        return tok

    def expect(self, ttype: str, what: str) -> Token:
        tok = self.next()
        if tok.type != ttype:
            raise ParseError(f"found {describe(tok)} where {what} was expected",
                             tok.span, (what,))
        return tok

    def at_form(self, heads) -> bool:
        return (self.peek().type == LPAREN and self.peek(1).type == IDENT
                and self.peek(1).value in heads)

    def open_form(self, heads, what: str) -> Token:
        tok = self.next()
        if tok.type != LPAREN:
            raise ParseError(f"found {describe(tok)} where {what} was expected",
                             tok.span, tuple(heads))
        head = self.next()
        if head.type != IDENT or head.value not in heads:
            raise ParseError(f"found {describe(head)} where {what} was expected",
                             head.span, tuple(heads))
        return head


def describe(tok: Token) -> str:
    if tok.type == EOF:
        return "end of input"
    return f"{tok.type} {tok.text!r}" if tok.type not in (LPAREN, RPAREN) else f"{tok.text!r}"


def _read_value(r: _Reader, spec: ParamSpec, owner: str):
    tok = r.peek()
    if tok.type == LPAREN:
        head = r.peek(1)
        if head.type == IDENT and head.value in FIELD_KINDS:
            return _read_field(r)
        # parenthesized list of plain values
        r.next()
        items = []
        while r.peek().type != RPAREN:
            items.append(_read_scalar(r, owner))
        r.next()
        return tuple(items)
    return _read_scalar(r, owner)


def _read_scalar(r: _Reader, owner: str):
    tok = r.next()
    if tok.type == NUMBER:
        return tok.value
    if tok.type == STRING:
        if isinstance(tok.value, str) and tok.value.startswith("#"):
            try:
                return Color.parse(tok.value)
            except ValueError as exc:
                raise ParseError(str(exc), tok.span, ("#RRGGBB color",)) from None
        return tok.value
    if tok.type == IDENT:
        return tok.value
    raise ParseError(f"found {describe(tok)} where a value was expected in {owner}",
                     tok.span, ("number", "color", "ident", "string", "field"))


# value lists carrying colors are spelled :colors on the surface
_KEYWORD_ALIASES = {"colors": "values"}


def _read_kv_block(r: _Reader, specs: tuple[ParamSpec, ...], owner: str,
                   aliases: bool = False) -> tuple[dict, dict]:
    by_name = {s.name: s for s in specs}
    given: dict[str, object] = {}
    spelled: dict[str, str] = {}
    while r.peek().type == KEYWORD:
        key = r.next()
        word = key.value
        name = _KEYWORD_ALIASES.get(word, word) if aliases else word
        if name not in by_name:
            expected = [f":{n}" for n in by_name]
            if aliases and "values" in by_name:
                expected.append(":colors")
            raise ParseError(f"unknown keyword :{word} for {owner}", key.span,
                             tuple(expected))
        if name in given:
            raise ParseError(f"duplicate keyword :{word} for {owner}", key.span)
        given[name] = _read_value(r, by_name[name], owner)
        spelled[name] = word
    return given, spelled


def _coerce_given(given: dict, specs: tuple[ParamSpec, ...], owner: str, span: SourceSpan) -> dict:
    """Type-level coercion of parsed values against the schema; range checks
    stay with validate()."""
    out = {}
    by_name = {s.name: s for s in specs}
    for name, value in given.items():
        spec = by_name[name]
        if isinstance(value, FieldExpr):
            if not spec.allow_field:
                raise ParseError(f":{name} of {owner} does not accept a field expression", span)
            out[name] = value
            continue
        if spec.is_list:
            if not isinstance(value, tuple):
                value = (value,)
            if not value:
                raise ParseError(f":{name} of {owner} requires a non-empty list", span)
            out[name] = value
            continue
        if isinstance(value, tuple):
            raise ParseError(f":{name} of {owner} does not accept a list", span)
        if spec.vtype == "int":
            if isinstance(value, float):
                raise ParseError(f":{name} of {owner} expects an integer", span)
            if not isinstance(value, int):
                raise ParseError(f":{name} of {owner} expects an integer", span)
        elif spec.vtype == "real":
            if not isinstance(value, (int, float)):
                raise ParseError(f":{name} of {owner} expects a number", span)
        elif spec.vtype == "color":
            if not isinstance(value, Color):
                raise ParseError(f":{name} of {owner} expects a color string", span)
        elif spec.vtype in ("enum", "ident"):
            if not isinstance(value, str):
                raise ParseError(f":{name} of {owner} expects a name", span)
        elif spec.vtype == "number_or_color":
            if not isinstance(value, (int, float, Color)):
                raise ParseError(f":{name} of {owner} expects a number or color", span)
        out[name] = value
    return out


def _read_field(r: _Reader) -> FieldExpr:
    head = r.open_form(FIELD_KINDS, "field expression")
    kind = head.value
    specs = FIELD_SPECS[kind]
    given, spelled = _read_kv_block(r, specs, kind, aliases=True)
    close = r.expect(RPAREN, f"')' closing {kind}")
    given = _coerce_given(given, specs, kind, head.span)
    # value lists must be homogeneous and match their spelled keyword
    for name, value in given.items():
        if isinstance(value, tuple):
            kinds = {isinstance(v, Color) for v in value}
            if len(kinds) > 1:
                raise ParseError(f":{spelled[name]} of {kind} mixes numbers and colors", head.span)
            if any(isinstance(v, str) for v in value):
                raise ParseError(f":{spelled[name]} of {kind} expects numbers or colors", head.span)
            want_colors = spelled.get(name) == "colors"
            got_colors = bool(value) and isinstance(value[0], Color)
            if want_colors != got_colors:
                raise ParseError(
                    f":{spelled[name]} of {kind} expects "
                    f"{'colors' if want_colors else 'numbers'}", head.span)
    try:
        return FieldExpr(kind, _build_params_checked(specs, given))
    except ValueError as exc:
        raise ParseError(str(exc), close.span) from None


def _build_params_checked(specs, given):
    from .core import _build_params  # shared canonicalization
    return _build_params(specs, given, "node")


def _read_node(r: _Reader, heads, what: str) -> tuple[Node, SourceSpan]:
    head = r.open_form(heads, what)
    kind = head.value
    specs = NODE_SPECS[kind]
    given, _ = _read_kv_block(r, specs, kind)
    r.expect(RPAREN, f"')' closing {kind}")
    given = _coerce_given(given, specs, kind, head.span)
    try:
        return Node(kind, _build_params_checked(specs, given)), head.span
    except ValueError as exc:
        raise ParseError(str(exc), head.span) from None


def _read_canvas(r: _Reader) -> CanvasSpec:
    head = r.open_form(("canvas",), "canvas")
    given, _ = _read_kv_block(r, CANVAS_SPECS, "canvas")
    r.expect(RPAREN, "')' closing canvas")
    given = _coerce_given(given, CANVAS_SPECS, "canvas", head.span)
    merged = {s.name: given.get(s.name, s.default) for s in CANVAS_SPECS}
    return CanvasSpec(merged["width"], merged["height"], merged["background"])


def _read_layer(r: _Reader) -> Layer:
    head = r.open_form(("layer",), "layer")
    fragmenter, _ = _read_node(r, FRAGMENTER_KINDS, "fragmenter")
    merges = []
    while r.at_form(("merge",)):
        merges.append(_read_node(r, ("merge",), "merge")[0])
    ops = []
    while r.at_form(OP_KINDS):
        ops.append(_read_node(r, OP_KINDS, "fragment op")[0])
    styles = []
    if not r.at_form(STYLE_KINDS):
        tok = r.peek()
        raise ParseError(f"found {describe(tok)} where a style was expected",
                         tok.span, STYLE_KINDS)
    while r.at_form(STYLE_KINDS):
        styles.append(_read_node(r, STYLE_KINDS, "style")[0])
    given, _ = _read_kv_block(r, LAYER_SPECS, "layer")
    r.expect(RPAREN, "')' closing layer")
    given = _coerce_given(given, LAYER_SPECS, "layer", head.span)
    opacity = given.get("opacity", 1.0)
    if not isinstance(opacity, (int, float)):
        raise ParseError("layer :opacity expects a number", head.span)
    return Layer(fragmenter, tuple(merges), tuple(ops), tuple(styles), float(opacity))


def parse(text: str) -> Program:
    """Parse pattern text; raises ParseError / SemanticError."""
    r = _Reader(tokenize(text))
    head = r.open_form(("pattern",), "pattern")
    given, _ = _read_kv_block(r, PROGRAM_SPECS, "pattern")
    given = _coerce_given(given, PROGRAM_SPECS, "pattern", head.span)
    style_tag = given.get("style", "custom")
    if not r.at_form(("canvas",)):
        tok = r.peek()
        raise ParseError(f"found {describe(tok)} where canvas was expected",
                         tok.span, ("canvas",))
    canvas = _read_canvas(r)
    layers = []
    if not r.at_form(("layer",)):
        tok = r.peek()
        raise ParseError(f"found {describe(tok)} where a layer was expected",
                         tok.span, ("layer",))
    while r.at_form(("layer",)):
        layers.append(_read_layer(r))
    r.expect(RPAREN, "')' closing pattern")
    trailing = r.next()
    if trailing.type != EOF:
        raise ParseError(f"unexpected {describe(trailing)} after program", trailing.span, (EOF,))
    program = Program(canvas, tuple(layers), style_tag)
    diagnostics = validate(program)
    if diagnostics:
        raise SemanticError(diagnostics)
    return program


# ---------------------------------------------------------------------------
# Printing


def _fmt_scalar(v) -> str:
    if isinstance(v, Color):
        return f'"{v.hex}"'
    if isinstance(v, str):
        if _IDENT_RE.fullmatch(v):
            return v
        escaped = v.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    return fmt_number(v)


def _fmt_value(v) -> str:
    if isinstance(v, FieldExpr):
        return _fmt_field(v)
    if isinstance(v, tuple):
        return "(" + " ".join(_fmt_scalar(x) for x in v) + ")"
    return _fmt_scalar(v)


def _fmt_field(f: FieldExpr) -> str:
    parts = [f.kind]
    for name, value in f.params:
        if value is None:
            continue
        word = name
        if name == "values" and isinstance(value, tuple) and value and isinstance(value[0], Color):
            word = "colors"
        parts.append(f":{word} {_fmt_value(value)}")
    return "(" + " ".join(parts) + ")"


def _fmt_node(n: Node) -> str:
    parts = [n.kind]
    for name, value in n.params:
        if value is None:
            continue
        parts.append(f":{name} {_fmt_value(value)}")
    return "(" + " ".join(parts) + ")"


def print_program(p: Program) -> str:
    """Canonical text: 2-space indent, one node per line, fixed keyword order,
    canonical decimals, uppercase hex colors, LF endings."""
    lines = [f"(pattern :style {p.style_tag}"]
    canvas = p.canvas
    lines.append(f'  (canvas :width {canvas.width} :height {canvas.height} '
                 f':background "{canvas.background.hex}")')
    for layer in p.layers:
        lines.append("  (layer")
        for n in (layer.fragmenter, *layer.merges, *layer.fragment_ops, *layer.styles):
            lines.append(f"    {_fmt_node(n)}")
        lines.append(f"    :opacity {fmt_number(layer.opacity)})")
    text = "\n".join(lines)
    # close the pattern form on the last line
    return text + ")\n"


def format_diagnostics(diagnostics) -> str:
    return "\n".join(str(d) for d in diagnostics)
