import pytest

from splitweave.core import (
    Color, Layer, Program, ast_equals, field, fmt_number, node, quantize,
    resolve_path, substitute, validate,
)
from splitweave.errors import KindMismatch, PathNotFound
from splitweave.samplers import sample_program


def test_color_roundtrip():
    for text in ("#000000", "#FFFFFF", "#1A2B3C", "#aabbcc"):
        c = Color.parse(text)
        assert c.hex == text.upper()
        assert Color.parse(c.hex) == c


def test_color_rejects_malformed():
    for bad in ("", "123456", "#12345", "#GGHHII", "#1234567"):
        with pytest.raises(ValueError):
            Color.parse(bad)


def test_number_canonicalization():
    assert fmt_number(1.0) == "1"
    assert fmt_number(0.5) == "0.5"
    assert fmt_number(quantize(1 / 3)) == "0.333333"
    assert fmt_number(-0.0) == "0"
    assert quantize(quantize(1 / 3)) == quantize(1 / 3)
    # quantized values survive a text round trip exactly
    v = quantize(12.3456789)
    assert float(fmt_number(v)) == v


def test_validate_minimal_empty(minimal_program):
    assert validate(minimal_program) == []


def test_validate_grid_rows_zero(minimal_program):
    bad = substitute(minimal_program, "/layer[0]/fragmenter/param[rows]", 0)
    diagnostics = validate(bad)
    assert len(diagnostics) == 1
    assert diagnostics[0].path == "/layer[0]/fragmenter/param[rows]"


# fragmenter kind x axis compatibility: the full table, derived by
# enumeration. checker needs row+col; alt/ramp/cycle need their own axis.
AXIS_TABLE = {
    ("grid", "row"): True, ("grid", "col"): True, ("grid", "id"): True,
    ("brick", "row"): True, ("brick", "col"): True, ("brick", "id"): True,
    ("stripes-horizontal", "row"): True, ("stripes-horizontal", "col"): False,
    ("stripes-horizontal", "id"): True,
    ("stripes-vertical", "row"): False, ("stripes-vertical", "col"): True,
    ("stripes-vertical", "id"): True,
    ("voronoi", "row"): False, ("voronoi", "col"): False, ("voronoi", "id"): True,
}


def _fragmenter(kind_label):
    if kind_label == "stripes-horizontal":
        return node("stripes", n=4, orientation="horizontal")
    if kind_label == "stripes-vertical":
        return node("stripes", n=4, orientation="vertical")
    if kind_label == "voronoi":
        return node("voronoi", n=8)
    return node(kind_label, rows=2, cols=2)


@pytest.mark.parametrize("kind_label,axis", sorted(AXIS_TABLE))
def test_axis_compatibility_table(kind_label, axis, minimal_program):
    frag = _fragmenter(kind_label)
    rotate_field = field("alt", axis=axis, values=(0.0, 90.0))
    layer = Layer(frag, fragment_ops=(node("rotate", angle=rotate_field),),
                  styles=(node("fill", color=Color(0, 0, 0)),))
    program = Program(minimal_program.canvas, (layer,))
    diagnostics = validate(program)
    if AXIS_TABLE[(kind_label, axis)]:
        assert diagnostics == []
    else:
        assert len(diagnostics) == 1
        assert diagnostics[0].path == "/layer[0]/fragmentOps[0]/param[angle]"
        assert axis in diagnostics[0].message


def test_voronoi_col_axis_flagged(minimal_program):
    # the spec's own example cell of the table above
    layer = Layer(node("voronoi", n=8),
                  fragment_ops=(node("rotate", angle=field("alt", axis="col",
                                                           values=(0.0, 45.0))),),
                  styles=(node("fill", color=Color(0, 0, 0)),))
    diagnostics = validate(Program(minimal_program.canvas, (layer,)))
    assert len(diagnostics) == 1 and "col" in diagnostics[0].message


def test_checker_after_merge_flagged(minimal_program):
    layer = Layer(node("grid", rows=2, cols=2),
                  merges=(node("merge", key=field("alt", axis="row", values=(0, 1))),),
                  styles=(node("fill", color=field("checker", values=(Color(0, 0, 0),
                                                                      Color(9, 9, 9)))),))
    diagnostics = validate(Program(minimal_program.canvas, (layer,)))
    assert any("row" in d.message or "col" in d.message for d in diagnostics)


def test_field_range_exceeds_slot_bounds(minimal_program):
    layer = Layer(node("grid", rows=2, cols=2),
                  fragment_ops=(node("scale", factor=field("alt", values=(0.5, 9.0))),),
                  styles=(node("fill", color=Color(0, 0, 0)),))
    diagnostics = validate(Program(minimal_program.canvas, (layer,)))
    assert len(diagnostics) == 1
    assert "bounds" in diagnostics[0].message


def test_validate_is_pure(minimal_program):
    bad = substitute(minimal_program, "/layer[0]/fragmenter/param[rows]", 0)
    assert validate(bad) == validate(bad)


def test_resolve_fragmenter(minimal_program):
    got = resolve_path(minimal_program, "/layer[0]/fragmenter")
    assert got.kind == "grid" and got.get("rows") == 2


def test_resolve_missing_layer(minimal_program):
    with pytest.raises(PathNotFound):
        resolve_path(minimal_program, "/layer[1]/fragmenter")


def test_resolve_style_color_field(minimal_program):
    got = resolve_path(minimal_program, "/layer[0]/style/param[color]")
    assert got.kind == "cycle"
    assert resolve_path(minimal_program, "/layer[0]/style[0]/param[color]") == got


def test_substitute_fragmenter(minimal_program):
    new = substitute(minimal_program, "/layer[0]/fragmenter", node("grid", rows=3, cols=3))
    assert resolve_path(new, "/layer[0]/fragmenter/param[rows]") == 3
    # the original is untouched
    assert resolve_path(minimal_program, "/layer[0]/fragmenter/param[rows]") == 2
    # everything else identical
    assert new.canvas == minimal_program.canvas
    assert new.layers[0].styles == minimal_program.layers[0].styles


def test_substitute_missing_path(minimal_program):
    with pytest.raises(PathNotFound):
        substitute(minimal_program, "/layer[0]/fragmentOps[0]", node("inset", d=2.0))


def test_substitute_kind_mismatch(minimal_program):
    with pytest.raises(KindMismatch):
        substitute(minimal_program, "/layer[0]/fragmenter",
                   node("fill", color=Color(0, 0, 0)))


def test_substitute_inverse_property():
    for seed in range(30):
        program = sample_program("sfp" if seed % 2 else "mtp", seed)
        paths = ["/layer[0]/fragmenter"]
        if program.layers[0].styles:
            paths.append("/layer[0]/style[0]")
        for path in paths:
            original = resolve_path(program, path)
            replaced = substitute(program, path, node("grid", rows=5, cols=7)
                                  if path.endswith("fragmenter")
                                  else node("fill", color=Color(1, 2, 3)))
            restored = substitute(replaced, path, original)
            assert ast_equals(restored, program)


def test_ast_equals_reflexive_and_sensitive(minimal_program):
    assert ast_equals(minimal_program, minimal_program)
    same = substitute(minimal_program, "/layer[0]/fragmenter",
                      resolve_path(minimal_program, "/layer[0]/fragmenter"))
    assert ast_equals(minimal_program, same)
    changed = substitute(minimal_program, "/layer[0]/style[0]",
                         node("fill", color=Color(1, 1, 1)))
    assert not ast_equals(minimal_program, changed)


def test_ast_equals_equivalence_on_samples():
    a = sample_program("mtp", 5)
    b = sample_program("mtp", 5)
    c = sample_program("mtp", 6)
    assert ast_equals(a, b) and ast_equals(b, a)  # symmetric
    assert not ast_equals(a, c)
