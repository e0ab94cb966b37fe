import json

import pytest

from splitweave.cli import main
from splitweave.core import ast_equals
from splitweave.parser import parse


def run(argv):
    return main([str(a) for a in argv])


@pytest.fixture
def program_file(tmp_path, minimal_text):
    path = tmp_path / "prog.sw"
    path.write_text(minimal_text)
    return path


@pytest.fixture
def edit_file(tmp_path):
    path = tmp_path / "edit.sw"
    path.write_text("(edit :kind replace :target fragmenter :ordinal 0 "
                    ":payload (grid :rows 3 :cols 3))\n")
    return path


def test_render_ok(tmp_path, program_file, capsys):
    out = tmp_path / "out.svg"
    assert run(["render", program_file, "--seed", 0, "--out", out]) == 0
    assert out.read_text().startswith("<?xml")
    assert str(out) in capsys.readouterr().out


def test_render_broken_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.sw"
    bad.write_text("(pattern (canvas")
    assert run(["render", bad, "--out", tmp_path / "x.svg"]) == 2
    err = capsys.readouterr().err
    assert "parse error" in err and ":" in err  # span printed


def test_render_seed_deterministic(tmp_path):
    prog = tmp_path / "v.sw"
    prog.write_text('(pattern (canvas) (layer (voronoi :n 8) '
                    '(fill :color (cycle :key id :colors ("#112233" "#445566")))))')
    out1, out2 = tmp_path / "a.svg", tmp_path / "b.svg"
    assert run(["render", prog, "--seed", 1, "--out", out1]) == 0
    assert run(["render", prog, "--seed", 1, "--out", out2]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_render_png(tmp_path, program_file):
    out = tmp_path / "p.svg"
    assert run(["render", program_file, "--out", out, "--png", 64]) == 0
    assert (tmp_path / "p.png").stat().st_size > 0


def test_sample_deterministic(tmp_path):
    a, b = tmp_path / "a.sw", tmp_path / "b.sw"
    assert run(["sample", "--style", "mtp", "--seed", 7, "--out", a]) == 0
    assert run(["sample", "--style", "mtp", "--seed", 7, "--out", b]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_sample_reparses(tmp_path):
    out = tmp_path / "s.sw"
    assert run(["sample", "--style", "sfp", "--seed", 3, "--out", out]) == 0
    program = parse(out.read_text())
    assert program.style_tag == "sfp"


def test_sample_unknown_style_exits_1(tmp_path):
    assert run(["sample", "--style", "xyz", "--seed", 1, "--out", tmp_path / "x.sw"]) == 1


def test_edit_ok_and_idempotent_output(tmp_path, program_file, edit_file):
    out = tmp_path / "edited.sw"
    assert run(["edit", program_file, "--edit", edit_file, "--out", out]) == 0
    first = out.read_bytes()
    assert run(["edit", program_file, "--edit", edit_file, "--out", out]) == 0
    assert out.read_bytes() == first
    assert parse(out.read_text()).layers[0].fragmenter.get("rows") == 3


def test_edit_incompatible_exits_3(tmp_path, program_file, capsys):
    edit = tmp_path / "rm.sw"
    edit.write_text("(edit :kind remove :target outline :ordinal 0)\n")
    assert run(["edit", program_file, "--edit", edit, "--out", tmp_path / "o.sw"]) == 3
    assert "outline#0" in capsys.readouterr().err


def test_dataset_deterministic_and_jobs(tmp_path, capsys):
    for name, jobs in (("d1", 1), ("d2", 1), ("d3", 2)):
        assert run(["dataset", "--count", 4, "--seed", 42, "--out", tmp_path / name,
                    "--jobs", jobs]) == 0
    m1 = (tmp_path / "d1" / "manifest.jsonl").read_bytes()
    assert (tmp_path / "d2" / "manifest.jsonl").read_bytes() == m1
    assert (tmp_path / "d3" / "manifest.jsonl").read_bytes() == m1
    out = capsys.readouterr().out
    assert "manifest.jsonl" in out


def test_dataset_then_audit(tmp_path):
    assert run(["dataset", "--count", 4, "--seed", 1, "--out", tmp_path / "ds"]) == 0
    assert run(["audit", tmp_path / "ds", "--deep"]) == 0


def test_quartet_command_and_audit(tmp_path, program_file, edit_file):
    b = tmp_path / "b.sw"
    assert run(["sample", "--style", "mtp", "--seed", 5, "--out", b]) == 0
    a = tmp_path / "a.sw"
    assert run(["sample", "--style", "mtp", "--seed", 6, "--out", a]) == 0
    edit = tmp_path / "motif-edit.sw"
    edit.write_text("(edit :kind replace :target place-motif :ordinal 0 "
                    ":param motif :payload cross)\n")
    qdir = tmp_path / "q"
    assert run(["quartet", a, b, "--edit", edit, "--seed", 11, "--out", qdir]) == 0
    assert run(["audit", qdir, "--deep"]) == 0


def test_animate_endpoints(tmp_path, program_file):
    target = tmp_path / "target.sw"
    text = program_file.read_text().replace(":rows 2", ":rows 4")
    target.write_text(text)
    out = tmp_path / "frames"
    assert run(["animate", program_file, target, "--frames", 2, "--out", out]) == 0
    f0 = parse((out / "frame_0000.sw").read_text())
    f1 = parse((out / "frame_0001.sw").read_text())
    assert ast_equals(f0, parse(program_file.read_text()))
    assert ast_equals(f1, parse(target.read_text()))


def test_animate_midpoint(tmp_path, program_file):
    target = tmp_path / "target.sw"
    target.write_text(program_file.read_text().replace(":rows 2", ":rows 4"))
    out = tmp_path / "frames5"
    assert run(["animate", program_file, target, "--frames", 5, "--out", out]) == 0
    mid = parse((out / "frame_0002.sw").read_text())
    assert mid.layers[0].fragmenter.get("rows") == 3


def test_animate_mismatch_exits_3(tmp_path, program_file):
    other = tmp_path / "other.sw"
    other.write_text('(pattern (canvas) (layer (voronoi :n 5) '
                     '(fill :color (const :value "#000000"))))')
    assert run(["animate", program_file, other, "--frames", 3,
                "--out", tmp_path / "x"]) == 3


def test_validate_and_fmt(tmp_path, program_file, capsys):
    assert run(["validate", program_file]) == 0
    bad = tmp_path / "bad.sw"
    bad.write_text(program_file.read_text().replace(":rows 2", ":rows 0"))
    assert run(["validate", bad]) == 2
    assert "/layer[0]/fragmenter/param[rows]" in capsys.readouterr().err
    # fmt: idempotent rewrite
    assert run(["fmt", program_file]) == 0
    once = program_file.read_bytes()
    assert run(["fmt", program_file]) == 0
    assert program_file.read_bytes() == once


def test_motifs_listing(capsys):
    assert run(["motifs"]) == 0
    out = capsys.readouterr().out
    assert "circle\tbuiltin" in out


def test_motif_dir_env(tmp_path, monkeypatch, capsys):
    (tmp_path / "zig.svg").write_text(
        '<svg xmlns="http://www.w3.org/2000/svg"><path d="M0 0 L4 2 L0 4 Z"/></svg>')
    monkeypatch.setenv("SPLITWEAVE_MOTIF_DIR", str(tmp_path))
    assert run(["motifs"]) == 0
    assert "user/zig\tuserFile" in capsys.readouterr().out


def test_report_outputs(tmp_path, capsys):
    assert run(["dataset", "--count", 4, "--seed", 9, "--out", tmp_path / "ds"]) == 0
    assert run(["report", "--dataset", tmp_path / "ds", "--out", tmp_path / "rep"]) == 0
    out = capsys.readouterr().out
    assert (tmp_path / "rep" / "summary.csv").is_file()
    for figure in ("styles.png", "edit_kinds.png", "file_sizes.png"):
        assert (tmp_path / "rep" / figure).stat().st_size > 0
    rows = (tmp_path / "rep" / "summary.csv").read_text().splitlines()
    assert rows[0] == "section,key,count"
    assert any(r.startswith("total,quartets,4") for r in rows)
