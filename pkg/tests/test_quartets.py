import hashlib
import json
import os

import pytest

from splitweave.core import ast_equals
from splitweave.edits import apply_edit
from splitweave.parser import parse
from splitweave.quartets import (
    MANIFEST_FIELDS, audit_dataset, make_quartet, quartet_id_for, split_for,
    write_dataset,
)
from splitweave.rng import fnv1a


def tree_digest(root):
    h = hashlib.sha256()
    for dirpath, dirnames, filenames in sorted(os.walk(root)):
        dirnames.sort()
        for name in sorted(filenames):
            path = os.path.join(dirpath, name)
            h.update(os.path.relpath(path, root).encode())
            with open(path, "rb") as fh:
                h.update(fh.read())
    return h.hexdigest()


def test_make_quartet_deterministic():
    a = make_quartet(42, "sfp")
    b = make_quartet(42, "sfp")
    assert a.edit == b.edit
    for name in ("image_a", "image_a_prime", "image_b", "image_b_prime"):
        assert getattr(a, name).svg_text == getattr(b, name).svg_text


def test_quartet_edit_relation_and_visibility():
    for seed in range(25):
        for style in ("mtp", "sfp"):
            q = make_quartet(seed, style)
            assert ast_equals(apply_edit(q.program_a, q.edit), q.program_a_prime)
            assert ast_equals(apply_edit(q.program_b, q.edit), q.program_b_prime)
            assert not ast_equals(q.program_a, q.program_a_prime)
            assert not ast_equals(q.program_b, q.program_b_prime)
            assert q.image_a.svg_text != q.image_a_prime.svg_text
            assert q.image_b.svg_text != q.image_b_prime.svg_text


def test_quartet_simplicity_rule():
    from splitweave.core import nominal_fragment_count
    for seed in range(25):
        q = make_quartet(seed, "mtp")
        assert len(q.program_a.layers) == 1
        assert nominal_fragment_count(q.program_a) <= 16
        assert nominal_fragment_count(q.program_b) >= nominal_fragment_count(q.program_a)


def test_split_rule():
    qid = quartet_id_for("mtp", 123456)
    expected = "val" if fnv1a(qid.encode()) % 100 < 5 else "train"
    assert split_for(qid) == expected
    # both splits occur over a reasonable id population
    splits = {split_for(quartet_id_for("sfp", s)) for s in range(400)}
    assert splits == {"train", "val"}


def test_write_dataset_layout(tmp_path):
    manifest = write_dataset(6, ("mtp", "sfp"), 7, str(tmp_path / "ds"))
    assert manifest.path.name == "manifest.jsonl"
    assert len(manifest.records) == 6
    ids = [r["id"] for r in manifest.records]
    assert ids == sorted(ids) and len(set(ids)) == 6
    styles = {r["style"] for r in manifest.records}
    assert styles == {"mtp", "sfp"}
    for record in manifest.records:
        assert list(record.keys()) == list(MANIFEST_FIELDS)
        for key in ("a", "a_prime", "b", "b_prime"):
            f = tmp_path / "ds" / record[key]
            assert f.is_file() and f.stat().st_size > 0
            assert f.with_suffix(".sw").is_file()
        line_style, line_id = record["id"].split("-", 1)
        assert record["a"].startswith(f"{record['style']}/")


def test_write_dataset_worker_invariance(tmp_path):
    write_dataset(8, ("mtp", "sfp"), 42, str(tmp_path / "d1"), workers=1)
    write_dataset(8, ("mtp", "sfp"), 42, str(tmp_path / "d2"), workers=3)
    assert tree_digest(tmp_path / "d1") == tree_digest(tmp_path / "d2")


def test_write_dataset_with_raster(tmp_path):
    manifest = write_dataset(2, ("sfp",), 3, str(tmp_path / "ds"), raster_size=64)
    for record in manifest.records:
        for key in ("a", "a_prime", "b", "b_prime"):
            png = (tmp_path / "ds" / record[key]).with_suffix(".png")
            assert png.is_file() and png.stat().st_size > 0


def test_audit_clean_and_deep(tmp_path):
    write_dataset(5, ("sfp",), 11, str(tmp_path / "ds"))
    report = audit_dataset(str(tmp_path / "ds"), deep=True)
    assert report.ok
    assert len(report.records) == 5


def test_audit_flags_problems(tmp_path):
    write_dataset(3, ("mtp",), 5, str(tmp_path / "ds"))
    manifest = tmp_path / "ds" / "manifest.jsonl"
    records = [json.loads(line) for line in manifest.read_text().splitlines()]
    # corrupt: delete a file and flip a split
    victim = tmp_path / "ds" / records[0]["a"]
    victim.unlink()
    records[1]["split"] = "val" if records[1]["split"] == "train" else "train"
    manifest.write_text("\n".join(json.dumps(r) for r in records) + "\n")
    report = audit_dataset(str(tmp_path / "ds"))
    assert not report.ok
    assert any("missing or empty" in p for p in report.problems)
    assert any("hash rule" in p for p in report.problems)


def test_audit_deep_catches_broken_relation(tmp_path):
    write_dataset(2, ("sfp",), 13, str(tmp_path / "ds"))
    report = audit_dataset(str(tmp_path / "ds"), deep=True)
    rec = report.records[0]
    sw = (tmp_path / "ds" / rec["a_prime"]).with_suffix(".sw")
    program = parse(sw.read_text())
    # wreck a_prime: change the canvas background
    text = sw.read_text().replace(program.canvas.background.hex, "#010203")
    sw.write_text(text)
    broken = audit_dataset(str(tmp_path / "ds"), deep=True)
    assert any("apply_edit" in p for p in broken.problems)


def test_missing_manifest(tmp_path):
    report = audit_dataset(str(tmp_path))
    assert not report.ok
