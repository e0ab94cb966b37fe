import json

import pytest

from splitweave.core import ast_equals, validate
from splitweave.parser import parse, print_program
from splitweave.render import render
from splitweave.samplers import DEFAULT_CONFIG, SamplerConfig, sample_mtp, sample_program, sample_sfp

CORPUS = 300


def test_sampler_determinism():
    for seed in (0, 7, 991):
        assert ast_equals(sample_mtp(seed), sample_mtp(seed))
        assert ast_equals(sample_sfp(seed), sample_sfp(seed))


def test_mtp_contract():
    for seed in range(CORPUS):
        program = sample_mtp(seed)
        assert program.style_tag == "mtp"
        assert program.canvas.width == 512 and program.canvas.height == 512
        assert 1 <= len(program.layers) <= 2
        for layer in program.layers:
            assert layer.fragmenter.kind in ("grid", "brick")
            assert [s.kind for s in layer.styles] == ["place-motif"]
        assert validate(program) == []


def test_sfp_contract():
    for seed in range(CORPUS):
        program = sample_sfp(seed)
        assert program.style_tag == "sfp"
        assert len(program.layers) == 1
        layer = program.layers[0]
        assert layer.fragmenter.kind in ("voronoi", "stripes", "grid", "brick")
        assert layer.styles[0].kind == "fill"
        assert validate(program) == []


def test_corpus_renders():
    for seed in range(0, CORPUS, 3):
        for style in ("mtp", "sfp"):
            image = render(sample_program(style, seed), seed)
            assert image.svg_text.startswith("<?xml")


def test_mtp_diversity_floor():
    combos = set()
    for seed in range(1000):
        program = sample_mtp(seed)
        layer = program.layers[0]
        style = layer.styles[0]
        fieldish = tuple(
            (value.kind if hasattr(value, "kind") else "literal")
            for value in (style.get("scale"), style.get("rotate"), style.get("fill")))
        combos.add((layer.fragmenter.kind, style.get("motif"), fieldish))
    assert len(combos) >= 100


def test_sfp_voronoi_share():
    votes = sum(sample_sfp(seed).layers[0].fragmenter.kind == "voronoi"
                for seed in range(1000))
    share = votes / 1000
    weight = dict(DEFAULT_CONFIG.sfp_fragmenter_weights)["voronoi"]
    assert share >= 0.25
    assert abs(share - weight) <= 0.05


def test_seed_independence():
    distinct = 0
    previous = sample_mtp(0)
    for seed in range(1, 1000):
        current = sample_mtp(seed)
        if not ast_equals(current, previous):
            distinct += 1
        previous = current
    assert distinct >= 990


def test_sampled_text_reparses():
    for seed in range(50):
        for style in ("mtp", "sfp"):
            program = sample_program(style, seed)
            text = print_program(program)
            assert ast_equals(parse(text), program)


def test_config_override(tmp_path):
    config_path = tmp_path / "conf.json"
    config_path.write_text(json.dumps({
        "sfp_fragmenter_weights": [["stripes", 1.0]],
        "sfp_stripes_n": [5, 5],
    }))
    config = SamplerConfig.from_json(str(config_path))
    for seed in range(20):
        program = sample_sfp(seed, config=config)
        assert program.layers[0].fragmenter.kind == "stripes"
        assert program.layers[0].fragmenter.get("n") == 5


def test_config_rejects_unknown_keys(tmp_path):
    config_path = tmp_path / "conf.json"
    config_path.write_text(json.dumps({"not_a_key": 1}))
    with pytest.raises(ValueError):
        SamplerConfig.from_json(str(config_path))


def test_unknown_style_rejected():
    with pytest.raises(ValueError):
        sample_program("xyz", 0)
