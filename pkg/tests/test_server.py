import json
import http.client

import pytest

from splitweave.cli import main
from splitweave.server import start_background


@pytest.fixture(scope="module")
def server():
    srv, port = start_background()
    yield port
    srv.shutdown()


def request(port, method, path, body=None):
    conn = http.client.HTTPConnection("127.0.0.1", port, timeout=30)
    payload = json.dumps(body) if body is not None else None
    headers = {"Content-Type": "application/json"} if payload else {}
    conn.request(method, path, payload, headers)
    response = conn.getresponse()
    data = json.loads(response.read())
    conn.close()
    return response.status, data


def test_render_minimal(server, minimal_text):
    status, body = request(server, "POST", "/api/render",
                           {"program": minimal_text, "seed": 0})
    assert status == 200
    assert body["svg"].startswith("<?xml")
    assert body["diagnostics"] == []
    assert any(l["label"] == "grid rows" for l in body["literals"])


def test_render_parse_error_span(server):
    status, body = request(server, "POST", "/api/render", {"program": "(pattern", "seed": 0})
    assert status == 400
    assert body["code"] == "PARSE_ERROR"
    assert body["span"]["startLine"] == 1


def test_render_semantic_error(server, minimal_text):
    status, body = request(server, "POST", "/api/v1/render",
                           {"program": minimal_text.replace(":rows 2", ":rows 0"), "seed": 0})
    assert status == 400
    assert body["code"] == "SEMANTIC_ERROR"
    assert body["nodePath"] == "/layer[0]/fragmenter/param[rows]"


def test_render_stateless(server, minimal_text):
    body = {"program": minimal_text, "seed": 3}
    first = request(server, "POST", "/api/render", body)
    second = request(server, "POST", "/api/render", body)
    assert first == second


def test_render_matches_cli(server, minimal_text, tmp_path):
    prog = tmp_path / "p.sw"
    prog.write_text(minimal_text)
    out = tmp_path / "out.svg"
    assert main(["render", str(prog), "--seed", "5", "--out", str(out)]) == 0
    status, body = request(server, "POST", "/api/render",
                           {"program": minimal_text, "seed": 5})
    assert status == 200
    assert body["svg"] == out.read_text()


def test_sample_matches_cli(server, tmp_path):
    out = tmp_path / "s.sw"
    assert main(["sample", "--style", "mtp", "--seed", "7", "--out", str(out)]) == 0
    status, body = request(server, "POST", "/api/sample", {"style": "mtp", "seed": 7})
    assert status == 200
    assert body["program"] == out.read_text()


def test_sample_validates(server):
    status, body = request(server, "POST", "/api/sample", {"style": "sfp", "seed": 3})
    assert status == 200
    from splitweave.parser import parse
    assert parse(body["program"]).style_tag == "sfp"


def test_sample_unknown_style(server):
    status, body = request(server, "POST", "/api/sample", {"style": "abc", "seed": 1})
    assert status == 400


def test_edit_endpoint(server, minimal_text):
    edit = "(edit :kind replace :target fragmenter :ordinal 0 :payload (grid :rows 3 :cols 3))"
    status, body = request(server, "POST", "/api/edit",
                           {"program": minimal_text, "edit": edit})
    assert status == 200
    from splitweave.parser import parse
    assert parse(body["program"]).layers[0].fragmenter.get("rows") == 3


def test_edit_incompatible_409(server, minimal_text):
    status, body = request(server, "POST", "/api/edit",
                           {"program": minimal_text,
                            "edit": "(edit :kind remove :target outline :ordinal 0)"})
    assert status == 409
    assert body["code"] == "INCOMPATIBLE_EDIT"
    assert body["selector"] == "outline#0"


def test_quartet_preview(server, minimal_text):
    edit = ('(edit :kind insert :target outline :ordinal 0 '
            ':payload (outline :color "#FF0000" :width 2))')
    payload = {"progA": minimal_text, "progB": minimal_text, "edit": edit, "seed": 4}
    status, body = request(server, "POST", "/api/quartet/preview", payload)
    assert status == 200
    for key in ("a", "aPrime", "b", "bPrime"):
        assert body[key].startswith("<?xml")
        assert body["programs"][key]
    assert body["a"] != body["aPrime"]
    assert body["edit"].startswith("(edit")
    again = request(server, "POST", "/api/quartet/preview", payload)
    assert again[1] == body


def test_quartet_preview_names_incompatible_pane(server, minimal_text):
    # outline removal valid for A (give A an outline first) but not for B
    prog_a = minimal_text.replace(
        "(fill :color (cycle :key id :colors (\"#112233\" \"#445566\")))",
        "(fill :color (const :value \"#112233\")) (outline :color \"#000000\" :width 2)")
    status, body = request(server, "POST", "/api/quartet/preview",
                           {"progA": prog_a, "progB": minimal_text,
                            "edit": "(edit :kind remove :target outline :ordinal 0)",
                            "seed": 1})
    assert status == 409
    assert body["pane"] == "b"


def test_quartet_preview_matches_cli_pipeline(server, minimal_text, tmp_path):
    a = tmp_path / "a.sw"
    a.write_text(minimal_text)
    b = tmp_path / "b.sw"
    assert main(["sample", "--style", "mtp", "--seed", "1", "--out", str(b)]) == 0
    edit_text = ('(edit :kind insert :target outline :ordinal 0 '
                 ':payload (outline :color "#203040" :width 2))')
    edit_file = tmp_path / "e.sw"
    edit_file.write_text(edit_text)
    qdir = tmp_path / "q"
    assert main(["quartet", str(a), str(b), "--edit", str(edit_file),
                 "--seed", "9", "--out", str(qdir)]) == 0
    record = json.loads((qdir / "manifest.jsonl").read_text())
    status, body = request(server, "POST", "/api/quartet/preview",
                           {"progA": minimal_text, "progB": b.read_text(),
                            "edit": edit_text, "seed": 9})
    assert status == 200
    assert body["a"] == (qdir / record["a"]).read_text()
    assert body["aPrime"] == (qdir / record["a_prime"]).read_text()
    assert body["b"] == (qdir / record["b"]).read_text()
    assert body["bPrime"] == (qdir / record["b_prime"]).read_text()


def test_motifs_endpoint(server):
    status, body = request(server, "GET", "/api/motifs")
    assert status == 200
    ids = [m["id"] for m in body["motifs"]]
    assert len(ids) == 10
    assert ids == sorted(ids)
    assert request(server, "GET", "/api/v1/motifs")[1] == body


def test_oversized_request_413(server):
    big = "x" * (256 * 1024 + 1)
    status, body = request(server, "POST", "/api/render", {"program": big, "seed": 0})
    assert status == 413
    assert body["code"] == "INTERNAL"


def test_unknown_route_404(server):
    status, body = request(server, "POST", "/api/nope", {})
    assert status == 404


def test_render_budget_exhaustion_422(monkeypatch):
    import splitweave.server as server_mod
    monkeypatch.setattr(server_mod, "RENDER_TIMEOUT_S", 0.02)
    heavy = ('(pattern (canvas :width 1024 :height 1024 :background "#FFFFFF") '
             '(layer (voronoi :n 96 :relax 2) '
             '(fill :color (const :value "#000000"))))')
    srv, port = start_background()
    try:
        status, body = request(port, "POST", "/api/render",
                               {"program": heavy, "seed": 0})
        assert status == 422
        assert body["code"] == "INTERNAL"
    finally:
        srv.shutdown()


def test_static_serving(tmp_path):
    (tmp_path / "index.html").write_text("<html><body>playground</body></html>")
    srv, port = start_background(static_dir=str(tmp_path))
    try:
        conn = http.client.HTTPConnection("127.0.0.1", port, timeout=10)
        conn.request("GET", "/")
        response = conn.getresponse()
        assert response.status == 200
        assert b"playground" in response.read()
        conn.close()
    finally:
        srv.shutdown()
