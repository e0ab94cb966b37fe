"""Local playground HTTP service.

Stateless JSON endpoints over the pure pipeline, served by a threading
stdlib server (the registry is loaded once and shared read-only):

    POST /api/v1/render          {program, seed}              -> {svg, diagnostics, literals}
    POST /api/v1/sample          {style, seed}                -> {program}
    POST /api/v1/edit            {program, edit}              -> {program}
    POST /api/v1/quartet/preview {progA, edit, progB, seed}   -> {a, aPrime, b, bPrime}
    GET  /api/v1/motifs                                       -> {motifs: [{id, source}]}

The unversioned /api/... aliases resolve to the same handlers. Every result
is byte-identical to the CLI pipeline on the same inputs. Errors use the
closed code set PARSE_ERROR / SEMANTIC_ERROR / INCOMPATIBLE_EDIT / INTERNAL.
GET / serves the bundled playground assets when a static dir is configured.
"""

from __future__ import annotations

import json
import mimetypes
import sys
import threading
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeout
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional

from .core import NODE_SPECS, FieldExpr, Program, iter_nodes
from .edits import apply_edit, is_compatible, parse_edit
from .errors import IncompatibleEdit, InvalidResult, SplitWeaveError
from .motifs import MotifRegistry, builtin_registry, load_motif_library
from .parser import ParseError, SemanticError, parse, print_program
from .quartets import quartet_images
from .render import RenderOptions, render
from .samplers import DEFAULT_CONFIG, SamplerConfig, sample_program

MAX_BODY_BYTES = 256 * 1024
RENDER_TIMEOUT_S = 5.0
DEFAULT_PORT = 8787


class _ApiError(Exception):
    def __init__(self, status: int, code: str, detail: str, extra: Optional[dict] = None):
        super().__init__(detail)
        self.status = status
        self.code = code
        self.detail = detail
        self.extra = extra or {}

    def body(self) -> dict:
        return {"code": self.code, "detail": self.detail, **self.extra}


def _parse_program(text, field: str) -> Program:
    if not isinstance(text, str):
        raise _ApiError(400, "PARSE_ERROR", f"{field} must be a string")
    try:
        return parse(text)
    except ParseError as exc:
        raise _ApiError(400, "PARSE_ERROR", exc.args[0], {
            "span": {"startLine": exc.span.start_line, "startCol": exc.span.start_col,
                     "endLine": exc.span.end_line, "endCol": exc.span.end_col},
            "expected": list(exc.expected)}) from None
    except SemanticError as exc:
        first = exc.diagnostics[0]
        raise _ApiError(400, "SEMANTIC_ERROR", first.message,
                        {"nodePath": first.path,
                         "diagnostics": [{"path": d.path, "message": d.message}
                                         for d in exc.diagnostics]}) from None


def _parse_edit_body(text) -> object:
    if not isinstance(text, str):
        raise _ApiError(400, "PARSE_ERROR", "edit must be a string")
    try:
        return parse_edit(text)
    except ParseError as exc:
        raise _ApiError(400, "PARSE_ERROR", exc.args[0]) from None


def _seed_of(body: dict) -> int:
    seed = body.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise _ApiError(400, "PARSE_ERROR", "seed must be a non-negative integer")
    return seed


def _literal_descriptors(p: Program) -> list[dict]:
    """Numeric literal slots with their documented bounds; feeds the
    playground's slider bindings."""
    out = []
    for _, path, n in iter_nodes(p):
        for spec in NODE_SPECS[n.kind]:
            value = n.get(spec.name)
            if isinstance(value, (FieldExpr, str)) or value is None:
                continue
            if spec.vtype not in ("int", "real"):
                continue
            out.append({
                "nodePath": f"{path}/param[{spec.name}]",
                "label": f"{n.kind} {spec.name}",
                "value": value,
                "min": spec.lo,
                "max": spec.hi,
                "integer": spec.vtype == "int",
            })
    return out


class PlaygroundService:
    """Pure request handlers, shared by the HTTP layer and tests."""

    def __init__(self, registry: Optional[MotifRegistry] = None,
                 config: SamplerConfig = DEFAULT_CONFIG):
        self.registry = registry or builtin_registry()
        self.config = config

    def handle_render(self, body: dict) -> dict:
        program = _parse_program(body.get("program"), "program")
        seed = _seed_of(body)
        image = render(program, seed, RenderOptions(), self.registry)
        return {"svg": image.svg_text,
                "diagnostics": [{"path": d.path, "message": d.message}
                                for d in image.warnings],
                "literals": _literal_descriptors(program),
                "canonical": print_program(program)}

    def handle_sample(self, body: dict) -> dict:
        style = body.get("style")
        if style not in ("mtp", "sfp"):
            raise _ApiError(400, "PARSE_ERROR", f"unknown style {style!r}")
        program = sample_program(style, _seed_of(body), self.registry, self.config)
        return {"program": print_program(program)}

    def handle_edit(self, body: dict) -> dict:
        program = _parse_program(body.get("program"), "program")
        edit = _parse_edit_body(body.get("edit"))
        if not is_compatible(program, edit):
            raise _ApiError(409, "INCOMPATIBLE_EDIT",
                            f"edit {edit} is not applicable", {"selector": str(edit.selector)})
        result = apply_edit(program, edit)
        return {"program": print_program(result)}

    def handle_quartet_preview(self, body: dict) -> dict:
        program_a = _parse_program(body.get("progA"), "progA")
        program_b = _parse_program(body.get("progB"), "progB")
        edit = _parse_edit_body(body.get("edit"))
        seed = _seed_of(body)
        for name, prog in (("a", program_a), ("b", program_b)):
            if not is_compatible(prog, edit):
                raise _ApiError(409, "INCOMPATIBLE_EDIT",
                                f"edit {edit} is not applicable to {name}",
                                {"selector": str(edit.selector), "pane": name})
        a_prime, b_prime, img_a, img_ap, img_b, img_bp = quartet_images(
            program_a, edit, program_b, seed, self.registry)
        # canonical echoes let the playground export dataset-layout bundles
        # that are byte-identical to the CLI pipeline
        from .edits import print_edit
        return {"a": img_a.svg_text, "aPrime": img_ap.svg_text,
                "b": img_b.svg_text, "bPrime": img_bp.svg_text,
                "programs": {"a": print_program(program_a),
                             "aPrime": print_program(a_prime),
                             "b": print_program(program_b),
                             "bPrime": print_program(b_prime)},
                "edit": print_edit(edit).strip()}

    def handle_motifs(self) -> dict:
        return {"motifs": [{"id": d.motif_id, "source": d.source}
                           for d in self.registry.defs()]}


_ROUTES = {
    ("POST", "render"): "handle_render",
    ("POST", "sample"): "handle_sample",
    ("POST", "edit"): "handle_edit",
    ("POST", "quartet/preview"): "handle_quartet_preview",
    ("GET", "motifs"): "handle_motifs",
}


def _strip_api_prefix(path: str) -> Optional[str]:
    for prefix in ("/api/v1/", "/api/"):
        if path.startswith(prefix):
            return path[len(prefix):]
    return None


class _Handler(BaseHTTPRequestHandler):
    server_version = "splitweave"
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):  # keep stdout machine-clean
        if self.server.verbose:  # type: ignore[attr-defined]
            sys.stderr.write(fmt % args + "\n")

    def _send_json(self, status: int, payload: dict):
        data = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def do_GET(self):
        route = _strip_api_prefix(self.path.split("?")[0])
        if route is not None:
            return self._dispatch("GET", route, {})
        return self._serve_static(self.path.split("?")[0])

    def do_POST(self):
        route = _strip_api_prefix(self.path.split("?")[0])
        if route is None:
            return self._send_json(404, {"code": "INTERNAL", "detail": "not found"})
        length = int(self.headers.get("Content-Length") or 0)
        if length > MAX_BODY_BYTES:
            return self._send_json(413, {"code": "INTERNAL",
                                         "detail": f"request body exceeds {MAX_BODY_BYTES} bytes"})
        raw = self.rfile.read(length) if length else b""
        try:
            body = json.loads(raw.decode("utf-8")) if raw else {}
            if not isinstance(body, dict):
                raise ValueError("body must be a JSON object")
        except (ValueError, UnicodeDecodeError) as exc:
            return self._send_json(400, {"code": "PARSE_ERROR", "detail": str(exc)})
        return self._dispatch("POST", route, body)

    def _dispatch(self, method: str, route: str, body: dict):
        handler_name = _ROUTES.get((method, route))
        if handler_name is None:
            return self._send_json(404, {"code": "INTERNAL", "detail": "not found"})
        service: PlaygroundService = self.server.service  # type: ignore[attr-defined]
        pool: ThreadPoolExecutor = self.server.pool  # type: ignore[attr-defined]
        handler = getattr(service, handler_name)
        future = pool.submit(handler) if method == "GET" else pool.submit(handler, body)
        try:
            result = future.result(timeout=RENDER_TIMEOUT_S)
        except FutureTimeout:
            return self._send_json(422, {"code": "INTERNAL",
                                         "detail": f"render budget of {RENDER_TIMEOUT_S}s exhausted"})
        except _ApiError as exc:
            return self._send_json(exc.status, exc.body())
        except (IncompatibleEdit, InvalidResult) as exc:
            return self._send_json(409, {"code": "INCOMPATIBLE_EDIT", "detail": str(exc)})
        except SplitWeaveError as exc:
            return self._send_json(500, {"code": "INTERNAL", "detail": str(exc),
                                         **({"nodePath": exc.node_path} if exc.node_path else {})})
        except Exception as exc:  # never leak a traceback as HTML
            return self._send_json(500, {"code": "INTERNAL", "detail": repr(exc)})
        return self._send_json(200, result)

    def _serve_static(self, path: str):
        static_dir = self.server.static_dir  # type: ignore[attr-defined]
        if static_dir is None:
            return self._send_json(404, {"code": "INTERNAL",
                                         "detail": "no playground assets configured"})
        rel = path.lstrip("/") or "index.html"
        target = (Path(static_dir) / rel).resolve()
        if not str(target).startswith(str(Path(static_dir).resolve())) or not target.is_file():
            return self._send_json(404, {"code": "INTERNAL", "detail": "not found"})
        data = target.read_bytes()
        ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)


class PlaygroundServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, addr, service: PlaygroundService, static_dir: Optional[str] = None,
                 verbose: bool = False):
        super().__init__(addr, _Handler)
        self.service = service
        self.static_dir = static_dir
        self.verbose = verbose
        self.pool = ThreadPoolExecutor(max_workers=8)

    def shutdown(self):
        super().shutdown()
        self.pool.shutdown(wait=False)


def make_server(port: int = 0, motif_dir: Optional[str] = None,
                static_dir: Optional[str] = None, verbose: bool = False) -> PlaygroundServer:
    registry = load_motif_library(motif_dir) if motif_dir else builtin_registry()
    return PlaygroundServer(("127.0.0.1", port), PlaygroundService(registry), static_dir, verbose)


def serve(port: int = DEFAULT_PORT, motif_dir: Optional[str] = None,
          static_dir: Optional[str] = None):
    server = make_server(port, motif_dir, static_dir, verbose=True)
    host, actual_port = server.server_address
    print(f"http://{host}:{actual_port}/", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()


def start_background(port: int = 0, motif_dir: Optional[str] = None,
                     static_dir: Optional[str] = None) -> tuple[PlaygroundServer, int]:
    """Start on an ephemeral port in a daemon thread (used by tests)."""
    server = make_server(port, motif_dir, static_dir)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server, server.server_address[1]
