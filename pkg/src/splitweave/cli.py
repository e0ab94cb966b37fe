"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 parse/semantic error, 3 runtime
error (geometry / sampling / io). Standard output carries machine-consumable
results (paths, canonical text); diagnostics and progress go to stderr.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .core import validate
from .edits import apply_edit, parse_edit
from .errors import IncompatibleEdit, SplitWeaveError
from .motifs import builtin_registry, load_motif_library
from .parser import ParseError, SemanticError, parse, print_program
from .quartets import (
    MANIFEST_FIELDS, Quartet, audit_dataset, quartet_id_for, quartet_images,
    write_dataset, _quartet_record,
)
from .render import RenderOptions, interpolate_programs, render
from .samplers import DEFAULT_CONFIG, SamplerConfig, sample_program

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_RUNTIME = 3

MOTIF_DIR_ENV = "SPLITWEAVE_MOTIF_DIR"


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; usage errors are 1
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _registry(args):
    motif_dir = getattr(args, "motifs", None) or os.environ.get(MOTIF_DIR_ENV)
    return load_motif_library(motif_dir) if motif_dir else builtin_registry()


def _config(args) -> SamplerConfig:
    path = getattr(args, "config", None)
    return SamplerConfig.from_json(path) if path else DEFAULT_CONFIG


def _read_program(path: str):
    return parse(Path(path).read_text(encoding="utf-8"))


def _opts(args) -> RenderOptions:
    return RenderOptions(raster_size=getattr(args, "png", None))


def cmd_render(args) -> int:
    program = _read_program(args.program)
    image = render(program, args.seed, _opts(args), _registry(args))
    for warning in image.warnings:
        print(warning, file=sys.stderr)
    out = Path(args.out)
    out.write_text(image.svg_text, encoding="utf-8")
    if image.raster_bytes:
        out.with_suffix(".png").write_bytes(image.raster_bytes)
    print(out)
    return EXIT_OK


def cmd_sample(args) -> int:
    program = sample_program(args.style, args.seed, _registry(args), _config(args))
    Path(args.out).write_text(print_program(program), encoding="utf-8")
    print(args.out)
    return EXIT_OK


def cmd_edit(args) -> int:
    program = _read_program(args.program)
    edit = parse_edit(Path(args.edit).read_text(encoding="utf-8"))
    result = apply_edit(program, edit)
    Path(args.out).write_text(print_program(result), encoding="utf-8")
    print(args.out)
    return EXIT_OK


def cmd_quartet(args) -> int:
    """Explicit quartet from (A, edit, B, seed): writes a 1-quartet dataset
    (same layout and manifest) so the result feeds the audit directly."""
    program_a = _read_program(args.program_a)
    program_b = _read_program(args.program_b)
    edit = parse_edit(Path(args.edit).read_text(encoding="utf-8"))
    registry = _registry(args)
    opts = _opts(args)
    a_prime, b_prime, img_a, img_ap, img_b, img_bp = quartet_images(
        program_a, edit, program_b, args.seed, registry, opts)
    style = program_a.style_tag if program_a.style_tag != "custom" else "mtp"
    q = Quartet(quartet_id_for(style, args.seed), args.seed, style, edit,
                program_a, a_prime, program_b, b_prime, img_a, img_ap, img_b, img_bp)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    record = _quartet_record(q, out, args.png is not None)
    import json
    line = json.dumps({k: record[k] for k in MANIFEST_FIELDS}, separators=(", ", ": "))
    (out / "manifest.jsonl").write_text(line + "\n", encoding="utf-8")
    print(out / "manifest.jsonl")
    return EXIT_OK


def cmd_dataset(args) -> int:
    styles = tuple(s.strip() for s in args.styles.split(",") if s.strip())

    def progress(done, total):
        if done % 50 == 0 or done == total:
            print(f"{done}/{total} quartets", file=sys.stderr)

    motif_dir = getattr(args, "motifs", None) or os.environ.get(MOTIF_DIR_ENV)
    manifest = write_dataset(args.count, styles, args.seed, args.out,
                             workers=args.jobs, raster_size=args.png,
                             config=_config(args), motif_dir=motif_dir,
                             progress=progress)
    print(manifest.path)
    return EXIT_OK


def cmd_animate(args) -> int:
    program_a = _read_program(args.program_a)
    program_b = _read_program(args.program_b)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    frames = args.frames
    if frames < 2:
        print("error: --frames must be >= 2", file=sys.stderr)
        return EXIT_USAGE
    registry = _registry(args)
    for i in range(frames):
        t = i / (frames - 1)
        frame = interpolate_programs(program_a, program_b, t)
        image = render(frame, args.seed, _opts(args), registry)
        (out / f"frame_{i:04d}.svg").write_text(image.svg_text, encoding="utf-8")
        (out / f"frame_{i:04d}.sw").write_text(print_program(frame), encoding="utf-8")
        if image.raster_bytes:
            (out / f"frame_{i:04d}.png").write_bytes(image.raster_bytes)
    print(out)
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        program = _read_program(args.program)
    except SemanticError as exc:
        for d in exc.diagnostics:
            print(d, file=sys.stderr)
        return EXIT_PARSE
    diagnostics = validate(program)
    for d in diagnostics:
        print(d, file=sys.stderr)
    return EXIT_PARSE if diagnostics else EXIT_OK


def cmd_fmt(args) -> int:
    path = Path(args.program)
    program = parse(path.read_text(encoding="utf-8"))
    path.write_text(print_program(program), encoding="utf-8")
    print(path)
    return EXIT_OK


def cmd_motifs(args) -> int:
    registry = _registry(args)
    for d in registry.defs():
        print(f"{d.motif_id}\t{d.source}")
    return EXIT_OK


def cmd_audit(args) -> int:
    report = audit_dataset(args.dataset, deep=args.deep)
    for problem in report.problems:
        print(problem, file=sys.stderr)
    print(f"{len(report.records)} records, {len(report.problems)} problems")
    return EXIT_OK if report.ok else EXIT_RUNTIME


def cmd_report(args) -> int:
    from .report import write_report
    result = write_report(args.dataset, args.out, deep=args.deep)
    for problem in result.audit.problems:
        print(problem, file=sys.stderr)
    for path in result.outputs:
        print(path)
    return EXIT_OK if result.audit.ok else EXIT_RUNTIME


def cmd_serve(args) -> int:
    from .server import serve
    serve(port=args.port, motif_dir=getattr(args, "motifs", None)
          or os.environ.get(MOTIF_DIR_ENV), static_dir=args.static)
    return EXIT_OK


def build_parser() -> _Parser:
    top = _Parser(prog="splitweave", description="Visual-pattern DSL toolchain")
    sub = top.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(fn=fn)
        return p

    p = add("render", cmd_render, "render a program to SVG (and optional PNG)")
    p.add_argument("program")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--png", type=int, default=None, metavar="SIZE")
    p.add_argument("--motifs", default=None)

    p = add("sample", cmd_sample, "sample a program of the given style")
    p.add_argument("--style", required=True, choices=("mtp", "sfp"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--motifs", default=None)
    p.add_argument("--config", default=None)

    p = add("edit", cmd_edit, "apply an edit descriptor to a program")
    p.add_argument("program")
    p.add_argument("--edit", required=True)
    p.add_argument("--out", required=True)

    p = add("quartet", cmd_quartet, "build one quartet from (A, edit, B, seed)")
    p.add_argument("program_a")
    p.add_argument("program_b")
    p.add_argument("--edit", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--png", type=int, default=None, metavar="SIZE")
    p.add_argument("--motifs", default=None)

    p = add("dataset", cmd_dataset, "generate an analogical-quartet dataset")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--styles", default="mtp,sfp")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--png", type=int, default=None, metavar="SIZE")
    p.add_argument("--motifs", default=None)
    p.add_argument("--config", default=None)

    p = add("animate", cmd_animate, "interpolate two programs into SVG frames")
    p.add_argument("program_a")
    p.add_argument("program_b")
    p.add_argument("--frames", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--png", type=int, default=None, metavar="SIZE")
    p.add_argument("--motifs", default=None)

    p = add("validate", cmd_validate, "validate a program file")
    p.add_argument("program")

    p = add("fmt", cmd_fmt, "rewrite a program file in canonical form")
    p.add_argument("program")

    p = add("motifs", cmd_motifs, "list available motifs")
    p.add_argument("--motifs", default=None)

    p = add("audit", cmd_audit, "audit a dataset directory")
    p.add_argument("dataset")
    p.add_argument("--deep", action="store_true")

    p = add("report", cmd_report, "audit a dataset and write summary + figures")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--deep", action="store_true")

    p = add("serve", cmd_serve, "run the playground HTTP service")
    p.add_argument("--port", type=int, default=8787)
    p.add_argument("--motifs", default=None)
    p.add_argument("--static", default=None)
    return top


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.fn(args)
    except ParseError as exc:
        print(f"parse error at {exc.span}: {exc.args[0]}", file=sys.stderr)
        if exc.expected:
            print(f"expected: {', '.join(exc.expected)}", file=sys.stderr)
        return EXIT_PARSE
    except SemanticError as exc:
        for d in exc.diagnostics:
            print(d, file=sys.stderr)
        return EXIT_PARSE
    except IncompatibleEdit as exc:
        print(f"incompatible edit: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except SplitWeaveError as exc:
        where = f" at {exc.node_path}" if exc.node_path else ""
        print(f"error{where}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
