"""Analogical quartet construction and the dataset writer.

A quartet holds four rendered patterns (a, a', b, b') where a' and b' come
from applying one shared edit descriptor to both source programs - the edit
relation holds by construction and is re-asserted before anything is written.
The writer is deterministic and worker-count invariant: quartet i depends
only on (master seed, i, style), files land under <style>/<id>/, and the
manifest is assembled single-writer after all workers finish.
"""

from __future__ import annotations

import json
import shutil
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .core import Program, ast_equals, nominal_fragment_count
from .edits import EditDescriptor, apply_edit, is_compatible, parse_edit, print_edit, sample_edit
from .errors import InvalidResult, IoError, SamplingExhausted, SplitWeaveError
from .motifs import MotifRegistry, builtin_registry, load_motif_library
from .parser import parse, print_program
from .render import PatternImage, RenderOptions, render
from .rng import derive, fnv1a
from .samplers import DEFAULT_CONFIG, SamplerConfig, sample_program

SIMPLE_MAX_FRAGMENTS = 16
EDIT_RETRIES = 8
PROGRAM_ATTEMPTS = 64
VAL_PERCENT = 5

MANIFEST_NAME = "manifest.jsonl"
MANIFEST_FIELDS = ("id", "seed", "style", "edit", "a", "a_prime", "b", "b_prime", "split")


@dataclass(frozen=True)
class Quartet:
    quartet_id: str
    seed: int
    style: str
    edit: EditDescriptor
    program_a: Program
    program_a_prime: Program
    program_b: Program
    program_b_prime: Program
    image_a: PatternImage
    image_a_prime: PatternImage
    image_b: PatternImage
    image_b_prime: PatternImage


def quartet_id_for(style: str, seed: int) -> str:
    return f"{style}-{seed:016x}"


def split_for(quartet_id: str) -> str:
    return "val" if fnv1a(quartet_id.encode("utf-8")) % 100 < VAL_PERCENT else "train"


def render_seeds(seed: int) -> tuple[int, int]:
    """Render substreams for the (a, a') and (b, b') pairs. Shared between
    the dataset pipeline, the explicit-quartet CLI and the preview endpoint."""
    return derive(seed, "render-a"), derive(seed, "render-b")


def quartet_images(program_a: Program, edit: EditDescriptor, program_b: Program, seed: int,
                   registry: Optional[MotifRegistry] = None,
                   opts: RenderOptions = RenderOptions()) -> tuple[Program, Program, PatternImage, PatternImage, PatternImage, PatternImage]:
    """Apply the edit to both programs and render all four images."""
    registry = registry or builtin_registry()
    a_prime = apply_edit(program_a, edit)
    b_prime = apply_edit(program_b, edit)
    seed_a, seed_b = render_seeds(seed)
    img_a = render(program_a, seed_a, opts, registry)
    img_a_prime = render(a_prime, seed_a, opts, registry)
    img_b = render(program_b, seed_b, opts, registry)
    img_b_prime = render(b_prime, seed_b, opts, registry)
    return a_prime, b_prime, img_a, img_a_prime, img_b, img_b_prime


def _candidate_ok(program: Program, edit: EditDescriptor) -> Optional[Program]:
    """Cheap acceptance: compatible, applies cleanly, and actually changes
    the AST. Returns the edited program or None."""
    if not is_compatible(program, edit):
        return None
    try:
        edited = apply_edit(program, edit)
    except (InvalidResult, SplitWeaveError):
        return None
    if ast_equals(program, edited):
        return None
    return edited


def make_quartet(seed: int, style: str, registry: Optional[MotifRegistry] = None,
                 config: SamplerConfig = DEFAULT_CONFIG,
                 opts: RenderOptions = RenderOptions()) -> Quartet:
    """Deterministic quartet for (seed, style); raises SamplingExhausted
    after the retry budget."""
    registry = registry or builtin_registry()
    for retry in range(EDIT_RETRIES):
        edit = sample_edit(derive(seed, "edit-draw", retry), style, registry, config)

        program_a = None
        for attempt in range(PROGRAM_ATTEMPTS):
            cand = sample_program(style, derive(seed, "za", retry, attempt), registry, config)
            if len(cand.layers) != 1 or nominal_fragment_count(cand) > SIMPLE_MAX_FRAGMENTS:
                continue
            if _candidate_ok(cand, edit) is not None:
                program_a = cand
                break
        if program_a is None:
            continue

        program_b = None
        floor = nominal_fragment_count(program_a)
        for attempt in range(PROGRAM_ATTEMPTS):
            cand = sample_program(style, derive(seed, "zb", retry, attempt), registry, config)
            if nominal_fragment_count(cand) < floor:
                continue
            if _candidate_ok(cand, edit) is not None:
                program_b = cand
                break
        if program_b is None:
            continue

        try:
            a_prime, b_prime, img_a, img_ap, img_b, img_bp = quartet_images(
                program_a, edit, program_b, seed, registry, opts)
        except SplitWeaveError:
            continue
        if img_a.svg_text == img_ap.svg_text or img_b.svg_text == img_bp.svg_text:
            continue  # edit must be visible in both pairs
        return Quartet(quartet_id_for(style, seed), seed, style, edit,
                       program_a, a_prime, program_b, b_prime,
                       img_a, img_ap, img_b, img_bp)
    raise SamplingExhausted(f"no quartet for seed={seed} style={style} "
                            f"after {EDIT_RETRIES} edit draws")


# ---------------------------------------------------------------------------
# Dataset writer


@dataclass(frozen=True)
class DatasetManifest:
    path: Path
    records: tuple[dict, ...]


def _quartet_record(q: Quartet, out_dir: Path, raster: bool) -> dict:
    rel = Path(q.style) / q.quartet_id
    qdir = out_dir / rel
    try:
        qdir.mkdir(parents=True, exist_ok=True)
        names = ("a", "a_prime", "b", "b_prime")
        programs = (q.program_a, q.program_a_prime, q.program_b, q.program_b_prime)
        images = (q.image_a, q.image_a_prime, q.image_b, q.image_b_prime)
        for name, prog, img in zip(names, programs, images):
            (qdir / f"{name}.svg").write_text(img.svg_text, encoding="utf-8")
            (qdir / f"{name}.sw").write_text(print_program(prog), encoding="utf-8")
            if raster and img.raster_bytes:
                (qdir / f"{name}.png").write_bytes(img.raster_bytes)
    except OSError as exc:
        shutil.rmtree(qdir, ignore_errors=True)
        raise IoError(f"failed writing quartet {q.quartet_id}: {exc}") from exc
    record = {
        "id": q.quartet_id,
        "seed": q.seed,
        "style": q.style,
        "edit": print_edit(q.edit).strip(),
        "a": str(rel / "a.svg"),
        "a_prime": str(rel / "a_prime.svg"),
        "b": str(rel / "b.svg"),
        "b_prime": str(rel / "b_prime.svg"),
        "split": split_for(q.quartet_id),
    }
    return record


def _dataset_job(args) -> dict:
    index, master_seed, style, out_dir, raster_size, config, motif_dir = args
    registry = load_motif_library(motif_dir) if motif_dir else builtin_registry()
    seed = derive(master_seed, "quartet", index)
    opts = RenderOptions(raster_size=raster_size)
    q = make_quartet(seed, style, registry, config, opts)
    return _quartet_record(q, Path(out_dir), raster_size is not None)


def write_dataset(count: int, styles: tuple[str, ...], master_seed: int, out_dir: str,
                  workers: int = 1, raster_size: Optional[int] = None,
                  config: SamplerConfig = DEFAULT_CONFIG,
                  motif_dir: Optional[str] = None,
                  progress=None) -> DatasetManifest:
    if count < 1:
        raise ValueError("count must be >= 1")
    styles = tuple(sorted(set(styles)))
    if not styles:
        raise ValueError("at least one style required")
    for s in styles:
        if s not in ("mtp", "sfp"):
            raise ValueError(f"unknown style {s!r}")
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create output directory {out_dir!r}: {exc}") from exc

    jobs = [(i, master_seed, styles[i % len(styles)], str(out), raster_size, config, motif_dir)
            for i in range(count)]
    records: list[dict] = []
    if workers <= 1:
        for job in jobs:
            records.append(_dataset_job(job))
            if progress:
                progress(len(records), count)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for record in pool.map(_dataset_job, jobs, chunksize=max(1, count // (workers * 8))):
                records.append(record)
                if progress:
                    progress(len(records), count)

    records.sort(key=lambda r: r["id"])
    manifest_path = out / MANIFEST_NAME
    lines = [json.dumps({k: r[k] for k in MANIFEST_FIELDS}, separators=(", ", ": "))
             for r in records]
    try:
        manifest_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoError(f"failed writing manifest: {exc}") from exc
    return DatasetManifest(manifest_path, tuple(records))


# ---------------------------------------------------------------------------
# Audit


@dataclass(frozen=True)
class AuditReport:
    records: tuple[dict, ...]
    problems: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.problems


def audit_dataset(dataset_dir: str, deep: bool = False) -> AuditReport:
    """Structural audit of a written dataset; deep mode re-checks the edit
    relation from the stored programs (no re-rendering)."""
    root = Path(dataset_dir)
    manifest = root / MANIFEST_NAME
    problems: list[str] = []
    if not manifest.is_file():
        return AuditReport((), (f"missing {MANIFEST_NAME}",))
    records: list[dict] = []
    for ln, line in enumerate(manifest.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            problems.append(f"line {ln}: unparseable record ({exc})")
            continue
        missing = [k for k in MANIFEST_FIELDS if k not in rec]
        if missing:
            problems.append(f"line {ln}: missing fields {missing}")
            continue
        records.append(rec)
    ids = [r["id"] for r in records]
    if len(set(ids)) != len(ids):
        problems.append("duplicate quartet ids")
    if ids != sorted(ids):
        problems.append("manifest records are not sorted by id")
    for rec in records:
        if rec["style"] not in ("mtp", "sfp"):
            problems.append(f"{rec['id']}: unknown style {rec['style']!r}")
        if rec["split"] != split_for(rec["id"]):
            problems.append(f"{rec['id']}: split does not follow the hash rule")
        for key in ("a", "a_prime", "b", "b_prime"):
            path = root / rec[key]
            if not path.is_file() or path.stat().st_size == 0:
                problems.append(f"{rec['id']}: missing or empty {rec[key]}")
        try:
            edit = parse_edit(rec["edit"])
        except SplitWeaveError as exc:
            problems.append(f"{rec['id']}: edit does not parse ({exc})")
            continue
        if deep:
            try:
                progs = {}
                for key in ("a", "a_prime", "b", "b_prime"):
                    sw = (root / rec[key]).with_suffix(".sw")
                    progs[key] = parse(sw.read_text(encoding="utf-8"))
                if not ast_equals(apply_edit(progs["a"], edit), progs["a_prime"]):
                    problems.append(f"{rec['id']}: a' is not apply_edit(a, edit)")
                if not ast_equals(apply_edit(progs["b"], edit), progs["b_prime"]):
                    problems.append(f"{rec['id']}: b' is not apply_edit(b, edit)")
            except (OSError, SplitWeaveError) as exc:
                problems.append(f"{rec['id']}: deep check failed ({exc})")
    return AuditReport(tuple(records), tuple(problems))
