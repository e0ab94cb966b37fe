"""Dataset report: audit + delimited summary + matplotlib figures.

Writes summary.csv next to three PNG figures (style counts, edit-kind
counts, SVG file sizes) for a quick visual sanity check of a generated
dataset.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .edits import parse_edit  # noqa: E402
from .errors import SplitWeaveError  # noqa: E402
from .quartets import AuditReport, audit_dataset  # noqa: E402


@dataclass(frozen=True)
class ReportResult:
    audit: AuditReport
    outputs: tuple[Path, ...]


def _bar_figure(path: Path, counts: Counter, title: str, xlabel: str):
    fig, ax = plt.subplots(figsize=(6, 4))
    keys = sorted(counts)
    ax.bar(range(len(keys)), [counts[k] for k in keys], color="#4C72B0")
    ax.set_xticks(range(len(keys)))
    ax.set_xticklabels(keys, rotation=30, ha="right")
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("quartets")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def _hist_figure(path: Path, values: list[int], title: str):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist([v / 1024 for v in values], bins=30, color="#55A868")
    ax.set_title(title)
    ax.set_xlabel("SVG size (KiB)")
    ax.set_ylabel("files")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def write_report(dataset_dir: str, out_dir: str, deep: bool = False) -> ReportResult:
    audit = audit_dataset(dataset_dir, deep=deep)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    root = Path(dataset_dir)

    styles = Counter(r["style"] for r in audit.records)
    splits = Counter(r["split"] for r in audit.records)
    edit_kinds: Counter = Counter()
    targets: Counter = Counter()
    sizes: list[int] = []
    for rec in audit.records:
        try:
            e = parse_edit(rec["edit"])
            edit_kinds[e.kind] += 1
            targets[e.selector.target] += 1
        except SplitWeaveError:
            pass
        for key in ("a", "a_prime", "b", "b_prime"):
            p = root / rec[key]
            if p.is_file():
                sizes.append(p.stat().st_size)

    summary = out / "summary.csv"
    with summary.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["section", "key", "count"])
        writer.writerow(["total", "quartets", len(audit.records)])
        writer.writerow(["total", "problems", len(audit.problems)])
        for k in sorted(styles):
            writer.writerow(["style", k, styles[k]])
        for k in sorted(splits):
            writer.writerow(["split", k, splits[k]])
        for k in sorted(edit_kinds):
            writer.writerow(["edit_kind", k, edit_kinds[k]])
        for k in sorted(targets):
            writer.writerow(["edit_target", k, targets[k]])

    outputs = [summary]
    if audit.records:
        fig1 = out / "styles.png"
        _bar_figure(fig1, styles, "Quartets per style", "style")
        fig2 = out / "edit_kinds.png"
        _bar_figure(fig2, edit_kinds, "Edit kinds", "kind")
        fig3 = out / "file_sizes.png"
        _hist_figure(fig3, sizes, "Pattern file sizes")
        outputs += [fig1, fig2, fig3]
    return ReportResult(audit, tuple(outputs))
