"""Evaluation reports: delimited per-frame rows plus rendered figures.

Writes a CSV next to three PNG charts (latency breakdown, accuracy by
perturbation tag, IoU distribution) so a run can be inspected without
re-executing it.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .evaluate import EvalSummary, FrameScore
from .pipeline import STAGE_NAMES

REPORT_CSV = "report.csv"
LATENCY_PNG = "latency.png"
ACCURACY_PNG = "accuracy.png"
IOU_PNG = "iou.png"


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def write_csv(summary: EvalSummary, path: Path) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "file", "true_plate", "read_plate", "exact",
                         "char_matches", "char_total", "iou", "total_ms",
                         *(f"{s}_ms" for s in STAGE_NAMES), "tags"])
        for r in summary.rows:
            writer.writerow([
                r.index, r.file, r.true_plate, r.read_plate or "", int(r.exact),
                r.char_matches, r.char_total, f"{r.iou:.4f}", f"{r.total_ms:.3f}",
                *(f"{r.timings_ms.get(s, 0.0):.3f}" for s in STAGE_NAMES),
                "|".join(r.tags),
            ])


def _tag_groups(rows: list[FrameScore]) -> dict[str, list[FrameScore]]:
    groups: dict[str, list[FrameScore]] = {}
    for r in rows:
        for tag in (r.tags or ["clean"]):
            groups.setdefault(tag, []).append(r)
    return groups


def render_latency_figure(summary: EvalSummary, path: Path) -> None:
    plt = _pyplot()
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(10, 4))
    ax0.hist([r.total_ms for r in summary.rows], bins=30, color="steelblue")
    ax0.axvline(summary.mean_latency_ms, color="crimson", linestyle="--",
                label=f"mean {summary.mean_latency_ms:.1f} ms")
    ax0.axvline(summary.p95_latency_ms, color="darkorange", linestyle=":",
                label=f"p95 {summary.p95_latency_ms:.1f} ms")
    ax0.set_xlabel("frame latency (ms)")
    ax0.set_ylabel("frames")
    ax0.legend()
    ax1.bar(range(len(STAGE_NAMES)), [summary.stage_mean_ms[s] for s in STAGE_NAMES],
            color="slategray")
    ax1.set_xticks(range(len(STAGE_NAMES)), STAGE_NAMES, rotation=45, ha="right")
    ax1.set_ylabel("mean ms")
    ax1.set_title("per-stage mean latency")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def render_accuracy_figure(summary: EvalSummary, path: Path) -> None:
    plt = _pyplot()
    groups = _tag_groups(summary.rows)
    names = sorted(groups)
    rates = [sum(r.exact for r in groups[k]) / len(groups[k]) for k in names]
    counts = [len(groups[k]) for k in names]
    fig, ax = plt.subplots(figsize=(7, 4))
    bars = ax.bar(range(len(names)), rates, color="seagreen")
    for bar, count in zip(bars, counts):
        ax.text(bar.get_x() + bar.get_width() / 2, bar.get_height(), f"n={count}",
                ha="center", va="bottom", fontsize=8)
    ax.set_xticks(range(len(names)), names)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("plate exact rate")
    ax.set_title(f"exact rate by tag (overall {summary.plate_exact_rate:.3f})")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def render_iou_figure(summary: EvalSummary, path: Path) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist([r.iou for r in summary.rows], bins=np.linspace(0, 1, 26), color="mediumpurple")
    ax.axvline(summary.localization_iou_mean, color="crimson", linestyle="--",
               label=f"mean {summary.localization_iou_mean:.3f}")
    ax.set_xlabel("localization IoU")
    ax.set_ylabel("frames")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def write_report(summary: EvalSummary, out_dir: str | Path) -> list[Path]:
    """CSV plus figures into out_dir; returns the files written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = [out / REPORT_CSV, out / LATENCY_PNG, out / ACCURACY_PNG, out / IOU_PNG]
    write_csv(summary, files[0])
    render_latency_figure(summary, files[1])
    render_accuracy_figure(summary, files[2])
    render_iou_figure(summary, files[3])
    return files
