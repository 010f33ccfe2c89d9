"""Rendering of run reports: summary figures, aligned tables, CSV sweeps."""
from __future__ import annotations

import csv
from typing import List, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .metrics import MetricsReport

__all__ = [
    "metrics_text_table",
    "render_detection_figure",
    "write_sweep_csv",
    "render_sweep_figure",
]

_COLUMNS = ("FP", "FN", "OE", "PCC(%)", "KC(%)", "CT(s)")


def _metrics_cells(rep: MetricsReport) -> List[str]:
    return [
        str(rep.fp),
        str(rep.fn),
        str(rep.oe),
        f"{rep.pcc:.2f}",
        f"{rep.kc:.2f}",
        f"{rep.ct_seconds:.2f}",
    ]


def metrics_text_table(rows: Sequence[tuple]) -> str:
    """Aligned text table; rows are (name, MetricsReport or None, note)."""
    header = ["run", *_COLUMNS, "note"]
    body = []
    for name, rep, note in rows:
        cells = _metrics_cells(rep) if rep is not None else ["-"] * len(_COLUMNS)
        body.append([str(name), *cells, note or ""])
    widths = [max(len(r[i]) for r in [header, *body]) for i in range(len(header))]
    lines = []
    for row in [header, *body]:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return "\n".join(lines)


def render_detection_figure(
    image_t1, image_t2, truth, change_map, rep: MetricsReport, path
) -> None:
    """Four-panel overview: both acquisitions, ground truth, detected map."""
    fig, axes = plt.subplots(2, 2, figsize=(8, 8))
    panels = [
        (np.asarray(image_t1), "image t1"),
        (np.asarray(image_t2), "image t2"),
        (np.asarray(truth), "ground truth"),
        (np.asarray(change_map), "change map"),
    ]
    for ax, (img, title) in zip(axes.ravel(), panels):
        ax.imshow(img, cmap="gray", interpolation="nearest")
        ax.set_title(title)
        ax.set_axis_off()
    fig.suptitle(
        f"PCC {rep.pcc:.2f}%   KC {rep.kc:.2f}%   OE {rep.oe}   CT {rep.ct_seconds:.1f}s"
    )
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_sweep_csv(rows: Sequence[dict], path) -> None:
    """One CSV line per sweep row, in input order; failed rows keep their error."""
    fields = [
        "row",
        "name",
        "lambda_k",
        "lambda_b",
        "lambda_c",
        "P",
        "N",
        "order",
        "rule",
        "fp",
        "fn",
        "oe",
        "pcc",
        "kc",
        "ct_seconds",
        "error",
    ]
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def render_sweep_figure(rows: Sequence[dict], path) -> None:
    """PCC/KC bars per sweep row; failed rows appear as gaps."""
    names = [str(r.get("name", r["row"])) for r in rows]
    pcc = [r.get("pcc") if r.get("pcc") is not None else np.nan for r in rows]
    kc = [r.get("kc") if r.get("kc") is not None else np.nan for r in rows]
    x = np.arange(len(rows))
    fig, ax = plt.subplots(figsize=(max(6, 1.2 * len(rows)), 4))
    ax.bar(x - 0.2, pcc, width=0.4, label="PCC (%)")
    ax.bar(x + 0.2, kc, width=0.4, label="KC (%)")
    ax.set_xticks(x)
    ax.set_xticklabels(names, rotation=30, ha="right")
    ax.set_ylim(0, 105)
    ax.set_ylabel("percent")
    ax.legend()
    ax.set_title("sweep results")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
