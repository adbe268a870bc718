"""Matplotlib renderers for the report path.

Figures are written next to the delimited/JSON outputs: ROC curves per
class (with the chance diagonal and AUC legend), per-class accuracy bars
for an evaluation report, and grouped accuracy bars for a method
comparison. PNG metadata is stripped so identical runs produce identical
bytes.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .harness import ComparisonTable, EvalReport
from .roc import RocCurve

_SAVE_KW = {"dpi": 150, "metadata": {"Software": None}}


def plot_roc_curves(curves: dict[str, RocCurve], path) -> Path:
    """All per-class ROC curves on one axes, FRR against TRR."""
    fig, ax = plt.subplots(figsize=(6.4, 5.6))
    ax.plot([0, 1], [0, 1], "--", color="0.6", lw=1, label="random guess")
    for name in sorted(curves):
        curve = curves[name]
        frr = [p.frr for p in curve.points]
        trr = [p.trr for p in curve.points]
        ax.plot(frr, trr, lw=1.6, label=f"{name} (AUC={curve.auc:.3f})")
    ax.set_xlabel("False Relevant Rate")
    ax.set_ylabel("True Relevant Rate")
    ax.set_xlim(-0.02, 1.02)
    ax.set_ylim(-0.02, 1.02)
    ax.set_title("Per-class ROC (training scores)")
    ax.legend(fontsize=7, loc="lower right")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path


def plot_report(report: EvalReport, path) -> Path:
    """Per-class accuracy bars for one evaluation report."""
    names = sorted(report.per_class)
    fracs = []
    for name in names:
        slot = report.per_class[name]
        fracs.append(slot["correct"] / slot["total"] if slot["total"] else 0.0)
    fig, ax = plt.subplots(figsize=(max(6.0, 0.45 * len(names) + 2.0), 4.0))
    ax.bar(range(len(names)), fracs, color="#4878cf")
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=60, ha="right", fontsize=7)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("accuracy")
    ax.set_title(
        f"{report.method}: R={report.relevant_accuracy:.3f} "
        f"I={report.irrelevant_accuracy:.3f} cum={report.cumulative_accuracy:.3f}"
    )
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path


def plot_comparison(table: ComparisonTable, path) -> Path:
    """Grouped R / I / cumulative accuracy bars, one group per method."""
    methods = [r.method for r in table.rows]
    groups = [
        ("relevant", [r.relevant_accuracy for r in table.rows], "#4878cf"),
        ("irrelevant", [r.irrelevant_accuracy for r in table.rows], "#d1022f"),
        ("cumulative", [r.cumulative_accuracy for r in table.rows], "#6acc64"),
    ]
    width = 0.27
    fig, ax = plt.subplots(figsize=(1.9 * max(len(methods), 2) + 1.5, 4.2))
    for k, (label, vals, color) in enumerate(groups):
        xs = [i + (k - 1) * width for i in range(len(methods))]
        ax.bar(xs, vals, width=width, label=label, color=color)
    ax.set_xticks(range(len(methods)))
    ax.set_xticklabels(methods, fontsize=8)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("accuracy")
    ax.set_title("Method comparison")
    ax.legend(fontsize=8)
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path
