"""Per-class score pools, ROC curves, and rejection-threshold selection.

Thresholds are calibrated on the training set only. For each class the
pool of candidate scores splits into positives (correctly argmaxed images
of that class) and negatives (unlabeled images argmaxed into it); the ROC
curve sweeps every distinct score as a threshold and the selection
strategies pick an operating point on it.
"""
from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .classifier import score
from .dataset import UNLABELED, FeatureSet
from .trainer import ClassifierModel

STRATEGIES = ("normal", "roc_optimal", "roc_constrained", "none")


class EmptyPoolError(ValueError):
    """A pool side required by the computation has no scores."""


@dataclass
class ClassScorePool:
    """Training scores feeding one class's calibration.

    positives: scores (at this class) of labeled images whose true label is
    this class and whose argmax is this class. negatives: scores of
    unlabeled images whose argmax is this class. Every training image lands
    in at most one pool, keyed by its argmax.
    """

    class_index: int
    positives: list[float] = field(default_factory=list)
    negatives: list[float] = field(default_factory=list)


@dataclass(frozen=True)
class RocPoint:
    threshold: float
    trr: float
    frr: float


@dataclass
class RocCurve:
    """Points in descending-threshold order, so TRR and FRR are non-decreasing."""

    class_index: int
    points: list[RocPoint]
    auc: float


@dataclass
class ThresholdSet:
    """One rejection threshold per model class, plus how each was chosen."""

    class_names: list[str]
    values: list[float]
    strategy: str
    constraint: float | None = None
    provenance: dict[str, dict] = field(default_factory=dict)

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if len(self.values) != len(self.class_names):
            raise ValueError("one threshold per class required")

    @classmethod
    def disabled(cls, class_names: list[str]) -> "ThresholdSet":
        """No rejection: every score passes (threshold -inf for every class)."""
        return cls(
            class_names=list(class_names),
            values=[-math.inf] * len(class_names),
            strategy="none",
        )


def collect_pools(model: ClassifierModel, train_data: FeatureSet) -> list[ClassScorePool]:
    """Score the training set and split it into per-class pools by argmax."""
    index = {name: j for j, name in enumerate(model.class_names)}
    pools = [ClassScorePool(class_index=j) for j in range(len(model.class_names))]
    for rec in train_data.records:
        sv = score(model, rec.features, record_id=rec.id)
        c = sv.top_class
        if rec.label == UNLABELED:
            pools[c].negatives.append(sv.top_score)
        elif index.get(rec.label) == c:
            pools[c].positives.append(sv.top_score)
        # a labeled image argmaxed into the wrong class joins no pool
    return pools


def trr_frr(tp: int, fn: int, fp: int, tn: int) -> tuple[float, float]:
    """True/false relevant rates from confusion counts; empty denominators give 0."""
    if min(tp, fn, fp, tn) < 0:
        raise ValueError("confusion counts must be non-negative")
    trr = tp / (tp + fn) if tp + fn else 0.0
    frr = fp / (fp + tn) if fp + tn else 0.0
    return trr, frr


def build_roc(pool: ClassScorePool) -> RocCurve:
    """ROC over every candidate threshold.

    Candidates are the distinct pooled scores plus one sentinel above the
    maximum (the reject-everything point), so the curve always contains
    (TRR, FRR) = (0, 0) and (1, 1). The AUC is the trapezoidal area over
    the FRR-sorted points, accumulated in integer counts so it agrees
    exactly with tie-aware positive/negative pair counting.
    """
    if not pool.positives:
        raise EmptyPoolError(f"class {pool.class_index}: no positive scores")
    if not pool.negatives:
        raise EmptyPoolError(f"class {pool.class_index}: no negative scores")
    pos = np.sort(np.asarray(pool.positives, dtype=np.float64))
    neg = np.sort(np.asarray(pool.negatives, dtype=np.float64))
    candidates = np.unique(np.concatenate([pos, neg]))
    candidates = np.append(candidates, candidates[-1] + 1.0)

    points: list[RocPoint] = []
    counts: list[tuple[int, int]] = []  # (fp, tp) per point, threshold descending
    for t in candidates[::-1]:
        tp = int(pos.size - np.searchsorted(pos, t, side="left"))
        fp = int(neg.size - np.searchsorted(neg, t, side="left"))
        fn = int(pos.size) - tp
        tn = int(neg.size) - fp
        rate_t, rate_f = trr_frr(tp, fn, fp, tn)
        points.append(RocPoint(threshold=float(t), trr=rate_t, frr=rate_f))
        counts.append((fp, tp))

    area2 = 0
    for (fp0, tp0), (fp1, tp1) in zip(counts, counts[1:]):
        area2 += (fp1 - fp0) * (tp1 + tp0)
    auc = area2 / (2 * int(pos.size) * int(neg.size))
    return RocCurve(class_index=pool.class_index, points=points, auc=auc)


def normal_threshold(pool: ClassScorePool) -> float:
    """The lowest correctly classified positive score; every positive passes it."""
    if not pool.positives:
        raise EmptyPoolError(f"class {pool.class_index}: no positive scores")
    return min(pool.positives)


def roc_threshold(curve: RocCurve, constraint: float | None = None) -> tuple[float, RocPoint]:
    """Operating point maximizing TRR - FRR (furthest from the chance diagonal).

    With a constraint q, only points with TRR >= q are considered. Ties
    break to higher TRR, then to the lower threshold. Returns
    (threshold, chosen point).
    """
    points = curve.points
    if constraint is not None:
        if not (0.0 <= constraint <= 1.0):
            raise ValueError("constraint must lie in [0, 1]")
        feasible = [p for p in points if p.trr >= constraint]
        if not feasible:
            best = max(p.trr for p in points)
            raise ValueError(
                f"no ROC point reaches TRR >= {constraint}; max achievable TRR is {best}"
            )
        points = feasible
    chosen = max(points, key=lambda p: (p.trr - p.frr, p.trr, -p.threshold))
    return chosen.threshold, chosen


def _fallback_for_unwon_class(
    model: ClassifierModel, train_data: FeatureSet, class_index: int
) -> tuple[float, str]:
    # No correctly argmaxed training image exists for this class: fall back
    # to the lowest score (at this class) over its true-label images, and if
    # none exist either, make the class unclaimable.
    name = model.class_names[class_index]
    column = model.weights[:, class_index]
    scores = [
        float(rec.features @ column)
        for rec in train_data.records
        if rec.label == name
    ]
    if scores:
        return min(scores), "min_true_class_score"
    return math.inf, "unclaimable"


def calibrate_detailed(
    model: ClassifierModel,
    train_data: FeatureSet,
    strategy: str,
    q: float | None = None,
) -> tuple[ThresholdSet, dict[str, RocCurve]]:
    """calibrate() plus the per-class ROC curves that were actually built."""
    if strategy not in ("normal", "roc_optimal", "roc_constrained"):
        raise ValueError(f"unknown calibration strategy {strategy!r}")
    if strategy == "roc_constrained":
        if q is None:
            raise ValueError("roc_constrained needs a TRR constraint")
        if not (0.0 <= q <= 1.0):
            raise ValueError("constraint must lie in [0, 1]")
    elif q is not None:
        raise ValueError(f"strategy {strategy!r} takes no constraint")

    pools = collect_pools(model, train_data)
    values: list[float] = []
    provenance: dict[str, dict] = {}
    curves: dict[str, RocCurve] = {}

    for j, name in enumerate(model.class_names):
        pool = pools[j]
        info: dict = {}
        if not pool.positives:
            value, source = _fallback_for_unwon_class(model, train_data, j)
        elif strategy == "normal" or not pool.negatives:
            value = normal_threshold(pool)
            source = "normal" if strategy == "normal" else "normal_no_negatives"
        else:
            curve = build_roc(pool)
            curves[name] = curve
            value, point = roc_threshold(
                curve, q if strategy == "roc_constrained" else None
            )
            # The optimum searches a candidate set containing the normal
            # threshold, so its objective can never fall below that point's.
            floor = normal_threshold(pool)
            at_floor = next(p for p in curve.points if p.threshold == floor)
            assert (point.trr - point.frr) >= (at_floor.trr - at_floor.frr)
            source = "roc"
            info["chosen_point"] = {"threshold": point.threshold, "trr": point.trr, "frr": point.frr}
            info["auc"] = curve.auc
        info["source"] = source
        info["n_positives"] = len(pool.positives)
        info["n_negatives"] = len(pool.negatives)
        values.append(value)
        provenance[name] = info

    thresholds = ThresholdSet(
        class_names=list(model.class_names),
        values=values,
        strategy=strategy,
        constraint=q,
        provenance=provenance,
    )
    return thresholds, curves


def calibrate(
    model: ClassifierModel,
    train_data: FeatureSet,
    strategy: str,
    q: float | None = None,
) -> ThresholdSet:
    """Pick one rejection threshold per class from training scores.

    strategy "normal" takes each class's lowest correct positive score;
    "roc_optimal" maximizes TRR - FRR on the class's ROC curve;
    "roc_constrained" does the same subject to training TRR >= q. Classes
    with no negatives fall back to the normal threshold; classes that never
    win an argmax fall back to the lowest true-class score, or +inf when no
    evidence exists at all.
    """
    thresholds, _ = calibrate_detailed(model, train_data, strategy, q)
    return thresholds


def _encode_value(v: float):
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _decode_value(v) -> float:
    if isinstance(v, str):
        return float(v)
    return float(v)


def save_thresholds(thresholds: ThresholdSet, path) -> None:
    """Write the threshold set as strict JSON (infinities become strings)."""
    doc = {
        "strategy": thresholds.strategy,
        "constraint": thresholds.constraint,
        "classes": [
            {
                "name": name,
                "threshold": _encode_value(value),
                **thresholds.provenance.get(name, {}),
            }
            for name, value in zip(thresholds.class_names, thresholds.values)
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_thresholds(path) -> ThresholdSet:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    names, values, provenance = [], [], {}
    for entry in doc["classes"]:
        names.append(entry["name"])
        values.append(_decode_value(entry["threshold"]))
        provenance[entry["name"]] = {
            k: v for k, v in entry.items() if k not in ("name", "threshold")
        }
    return ThresholdSet(
        class_names=names,
        values=values,
        strategy=doc["strategy"],
        constraint=doc.get("constraint"),
        provenance=provenance,
    )


def _safe_name(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", name)


def write_roc_dumps(
    curves: dict[str, RocCurve],
    class_names: list[str],
    out_dir,
) -> list[Path]:
    """Write one CSV per class with a curve, plus a per-class AUC summary.

    Point files carry the header class,threshold,trr,frr; summary.csv has
    one line per model class with the AUC column empty when no curve was
    built (fallback classes). Returns the written paths.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for j, name in enumerate(class_names):
        curve = curves.get(name)
        if curve is None:
            continue
        path = out / f"roc_{j:03d}_{_safe_name(name)}.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["class", "threshold", "trr", "frr"])
            for p in curve.points:
                writer.writerow([name, repr(p.threshold), repr(p.trr), repr(p.frr)])
        written.append(path)
    summary = out / "summary.csv"
    with open(summary, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["class", "auc"])
        for name in class_names:
            curve = curves.get(name)
            writer.writerow([name, repr(curve.auc) if curve is not None else ""])
    written.append(summary)
    return written
