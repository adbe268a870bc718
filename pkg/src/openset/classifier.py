"""Scoring and the open-set decision rule.

An image is scored against every class (raw linear scores, no softmax),
assigned to the argmax class, and then tested against that class's
rejection threshold: below it the verdict is Irrelevant.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .dataset import FeatureSet
from .trainer import ClassifierModel

if TYPE_CHECKING:
    from .roc import ThresholdSet

# Verdict label used in decision dumps for rejected images.
IRRELEVANT_VERDICT = "Irrelevant"


@dataclass
class ScoreVector:
    """Per-class scores for one image; ties break to the smallest class index."""

    record_id: str
    scores: np.ndarray
    top_class: int
    top_score: float


@dataclass
class Decision:
    """Outcome for one image: accepted into a class, or rejected as irrelevant."""

    record_id: str
    relevant: bool
    class_name: str | None  # set when relevant
    top_class: int
    top_score: float
    threshold: float

    @property
    def verdict(self) -> str:
        return self.class_name if self.relevant else IRRELEVANT_VERDICT


def score(model: ClassifierModel, features, record_id: str = "") -> ScoreVector:
    """Raw linear scores features @ weights; argmax ties go to the first index."""
    f = np.asarray(features, dtype=np.float64)
    if f.shape != (model.dim,):
        raise ValueError(
            f"feature vector has {f.size} entries, model expects {model.dim}"
        )
    s = f @ model.weights
    top = int(np.argmax(s))
    return ScoreVector(record_id=record_id, scores=s, top_class=top, top_score=float(s[top]))


def decide(sv: ScoreVector, thresholds: "ThresholdSet") -> Decision:
    """Apply the winning class's threshold: score >= threshold keeps the class."""
    if sv.top_class >= len(thresholds.class_names):
        raise ValueError(
            f"no threshold for class index {sv.top_class} "
            f"(threshold set covers {len(thresholds.class_names)} classes)"
        )
    cutoff = thresholds.values[sv.top_class]
    relevant = sv.top_score >= cutoff
    return Decision(
        record_id=sv.record_id,
        relevant=relevant,
        class_name=thresholds.class_names[sv.top_class] if relevant else None,
        top_class=sv.top_class,
        top_score=sv.top_score,
        threshold=cutoff,
    )


def classify_set(
    model: ClassifierModel, data: FeatureSet, thresholds: "ThresholdSet"
) -> list[Decision]:
    """One decision per record, in input order."""
    if list(thresholds.class_names) != list(model.class_names):
        raise ValueError(
            "threshold set was calibrated for different classes than the model"
        )
    decisions = []
    for rec in data.records:
        try:
            sv = score(model, rec.features, record_id=rec.id)
            decisions.append(decide(sv, thresholds))
        except ValueError as exc:
            raise ValueError(f"record {rec.id!r}: {exc}") from exc
    return decisions


def write_decisions(decisions: list[Decision], path) -> None:
    """CSV dump: id,verdict,top_class,top_score,threshold."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "verdict", "top_class", "top_score", "threshold"])
        for dec in decisions:
            writer.writerow(
                [dec.record_id, dec.verdict, dec.top_class, repr(dec.top_score), repr(dec.threshold)]
            )
