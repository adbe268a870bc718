"""End-to-end evaluation and baseline comparison.

Accuracy accounting: a relevant validation image counts as correct only
when it is accepted into its true class; an unlabeled one only when it is
rejected. The comparison harness runs the thresholded head (normal and
ROC thresholds), the plus-one baseline (rejection by argmax into a
catch-all class) and the labeled-only baseline on one shared train/val
pair.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .classifier import classify_set, score
from .dataset import UNLABELED, FeatureSet
from .roc import ThresholdSet, calibrate
from .targets import CATCH_ALL, DEFAULT_NEGATIVE, build_plus_one_targets, build_target_matrix
from .trainer import ClassifierModel, TrainConfig, train_model


@dataclass
class PipelineConfig:
    """Everything needed to train and evaluate one head."""

    train: TrainConfig = field(default_factory=TrainConfig)
    negative_value: float = DEFAULT_NEGATIVE


@dataclass
class EvalReport:
    method: str
    relevant_accuracy: float
    irrelevant_accuracy: float
    cumulative_accuracy: float
    per_class: dict[str, dict[str, int]]
    config: dict
    relevant_vacuous: bool = False  # no relevant records; accuracy reported as 1.0
    irrelevant_vacuous: bool = False

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "relevant_accuracy": self.relevant_accuracy,
            "irrelevant_accuracy": self.irrelevant_accuracy,
            "cumulative_accuracy": self.cumulative_accuracy,
            "relevant_vacuous": self.relevant_vacuous,
            "irrelevant_vacuous": self.irrelevant_vacuous,
            "per_class": self.per_class,
            "config": self.config,
        }


@dataclass
class ComparisonTable:
    rows: list[EvalReport]
    dataset: dict
    failures: dict[str, str] = field(default_factory=dict)

    def row(self, method: str) -> EvalReport:
        for r in self.rows:
            if r.method == method:
                return r
        raise KeyError(method)

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "rows": [r.to_dict() for r in self.rows],
            "failures": self.failures,
        }


def _tally(per_class: dict, label: str, correct: bool) -> None:
    slot = per_class.setdefault(label, {"correct": 0, "total": 0})
    slot["total"] += 1
    slot["correct"] += int(correct)


def _finish_report(
    method: str,
    per_class: dict,
    rel_correct: int,
    rel_total: int,
    irr_correct: int,
    irr_total: int,
    config: dict,
) -> EvalReport:
    total = rel_total + irr_total
    return EvalReport(
        method=method,
        relevant_accuracy=rel_correct / rel_total if rel_total else 1.0,
        irrelevant_accuracy=irr_correct / irr_total if irr_total else 1.0,
        cumulative_accuracy=(rel_correct + irr_correct) / total,
        per_class=per_class,
        config=config,
        relevant_vacuous=rel_total == 0,
        irrelevant_vacuous=irr_total == 0,
    )


def evaluate(
    model: ClassifierModel,
    thresholds: ThresholdSet,
    val_data: FeatureSet,
    method: str = "threshold_eval",
) -> EvalReport:
    """Classify a validation set and compute the accuracy breakdown.

    Ground truth comes from the label column: a class name means relevant,
    the unlabeled marker means irrelevant. A relevant record accepted into
    the wrong class is an error even though it passed a threshold. Vacuous
    accuracies (zero-denominator groups) are reported as 1.0 with a flag.
    """
    if not val_data.records:
        raise ValueError("validation set is empty")
    decisions = classify_set(model, val_data, thresholds)
    per_class: dict[str, dict[str, int]] = {}
    rel_correct = rel_total = irr_correct = irr_total = 0
    for rec, dec in zip(val_data.records, decisions):
        if rec.label == UNLABELED:
            irr_total += 1
            good = not dec.relevant
            irr_correct += int(good)
        else:
            rel_total += 1
            good = dec.relevant and dec.class_name == rec.label
            rel_correct += int(good)
        _tally(per_class, rec.label, good)
    config = {
        "negative_value": model.train_meta.get("negative_value"),
        "strategy": thresholds.strategy,
        "constraint": thresholds.constraint,
        "seed": model.train_meta.get("config", {}).get("seed"),
    }
    return _finish_report(
        method, per_class, rel_correct, rel_total, irr_correct, irr_total, config
    )


def run_only_labeled(
    train: FeatureSet, val: FeatureSet, cfg: PipelineConfig
) -> EvalReport:
    """Baseline: train on the labeled records only, reject with normal thresholds."""
    labeled = train.labeled_subset()
    if not labeled.records:
        raise ValueError("training set has no labeled records")
    targets = build_target_matrix(labeled, cfg.negative_value)
    model = train_model(labeled, targets, cfg.train)
    thresholds = calibrate(model, labeled, "normal")
    return evaluate(model, thresholds, val, method="only_labeled")


def run_plus_one(train: FeatureSet, val: FeatureSet, cfg: PipelineConfig) -> EvalReport:
    """Baseline: unlabeled records pooled into one extra class, rejection by argmax.

    No thresholds are involved: a validation image is irrelevant exactly
    when the catch-all column wins the argmax.
    """
    if not val.records:
        raise ValueError("validation set is empty")
    targets = build_plus_one_targets(train)
    model = train_model(train, targets, cfg.train)
    catch_index = len(model.class_names) - 1
    index = {name: j for j, name in enumerate(model.class_names)}

    per_class: dict[str, dict[str, int]] = {}
    rel_correct = rel_total = irr_correct = irr_total = 0
    for rec in val.records:
        sv = score(model, rec.features, record_id=rec.id)
        if rec.label == UNLABELED:
            irr_total += 1
            good = sv.top_class == catch_index
            irr_correct += int(good)
        else:
            rel_total += 1
            good = sv.top_class == index.get(rec.label, -1)
            rel_correct += int(good)
        _tally(per_class, rec.label, good)
    config = {
        "negative_value": None,
        "strategy": "argmax_plus_one",
        "constraint": None,
        "seed": cfg.train.seed,
        "catch_all": CATCH_ALL,
    }
    return _finish_report(
        "plus_one", per_class, rel_correct, rel_total, irr_correct, irr_total, config
    )


def run_comparison(
    train: FeatureSet,
    val: FeatureSet,
    cfg: PipelineConfig,
    q: float | None = None,
) -> ComparisonTable:
    """Evaluate the four methods on one shared train/val pair.

    Rows: our_method (normal threshold), our_method_roc (ROC-optimal, or
    TRR-constrained when q is given), plus_one, only_labeled. A row that
    fails is recorded under failures and the others are still produced.
    """
    dataset = {
        "train_records": len(train),
        "train_labeled": train.n_labeled(),
        "train_unlabeled": train.n_unlabeled(),
        "val_records": len(val),
        "classes": len(train.class_names),
        "dim": train.dim,
    }
    rows: list[EvalReport] = []
    failures: dict[str, str] = {}

    model = None
    try:
        targets = build_target_matrix(train, cfg.negative_value)
        model = train_model(train, targets, cfg.train)
    except Exception as exc:
        failures["our_method"] = str(exc)
        failures["our_method_roc"] = str(exc)

    if model is not None:
        try:
            thresholds = calibrate(model, train, "normal")
            report = evaluate(model, thresholds, val, method="our_method")
            rows.append(report)
        except Exception as exc:
            failures["our_method"] = str(exc)
        try:
            if q is None:
                thresholds = calibrate(model, train, "roc_optimal")
            else:
                thresholds = calibrate(model, train, "roc_constrained", q)
            report = evaluate(model, thresholds, val, method="our_method_roc")
            rows.append(report)
        except Exception as exc:
            failures["our_method_roc"] = str(exc)

    try:
        rows.append(run_plus_one(train, val, cfg))
    except Exception as exc:
        failures["plus_one"] = str(exc)
    try:
        rows.append(run_only_labeled(train, val, cfg))
    except Exception as exc:
        failures["only_labeled"] = str(exc)

    return ComparisonTable(rows=rows, dataset=dataset, failures=failures)


def save_report(report: EvalReport, path) -> None:
    Path(path).write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")


def save_table(table: ComparisonTable, path) -> None:
    Path(path).write_text(json.dumps(table.to_dict(), indent=2) + "\n", encoding="utf-8")
