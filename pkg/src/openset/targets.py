"""Training target construction.

Two layouts are supported: the hybrid matrix (one-hot rows for labeled
records, a constant slightly-negative row for unlabeled records) and the
plus-one baseline layout where all unlabeled records share an extra
catch-all class.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .dataset import FeatureSet

# Reserved class name used by the plus-one baseline for its catch-all
# column; like the unlabeled marker, it cannot be a legal class name.
CATCH_ALL = "__CATCH_ALL__"

DEFAULT_NEGATIVE = -0.2


@dataclass
class TargetMatrix:
    """(n_records, n_classes) target values, row order matching the FeatureSet."""

    values: np.ndarray
    class_names: list[str]
    negative_value: float


def build_target_matrix(data: FeatureSet, negative_value: float = DEFAULT_NEGATIVE) -> TargetMatrix:
    """Hybrid targets: one-hot rows for labeled records, constant rows otherwise.

    negative_value defaults to -0.2; 0.0 and 1/n_classes are legal
    alternatives. Exactly 0 or 1 makes the labeled/unlabeled partition
    unrecoverable from the matrix alone, so those values trigger a warning.
    """
    if not np.isfinite(negative_value):
        raise ValueError("negative_value must be finite")
    if data.n_labeled() == 0:
        raise ValueError("need at least one labeled record to build targets")
    if negative_value in (0.0, 1.0):
        warnings.warn(
            f"negative_value={negative_value} makes unlabeled rows indistinguishable "
            "from one-hot rows",
            stacklevel=2,
        )
    index = data.class_index()
    n_classes = len(data.class_names)
    values = np.zeros((len(data.records), n_classes))
    for i, rec in enumerate(data.records):
        if rec.is_labeled:
            j = index.get(rec.label)
            if j is None:
                raise ValueError(
                    f"record {rec.id!r}: label {rec.label!r} missing from class names "
                    "(inconsistent feature set)"
                )
            values[i, j] = 1.0
        else:
            values[i, :] = negative_value
    return TargetMatrix(values=values, class_names=list(data.class_names), negative_value=negative_value)


def build_plus_one_targets(data: FeatureSet) -> TargetMatrix:
    """Baseline targets: unlabeled records become one-hot in an extra catch-all class.

    The resulting matrix has n_classes + 1 columns and is purely one-hot;
    negative_value is recorded as 0.0 since no constant rows exist.
    """
    if data.n_labeled() == 0:
        raise ValueError("need at least one labeled record to build targets")
    index = data.class_index()
    n_classes = len(data.class_names)
    values = np.zeros((len(data.records), n_classes + 1))
    for i, rec in enumerate(data.records):
        if rec.is_labeled:
            j = index.get(rec.label)
            if j is None:
                raise ValueError(
                    f"record {rec.id!r}: label {rec.label!r} missing from class names "
                    "(inconsistent feature set)"
                )
            values[i, j] = 1.0
        else:
            values[i, n_classes] = 1.0
    return TargetMatrix(
        values=values,
        class_names=list(data.class_names) + [CATCH_ALL],
        negative_value=0.0,
    )
