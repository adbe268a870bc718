"""Feature-vector corpora: CSV ingest, per-image normalization, synthetic generation.

A corpus is an ordered list of records, each holding an image id, a label
(class name or the reserved unlabeled marker) and a D-dimensional feature
vector. Vectors are min-max normalized per image on ingest, so everything
downstream sees values in [0, 1].
"""
from __future__ import annotations

from dataclasses import dataclass

import csv
import numpy as np

from .prng import SplitMix64

# Reserved label for images that belong to none of the known classes.
# Class names may not carry leading/trailing whitespace, so this string
# can never collide with a real class.
UNLABELED = "__UNLABELED__"


def normalize_features(raw) -> np.ndarray:
    """Min-max normalize one feature vector into [0, 1].

    A constant vector has no range to stretch and maps to all zeros
    instead of dividing by zero.
    """
    vec = np.asarray(raw, dtype=np.float64)
    if vec.ndim != 1 or vec.size < 1:
        raise ValueError("feature vector must be 1-D and non-empty")
    bad = np.flatnonzero(~np.isfinite(vec))
    if bad.size:
        raise ValueError(f"non-finite feature value at index {bad[0]}")
    lo = float(vec.min())
    hi = float(vec.max())
    if hi == lo:
        return np.zeros_like(vec)
    return (vec - lo) / (hi - lo)


def _check_label(label: str, where: str) -> None:
    if label == UNLABELED:
        return
    if not label:
        raise ValueError(f"{where}: empty label")
    if "," in label:
        raise ValueError(f"{where}: label {label!r} contains a comma")
    if label != label.strip():
        raise ValueError(f"{where}: label {label!r} has leading/trailing whitespace")


@dataclass(frozen=True, eq=False)
class FeatureRecord:
    """One image: id, label (class name or UNLABELED), normalized features."""

    id: str
    label: str
    features: np.ndarray

    @property
    def is_labeled(self) -> bool:
        return self.label != UNLABELED


@dataclass
class FeatureSet:
    """Ordered collection of records sharing one feature dimension.

    class_names is deduplicated in order of first appearance and never
    contains the unlabeled marker. Treat instances as immutable once built.
    """

    records: list[FeatureRecord]
    dim: int
    class_names: list[str]

    @classmethod
    def from_records(cls, records: list[FeatureRecord], dim: int | None = None) -> "FeatureSet":
        if dim is None:
            if not records:
                raise ValueError("cannot infer dim from an empty record list")
            dim = int(records[0].features.size)
        names: list[str] = []
        seen = set()
        for rec in records:
            if rec.features.size != dim:
                raise ValueError(
                    f"record {rec.id!r}: feature length {rec.features.size} != dim {dim}"
                )
            if rec.is_labeled and rec.label not in seen:
                seen.add(rec.label)
                names.append(rec.label)
        return cls(records=records, dim=dim, class_names=names)

    def __len__(self) -> int:
        return len(self.records)

    def feature_matrix(self) -> np.ndarray:
        """Records stacked as an (n_records, dim) array."""
        if not self.records:
            return np.zeros((0, self.dim))
        return np.stack([rec.features for rec in self.records])

    def class_index(self) -> dict[str, int]:
        return {name: j for j, name in enumerate(self.class_names)}

    def labeled_subset(self) -> "FeatureSet":
        """The labeled records only; class ordering is preserved."""
        kept = [rec for rec in self.records if rec.is_labeled]
        return FeatureSet.from_records(kept, dim=self.dim)

    def n_labeled(self) -> int:
        return sum(1 for rec in self.records if rec.is_labeled)

    def n_unlabeled(self) -> int:
        return len(self.records) - self.n_labeled()


def load_feature_set(path) -> FeatureSet:
    """Read a feature CSV and normalize every row's features.

    Expected layout: header ``id,label,f0,...,f{D-1}``, then one record per
    line. The label column holds a class name or the unlabeled marker.
    Ragged rows, non-numeric or non-finite feature cells, bad labels and
    duplicate ids are rejected with the offending row number.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty file, expected a header row")
        if len(header) < 3 or header[0] != "id" or header[1] != "label":
            raise ValueError(f"{path}: bad header, expected id,label,f0,...")
        dim = len(header) - 2
        expected = [f"f{i}" for i in range(dim)]
        if header[2:] != expected:
            raise ValueError(f"{path}: feature columns must be named f0..f{dim - 1}")

        records: list[FeatureRecord] = []
        seen_ids: set[str] = set()
        for row_num, row in enumerate(reader, start=2):
            if len(row) != dim + 2:
                raise ValueError(
                    f"{path}: row {row_num}: expected {dim + 2} cells, got {len(row)}"
                )
            rid, label = row[0], row[1]
            if not rid:
                raise ValueError(f"{path}: row {row_num}: empty id")
            if rid in seen_ids:
                raise ValueError(f"{path}: row {row_num}: duplicate id {rid!r}")
            seen_ids.add(rid)
            _check_label(label, f"{path}: row {row_num}")
            try:
                values = [float(cell) for cell in row[2:]]
            except ValueError:
                raise ValueError(
                    f"{path}: row {row_num}: non-numeric feature cell"
                ) from None
            try:
                features = normalize_features(values)
            except ValueError as exc:
                raise ValueError(f"{path}: row {row_num}: {exc}") from None
            records.append(FeatureRecord(id=rid, label=label, features=features))
    return FeatureSet.from_records(records, dim=dim)


def write_feature_set(data: FeatureSet, path) -> None:
    """Write the CSV form of a FeatureSet (LF line endings, full float precision)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "label"] + [f"f{i}" for i in range(data.dim)])
        for rec in data.records:
            writer.writerow([rec.id, rec.label] + [repr(float(v)) for v in rec.features])


@dataclass
class SynthSpec:
    """Parameters for a seeded synthetic corpus.

    n_rel relevant and n_irr irrelevant categories, each a Gaussian blob of
    standard deviation ``spread`` around a mean drawn uniformly on [0,1]^dim.
    """

    n_rel: int
    n_irr: int
    dim: int
    per_class_train: int
    per_class_val: int
    spread: float
    seed: int

    def __post_init__(self):
        if self.n_rel < 1:
            raise ValueError("n_rel must be >= 1")
        if self.n_irr < 0:
            raise ValueError("n_irr must be >= 0")
        if self.dim < 2:
            raise ValueError("dim must be >= 2")
        if self.per_class_train < 1:
            raise ValueError("per_class_train must be >= 1")
        if self.per_class_val < 0:
            raise ValueError("per_class_val must be >= 0")
        if not (self.spread > 0):
            raise ValueError("spread must be > 0")


def generate_synthetic(spec: SynthSpec) -> tuple[FeatureSet, FeatureSet]:
    """Generate seeded (train, val) corpora.

    Relevant categories are labeled R00..R{n_rel-1}; irrelevant categories
    carry the unlabeled marker in both splits (the marker itself is the
    ground truth for them). Draw order is fixed so a seed pins the output
    bit for bit: per category, first the mean vector (dim uniforms), then
    every training image, then every validation image, each image costing
    dim normal draws.
    """
    rng = SplitMix64(spec.seed)
    categories = [(f"R{i:02d}", f"R{i:02d}") for i in range(spec.n_rel)]
    categories += [(f"I{k:02d}", UNLABELED) for k in range(spec.n_irr)]

    train: list[FeatureRecord] = []
    val: list[FeatureRecord] = []
    for tag, label in categories:
        mean = np.array(rng.uniforms(spec.dim))
        for j in range(spec.per_class_train):
            noise = np.array(rng.normals(spec.dim))
            train.append(
                FeatureRecord(
                    id=f"{tag}_tr{j:03d}",
                    label=label,
                    features=normalize_features(mean + spec.spread * noise),
                )
            )
        for j in range(spec.per_class_val):
            noise = np.array(rng.normals(spec.dim))
            val.append(
                FeatureRecord(
                    id=f"{tag}_va{j:03d}",
                    label=label,
                    features=normalize_features(mean + spec.spread * noise),
                )
            )
    return (
        FeatureSet.from_records(train, dim=spec.dim),
        FeatureSet.from_records(val, dim=spec.dim),
    )
