"""Gradient-descent trainer for per-class linear weights.

The per-class loss is sum_i exp(d_i^2) over the residuals d = A x - b.
exp(t^2) is smooth and convex, and an affine precomposition preserves
convexity, so plain gradient descent with a backtracking step-size
schedule converges; whenever a residual-zero solution exists the loss
bottoms out at exactly one term per row. Inputs are expected in [0, 1]
(see dataset normalization), which keeps the exponentials representable.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import FeatureSet
from .prng import SplitMix64
from .targets import TargetMatrix

# Backtracking limits: a candidate step that still increases the loss after
# this many shrinks, or a learning rate this small, ends training for the class.
MAX_BACKTRACKS = 60
LR_FLOOR = 1e-18


@dataclass
class TrainConfig:
    """Knobs for one training run; the same config drives every class column."""

    epochs: int = 500
    lr0: float = 0.1
    lr_shrink: float = 0.5
    tol: float = 1e-9
    seed: int = 0
    init_scale: float = 0.01

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not (np.isfinite(self.lr0) and self.lr0 > 0):
            raise ValueError("lr0 must be finite and > 0")
        if not (0.0 < self.lr_shrink < 1.0):
            raise ValueError("lr_shrink must be in (0, 1)")
        if not (np.isfinite(self.tol) and self.tol >= 0):
            raise ValueError("tol must be finite and >= 0")
        if not (np.isfinite(self.init_scale) and self.init_scale > 0):
            raise ValueError("init_scale must be finite and > 0")

    def to_dict(self) -> dict:
        return {
            "epochs": self.epochs,
            "lr0": self.lr0,
            "lr_shrink": self.lr_shrink,
            "tol": self.tol,
            "seed": self.seed,
            "init_scale": self.init_scale,
        }


@dataclass
class TraceEntry:
    """Loss and learning rate after one accepted step (epoch 0 = initialization)."""

    class_index: int
    epoch: int
    loss: float
    lr: float


@dataclass
class ClassTrace:
    entries: list[TraceEntry] = field(default_factory=list)
    lr_underflow: bool = False
    backtrack_exhausted: bool = False

    @property
    def final_loss(self) -> float:
        return self.entries[-1].loss

    @property
    def epochs_used(self) -> int:
        return self.entries[-1].epoch


@dataclass
class ClassifierModel:
    """Trained head: one weight column per class, column order = class_names order."""

    class_names: list[str]
    weights: np.ndarray  # (dim, n_classes)
    dim: int
    train_meta: dict


def residual(A, x, b) -> np.ndarray:
    """d = A x - b, with shapes checked."""
    A = np.asarray(A, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if A.ndim != 2 or x.ndim != 1 or b.ndim != 1 or A.shape != (b.size, x.size):
        raise ValueError(
            f"shape mismatch: A is {A.shape}, x is {x.shape}, b is {b.shape}"
        )
    return A @ x - b


def _loss_of(d: np.ndarray) -> float:
    # May return inf on overflow; callers decide whether that is an error.
    with np.errstate(over="ignore"):
        return float(np.exp(d * d).sum())


def loss(A, x, b) -> float:
    """Squared-exponential loss sum_i exp(d_i^2); at least 1.0 per row."""
    value = _loss_of(residual(A, x, b))
    if not np.isfinite(value):
        raise FloatingPointError(
            "loss overflowed to non-finite; check that features and targets are normalized"
        )
    return value


def loss_gradient(A, x, b) -> np.ndarray:
    """Analytic gradient: g_j = sum_i 2 exp(d_i^2) d_i A_ij."""
    A = np.asarray(A, dtype=np.float64)
    d = residual(A, x, b)
    with np.errstate(over="ignore"):
        g = A.T @ (2.0 * d * np.exp(d * d))
    if not np.all(np.isfinite(g)):
        raise FloatingPointError(
            "gradient overflowed to non-finite; check that features and targets are normalized"
        )
    return g


def train_class(
    features,
    target,
    cfg: TrainConfig,
    class_seed: int,
    class_index: int = 0,
    init=None,
) -> tuple[np.ndarray, ClassTrace]:
    """Fit one weight vector by backtracking gradient descent.

    Every epoch proposes x - 0.5 * lr * grad and evaluates the candidate
    loss: if it exceeds the current loss the learning rate is multiplied by
    lr_shrink and the epoch retried, otherwise the step is accepted and the
    rate kept. The rate never grows, so accepted losses are non-increasing
    by construction. Training stops at the epoch budget, when the relative
    loss change drops below tol, or when backtracking bottoms out (rate
    under the floor sets a flag on the trace).

    Weights start uniform in [-init_scale, init_scale], seeded by
    class_seed; pass ``init`` to start from a known vector instead.

    Returns (weights, trace).
    """
    A = np.asarray(features, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    if A.ndim != 2 or t.ndim != 1 or A.shape[0] != t.size:
        raise ValueError(f"shape mismatch: features {A.shape}, target {t.shape}")
    if init is None:
        rng = SplitMix64(class_seed)
        x = (np.array(rng.uniforms(A.shape[1])) * 2.0 - 1.0) * cfg.init_scale
    else:
        x = np.asarray(init, dtype=np.float64).copy()
        if x.shape != (A.shape[1],):
            raise ValueError(f"init has shape {x.shape}, expected ({A.shape[1]},)")

    current = loss(A, x, t)  # raises if non-finite at initialization
    lr = cfg.lr0
    trace = ClassTrace(entries=[TraceEntry(class_index, 0, current, lr)])

    for epoch in range(1, cfg.epochs + 1):
        g = loss_gradient(A, x, t)
        accepted = False
        for _ in range(MAX_BACKTRACKS + 1):
            candidate = x - 0.5 * lr * g
            candidate_loss = _loss_of(residual(A, candidate, t))
            if np.isfinite(candidate_loss) and candidate_loss <= current:
                accepted = True
                break
            lr *= cfg.lr_shrink
            if lr < LR_FLOOR:
                trace.lr_underflow = True
                return x, trace
        if not accepted:
            trace.backtrack_exhausted = True
            return x, trace
        previous, current, x = current, candidate_loss, candidate
        trace.entries.append(TraceEntry(class_index, epoch, current, lr))
        if previous > 0 and abs(previous - current) / previous < cfg.tol:
            break
    return x, trace


def train_model(data: FeatureSet, targets: TargetMatrix, cfg: TrainConfig) -> ClassifierModel:
    """Train one weight column per target column.

    Columns are independent (class j sees only target column j), trained in
    class order with class_seed = cfg.seed + column index, so the result
    does not depend on execution order.
    """
    F = data.feature_matrix()
    if targets.values.shape[0] != F.shape[0]:
        raise ValueError(
            f"row count mismatch: {F.shape[0]} records vs {targets.values.shape[0]} target rows"
        )
    names = list(targets.class_names)
    if not names:
        raise ValueError("no classes to train")

    columns: list[np.ndarray] = []
    final_losses: dict[str, float] = {}
    epochs_used: dict[str, int] = {}
    flagged: list[str] = []
    for j, name in enumerate(names):
        try:
            x, trace = train_class(
                F, targets.values[:, j], cfg, class_seed=cfg.seed + j, class_index=j
            )
        except Exception as exc:
            raise type(exc)(f"class {name!r}: {exc}") from exc
        columns.append(x)
        final_losses[name] = trace.final_loss
        epochs_used[name] = trace.epochs_used
        if trace.lr_underflow or trace.backtrack_exhausted:
            flagged.append(name)

    meta = {
        "config": cfg.to_dict(),
        "negative_value": targets.negative_value,
        "final_losses": final_losses,
        "epochs_used": epochs_used,
        "early_stopped_classes": flagged,
    }
    return ClassifierModel(
        class_names=names,
        weights=np.column_stack(columns),
        dim=int(F.shape[1]),
        train_meta=meta,
    )


def save_model(model: ClassifierModel, path) -> None:
    """Write the model as JSON; weights stored per class at full precision."""
    doc = {
        "class_names": model.class_names,
        "dim": model.dim,
        "negative_value": model.train_meta.get("negative_value"),
        "weights": [model.weights[:, j].tolist() for j in range(model.weights.shape[1])],
        "train_meta": model.train_meta,
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_model(path) -> ClassifierModel:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    names = doc["class_names"]
    dim = int(doc["dim"])
    cols = doc["weights"]
    if len(cols) != len(names):
        raise ValueError(f"{path}: {len(cols)} weight columns for {len(names)} classes")
    weights = np.array(cols, dtype=np.float64).T
    if weights.shape != (dim, len(names)):
        raise ValueError(f"{path}: weight shape {weights.shape} != ({dim}, {len(names)})")
    if not np.all(np.isfinite(weights)):
        raise ValueError(f"{path}: non-finite weight entries")
    return ClassifierModel(
        class_names=list(names),
        weights=weights,
        dim=dim,
        train_meta=doc.get("train_meta", {}),
    )
