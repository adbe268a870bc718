"""Open-set low-shot classifier head.

Trains per-class linear weights over precomputed feature vectors with a
squared-exponential loss and a hybrid labeled/unlabeled target matrix,
then calibrates per-class rejection thresholds by ROC analysis so images
outside every known class are recognized as irrelevant.
"""

from .dataset import (
    UNLABELED,
    FeatureRecord,
    FeatureSet,
    SynthSpec,
    generate_synthetic,
    load_feature_set,
    normalize_features,
    write_feature_set,
)
from .targets import (
    CATCH_ALL,
    DEFAULT_NEGATIVE,
    TargetMatrix,
    build_plus_one_targets,
    build_target_matrix,
)
from .trainer import (
    ClassifierModel,
    ClassTrace,
    TraceEntry,
    TrainConfig,
    load_model,
    loss,
    loss_gradient,
    residual,
    save_model,
    train_class,
    train_model,
)
from .classifier import (
    Decision,
    ScoreVector,
    classify_set,
    decide,
    score,
    write_decisions,
)
from .roc import (
    ClassScorePool,
    EmptyPoolError,
    RocCurve,
    RocPoint,
    ThresholdSet,
    build_roc,
    calibrate,
    calibrate_detailed,
    collect_pools,
    load_thresholds,
    normal_threshold,
    roc_threshold,
    save_thresholds,
    trr_frr,
    write_roc_dumps,
)
from .harness import (
    ComparisonTable,
    EvalReport,
    PipelineConfig,
    evaluate,
    run_comparison,
    run_only_labeled,
    run_plus_one,
    save_report,
    save_table,
)

__version__ = "0.1.0"

__all__ = [
    "UNLABELED",
    "FeatureRecord",
    "FeatureSet",
    "SynthSpec",
    "generate_synthetic",
    "load_feature_set",
    "normalize_features",
    "write_feature_set",
    "CATCH_ALL",
    "DEFAULT_NEGATIVE",
    "TargetMatrix",
    "build_plus_one_targets",
    "build_target_matrix",
    "ClassifierModel",
    "ClassTrace",
    "TraceEntry",
    "TrainConfig",
    "load_model",
    "loss",
    "loss_gradient",
    "residual",
    "save_model",
    "train_class",
    "train_model",
    "Decision",
    "ScoreVector",
    "classify_set",
    "decide",
    "score",
    "write_decisions",
    "ClassScorePool",
    "EmptyPoolError",
    "RocCurve",
    "RocPoint",
    "ThresholdSet",
    "build_roc",
    "calibrate",
    "calibrate_detailed",
    "collect_pools",
    "load_thresholds",
    "normal_threshold",
    "roc_threshold",
    "save_thresholds",
    "trr_frr",
    "write_roc_dumps",
    "ComparisonTable",
    "EvalReport",
    "PipelineConfig",
    "evaluate",
    "run_comparison",
    "run_only_labeled",
    "run_plus_one",
    "save_report",
    "save_table",
    "__version__",
]
