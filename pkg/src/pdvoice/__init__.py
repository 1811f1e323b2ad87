"""Voice-based Parkinson's detection toolkit.

Trains and compares four tabular classifiers (MLP, gradient-boosted trees,
an attention-masked network, and a SAINT-style transformer with feature and
intersample attention) on the 22-feature voice-measurement CSV, evaluating
with confusion-matrix metrics, weighted averages, MCC, and ROC/AUC.
"""

from .boosting import GbmClassifier, RegressionTree, fit_tree
from .checkpoint import load_checkpoint, save_checkpoint
from .config import (AttentiveConfig, ExperimentConfig, GbmConfig, MlpConfig,
                     SaintConfig, TrainConfig, build_config, read_config_file)
from .dataio import (FEATURE_COLUMNS, PARKINSONS_SCHEMA, FeatureStandardizer,
                     RecordSchema, SplitSpec, StandardizationStats, VoiceDataset,
                     feature_summary, load_csv, pearson_correlation_matrix,
                     standardize_apply, standardize_fit, stratified_split)
from .estimators import AttentiveClassifier, MlpClassifier, SaintClassifier
from .exceptions import (ConfigError, DataError, DataParseError, IngestionError,
                         PdvoiceError, SchemaError, SplitError, TrainingDivergedError)
from .harness import (RunArtifacts, StageFailure, compare_table, run_eda,
                      run_evaluate, run_experiment)
from .metrics import (ConfusionMatrix, EvaluationReport, PerClassMetrics, RocCurve,
                      basic_rates, confusion_matrix, full_report, mcc,
                      per_class_metrics, roc_curve, weighted_metric)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "AttentiveClassifier", "AttentiveConfig",
    "ConfigError", "ConfusionMatrix",
    "DataError", "DataParseError",
    "EvaluationReport", "ExperimentConfig",
    "FEATURE_COLUMNS", "FeatureStandardizer",
    "GbmClassifier", "GbmConfig",
    "IngestionError",
    "MlpClassifier", "MlpConfig",
    "PARKINSONS_SCHEMA", "PdvoiceError", "PerClassMetrics",
    "RecordSchema", "RegressionTree", "RocCurve", "RunArtifacts",
    "SaintClassifier", "SaintConfig",
    "SchemaError", "SplitError", "SplitSpec",
    "StageFailure", "StandardizationStats",
    "TrainConfig", "TrainingDivergedError",
    "VoiceDataset",
    "basic_rates", "build_config", "compare_table", "confusion_matrix",
    "feature_summary", "fit_tree", "full_report", "load_checkpoint", "load_csv",
    "mcc", "pearson_correlation_matrix", "per_class_metrics", "read_config_file",
    "roc_curve", "run_eda", "run_evaluate", "run_experiment", "save_checkpoint",
    "standardize_apply", "standardize_fit", "stratified_split", "weighted_metric",
]
