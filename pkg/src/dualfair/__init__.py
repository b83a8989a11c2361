"""DualFair: multi-sensitive-attribute debiasing pipeline and AWI metric."""

from .balance import BalanceTargets, SmoteParams, balance_all, compute_targets, smote_sample, undersample
from .errors import BalanceError, CleanError, DualFairError, ModelError, PipelineError, SchemaError
from .fairness import AwiScore, PerformanceMetrics, ProbeResult, compute_awi, compute_performance, probe_point, situation_test
from .harness import ExperimentConfig, FairnessReport, SyntheticSpec, generate_synthetic, run_dualfair, write_report
from .model import ClassifierModel, FitConfig, fit, load_model, predict_label, predict_prob, save_model
from .tabular import ColumnSpec, Dataset, RawTable, clean, decode_to_csv, encode_and_normalize, load_csv
from .worlds import SensitiveSpec, count_worlds, enumerate_worlds, partition, substitute_world

__version__ = "0.1.0"

__all__ = [
    "AwiScore", "BalanceError", "BalanceTargets", "ClassifierModel",
    "CleanError", "ColumnSpec", "Dataset", "DualFairError",
    "ExperimentConfig", "FairnessReport", "FitConfig", "ModelError",
    "PerformanceMetrics", "PipelineError", "ProbeResult", "RawTable",
    "SchemaError", "SensitiveSpec", "SmoteParams", "SyntheticSpec",
    "balance_all", "clean", "compute_awi", "compute_performance",
    "compute_targets", "count_worlds", "decode_to_csv",
    "encode_and_normalize", "enumerate_worlds", "fit", "generate_synthetic",
    "load_csv", "load_model", "partition", "predict_label", "predict_prob",
    "probe_point", "run_dualfair", "save_model", "situation_test",
    "smote_sample", "substitute_world", "undersample", "write_report",
]
