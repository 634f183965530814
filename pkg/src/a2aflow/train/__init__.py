from .metrics import CSV_HEADER, MetricRecord, append_records, read_records, write_records
from .checkpoint import Checkpoint, build_policy, load_checkpoint, save_checkpoint
from .trainer import TrainOutput, train
from .evaluate import EvalResult, bench_latency, rollout_eval
from .diagnostics import DiagnosticsResult, latent_diagnostics, write_diagnostics_csv
from .matrix import MatrixSpec, run_experiment_matrix

__all__ = [
    "CSV_HEADER",
    "MetricRecord",
    "append_records",
    "read_records",
    "write_records",
    "Checkpoint",
    "build_policy",
    "load_checkpoint",
    "save_checkpoint",
    "TrainOutput",
    "train",
    "EvalResult",
    "bench_latency",
    "rollout_eval",
    "DiagnosticsResult",
    "latent_diagnostics",
    "write_diagnostics_csv",
    "MatrixSpec",
    "run_experiment_matrix",
]
