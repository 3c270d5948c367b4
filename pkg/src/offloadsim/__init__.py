"""Cycle-approximate offload simulation for a host plus many-cluster accelerator.

The package splits into five layers: sysmodel describes the platform and
jobs, simcore replays one offload on a timeline, analytic predicts and fits
runtimes with a three-coefficient model, decision sizes jobs against
deadlines, and calibrate ties simulated timings back to the model.
"""

from .analytic import (
    DEFAULT_MODEL,
    Measurement,
    RuntimeModel,
    fit_model,
    mape,
    mape_pooled,
    measurements_from_csv,
    measurements_to_csv,
    model_from_json,
    model_to_json,
    predict_runtime,
    speedup,
)
from .calibrate import (
    CalibrationReport,
    CalibrationTargets,
    SweepSpec,
    calibrate_params,
    evaluate_params,
    run_sweep,
)
from .decision import (
    DecisionOutcome,
    DecisionQuery,
    DecisionResult,
    min_clusters,
    min_clusters_bruteforce,
    optimal_clusters_baseline,
)
from .simcore import (
    CreditCounter,
    CreditProtocolError,
    Event,
    EventKind,
    PhaseBreakdown,
    SimResult,
    credit_increment,
    simulate_offload,
    trace_to_text,
)
from .sysmodel import (
    ConfigError,
    JobRequest,
    Partition,
    Protocol,
    SyncMechanism,
    SystemConfig,
    TimingParams,
    load_config,
    partition_work,
    serialize_config,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "SystemConfig",
    "TimingParams",
    "JobRequest",
    "Protocol",
    "SyncMechanism",
    "Partition",
    "partition_work",
    "load_config",
    "serialize_config",
    "CreditCounter",
    "CreditProtocolError",
    "credit_increment",
    "Event",
    "EventKind",
    "PhaseBreakdown",
    "SimResult",
    "simulate_offload",
    "trace_to_text",
    "RuntimeModel",
    "DEFAULT_MODEL",
    "Measurement",
    "predict_runtime",
    "mape",
    "mape_pooled",
    "speedup",
    "fit_model",
    "measurements_to_csv",
    "measurements_from_csv",
    "model_to_json",
    "model_from_json",
    "DecisionQuery",
    "DecisionResult",
    "DecisionOutcome",
    "min_clusters",
    "min_clusters_bruteforce",
    "optimal_clusters_baseline",
    "SweepSpec",
    "CalibrationTargets",
    "CalibrationReport",
    "run_sweep",
    "evaluate_params",
    "calibrate_params",
    "__version__",
]
