"""Closed-form runtime model, accuracy metrics, and least-squares fitting.

The model is t(m, n) = t0 + s*n + p*n/m: a constant offload overhead, a
host-side serial term linear in problem size, and a parallel term split
across m clusters.
"""

import json
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RuntimeModel:
    """Coefficients of the analytic offload-runtime model, in cycles."""

    t0: float
    s: float
    p: float

    def __post_init__(self):
        for name in ("t0", "s", "p"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ValueError(f"{name}={value} must be finite")


# Reference coefficients for the calibrated platform defaults.
DEFAULT_MODEL = RuntimeModel(t0=367.0, s=0.25, p=0.325)


@dataclass(frozen=True)
class Measurement:
    """One observed offload runtime for a (clusters, elements) configuration."""

    m: int
    n: int
    t_cycles: float

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m={self.m} must be >= 1")
        if self.n < 0:
            raise ValueError(f"n={self.n} must be >= 0")


def predict_runtime(model: RuntimeModel, m: int, n: int) -> float:
    """Model runtime in cycles for n elements on m clusters."""
    if m < 1:
        raise ValueError(f"m={m} must be >= 1")
    if n < 0:
        raise ValueError(f"n={n} must be >= 0")
    return model.t0 + model.s * n + model.p * n / m


def mape(model: RuntimeModel, measurements) -> float:
    """Mean absolute percentage error over measurements sharing one problem size.

    Averages |t - t_hat| / t over the tested configurations, in percent.
    """
    measurements = list(measurements)
    if not measurements:
        raise ValueError("mape requires at least one measurement")
    sizes = {meas.n for meas in measurements}
    if len(sizes) != 1:
        raise ValueError(f"mape expects one problem size, got n in {sorted(sizes)}")
    return _mean_abs_pct_error(model, measurements)


def mape_pooled(model: RuntimeModel, measurements) -> float:
    """MAPE over an arbitrary measurement pool (mixed problem sizes allowed)."""
    measurements = list(measurements)
    if not measurements:
        raise ValueError("mape requires at least one measurement")
    return _mean_abs_pct_error(model, measurements)


def _mean_abs_pct_error(model, measurements) -> float:
    total = 0.0
    for meas in measurements:
        if meas.t_cycles <= 0:
            raise ValueError(f"measured runtime t_cycles={meas.t_cycles} must be > 0")
        predicted = predict_runtime(model, meas.m, meas.n)
        total += abs(meas.t_cycles - predicted) / meas.t_cycles
    return 100.0 * total / len(measurements)


def speedup(t_baseline: float, t_extended: float) -> float:
    """Baseline-over-extended runtime ratio."""
    if t_extended <= 0:
        raise ValueError(f"t_extended={t_extended} must be > 0")
    if t_baseline <= 0:
        raise ValueError(f"t_baseline={t_baseline} must be > 0")
    return t_baseline / t_extended


def fit_model(measurements) -> RuntimeModel:
    """Ordinary least squares over the basis (1, n, n/m).

    Needs at least three measurements spanning three linearly independent
    basis rows; a degenerate design matrix is an error.
    """
    measurements = list(measurements)
    if len(measurements) < 3:
        raise ValueError(f"fit requires >= 3 measurements, got {len(measurements)}")
    design = np.array([[1.0, meas.n, meas.n / meas.m] for meas in measurements])
    observed = np.array([meas.t_cycles for meas in measurements])
    coef, _, rank, _ = np.linalg.lstsq(design, observed, rcond=None)
    if rank < 3:
        raise ValueError("fit design matrix is rank-deficient; vary both m and n")
    return RuntimeModel(t0=float(coef[0]), s=float(coef[1]), p=float(coef[2]))


MEASUREMENTS_HEADER = "m,n,t_cycles"


def measurements_to_csv(measurements) -> str:
    lines = [MEASUREMENTS_HEADER]
    for meas in measurements:
        lines.append(f"{meas.m},{meas.n},{meas.t_cycles:.1f}")
    return "\n".join(lines) + "\n"


def measurements_from_csv(text: str) -> list[Measurement]:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or lines[0] != MEASUREMENTS_HEADER:
        raise ValueError(f"expected header {MEASUREMENTS_HEADER!r}")
    out = []
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != 3:
            raise ValueError(f"malformed measurement row: {line!r}")
        out.append(Measurement(m=int(parts[0]), n=int(parts[1]), t_cycles=float(parts[2])))
    return out


def model_to_json(model: RuntimeModel) -> str:
    return json.dumps({"t0": model.t0, "s": model.s, "p": model.p}, indent=2) + "\n"


def model_from_json(text: str) -> RuntimeModel:
    raw = json.loads(text)
    if not isinstance(raw, dict) or set(raw) != {"t0", "s", "p"}:
        raise ValueError("model JSON must have exactly the keys t0, s, p")
    return RuntimeModel(t0=float(raw["t0"]), s=float(raw["s"]), p=float(raw["p"]))
