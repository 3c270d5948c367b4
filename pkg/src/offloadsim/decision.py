"""Offload sizing decisions driven by the analytic runtime model.

Answers "how many clusters does this job need to meet its deadline", both in
closed form and by direct scan, plus a simulation-backed search for the
baseline protocol's best cluster count.
"""

import math
from dataclasses import dataclass
from enum import Enum

from .analytic import RuntimeModel, predict_runtime
from .simcore import simulate_offload
from .sysmodel import JobRequest, Protocol, SyncMechanism, SystemConfig, TimingParams


@dataclass(frozen=True)
class DecisionQuery:
    """Deadline query: n elements, a cycle budget, and available clusters."""

    n: int
    t_max: float
    m_cap: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"n={self.n} must be >= 0")
        if self.t_max <= 0:
            raise ValueError(f"t_max={self.t_max} must be > 0")
        if self.m_cap < 1:
            raise ValueError(f"m_cap={self.m_cap} must be >= 1")


class DecisionOutcome(Enum):
    FEASIBLE = "feasible"
    INFEASIBLE_DEADLINE = "infeasible_deadline"
    INFEASIBLE_CAPACITY = "infeasible_capacity"


@dataclass(frozen=True)
class DecisionResult:
    """clusters is the minimal feasible m, or the required m beyond capacity."""

    outcome: DecisionOutcome
    clusters: int | None = None


def min_clusters(model: RuntimeModel, query: DecisionQuery) -> DecisionResult:
    """Minimal cluster count meeting the deadline, in closed form.

    Inverts the runtime model: m must be at least p*n / (t_max - t0 - s*n).
    No budget left after the constant and serial terms means no cluster
    count can help; a requirement beyond m_cap reports the raw requirement.
    """
    serial_floor = model.t0 + model.s * query.n
    if model.p * query.n == 0:
        # runtime is independent of m; one cluster decides it
        if serial_floor <= query.t_max:
            return DecisionResult(DecisionOutcome.FEASIBLE, 1)
        return DecisionResult(DecisionOutcome.INFEASIBLE_DEADLINE)
    budget = query.t_max - serial_floor
    if budget <= 0:
        return DecisionResult(DecisionOutcome.INFEASIBLE_DEADLINE)
    required = max(1, math.ceil(model.p * query.n / budget))
    if required > query.m_cap:
        return DecisionResult(DecisionOutcome.INFEASIBLE_CAPACITY, required)
    return DecisionResult(DecisionOutcome.FEASIBLE, required)


def min_clusters_bruteforce(model: RuntimeModel, query: DecisionQuery) -> DecisionResult:
    """Oracle for min_clusters: scan the predicted-runtime predicate directly.

    Uses only predict_runtime and its monotonicity in m (doubling, then
    bisection), never the closed-form inversion.
    """
    deadline_met = lambda m: predict_runtime(model, m, query.n) <= query.t_max
    if model.p * query.n == 0:
        if deadline_met(1):
            return DecisionResult(DecisionOutcome.FEASIBLE, 1)
        return DecisionResult(DecisionOutcome.INFEASIBLE_DEADLINE)
    if model.t0 + model.s * query.n >= query.t_max:
        # the parallel term never reaches zero, so the floor is unattainable
        return DecisionResult(DecisionOutcome.INFEASIBLE_DEADLINE)
    hi = 1
    while not deadline_met(hi):
        hi *= 2
    lo = hi // 2  # deadline_met(lo) is False (or lo == 0)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if deadline_met(mid):
            hi = mid
        else:
            lo = mid
    if hi > query.m_cap:
        return DecisionResult(DecisionOutcome.INFEASIBLE_CAPACITY, hi)
    return DecisionResult(DecisionOutcome.FEASIBLE, hi)


def optimal_clusters_baseline(
    cfg: SystemConfig, tp: TimingParams, n: int, m_values
) -> int:
    """Cluster count minimizing simulated baseline runtime; ties go to fewer clusters."""
    m_values = sorted(set(m_values))
    if not m_values:
        raise ValueError("m_values must be non-empty")
    best_m = None
    best_t = math.inf
    for m in m_values:
        job = JobRequest(
            n=n, m=m, protocol=Protocol.BASELINE_UNICAST, sync=SyncMechanism.SOFTWARE_POLLING
        )
        total = simulate_offload(cfg, tp, job).total_cycles
        if total < best_t:
            best_m, best_t = m, total
    return best_m
