"""Deterministic cycle-approximate timeline of one offloaded job.

An offload runs through five phases: host setup, host-side serial
preparation of the n elements, descriptor dispatch (unicast per cluster or
one multicast), cluster compute, and completion synchronization (software
polling or a credit counter that fires a host interrupt).  Every event is
timestamped in fractional cycles; rounding to whole cycles happens only
when a trace is rendered as text.
"""

import math
from dataclasses import dataclass
from enum import Enum

from .sysmodel import (
    JobRequest,
    Protocol,
    SyncMechanism,
    SystemConfig,
    TimingParams,
    partition_work,
)


class CreditProtocolError(RuntimeError):
    """An increment arrived on a credit counter that already reached its threshold."""


@dataclass(frozen=True)
class CreditCounter:
    """Hardware completion counter with a fire-once interrupt at threshold."""

    threshold: int
    count: int = 0
    fired: bool = False

    def __post_init__(self):
        if self.threshold < 1:
            raise ValueError(f"threshold={self.threshold} must be >= 1")
        if not 0 <= self.count <= self.threshold:
            raise ValueError(f"count={self.count} outside [0, threshold={self.threshold}]")


def credit_increment(counter: CreditCounter) -> tuple[CreditCounter, bool]:
    """Apply one completion write; returns the new counter and whether it fired now.

    Incrementing a counter whose count already equals its threshold is a
    protocol violation: the hardware has no credit left to account for.
    """
    if counter.count >= counter.threshold:
        raise CreditProtocolError(
            f"increment on a full counter (count={counter.count}, threshold={counter.threshold})"
        )
    count = counter.count + 1
    fired_now = count == counter.threshold and not counter.fired
    return CreditCounter(counter.threshold, count, counter.fired or fired_now), fired_now


class EventKind(Enum):
    SERIAL_START = "SerialStart"
    SERIAL_END = "SerialEnd"
    DISPATCH_SENT = "DispatchSent"
    DESCRIPTOR_ARRIVED = "DescriptorArrived"
    COMPUTE_START = "ComputeStart"
    COMPUTE_END = "ComputeEnd"
    SYNC_INCREMENT = "SyncIncrement"
    INTERRUPT_FIRED = "InterruptFired"
    POLL_OBSERVED = "PollObserved"
    OFFLOAD_COMPLETE = "OffloadComplete"


_KIND_ORDER = {kind: rank for rank, kind in enumerate(EventKind)}


@dataclass(frozen=True)
class Event:
    """One timestamped simulation event; cluster is None for host-side events."""

    time: float
    kind: EventKind
    cluster: int | None = None

    def sort_key(self) -> tuple[float, int, int]:
        cluster = -1 if self.cluster is None else self.cluster
        return (self.time, _KIND_ORDER[self.kind], cluster)


@dataclass(frozen=True)
class PhaseBreakdown:
    """Per-phase durations; the five fields tile the timeline exactly.

    dispatch covers descriptor delivery up to the last cluster's kernel entry
    (wakeup included); compute runs from that entry to the last cluster
    completion; sync is everything after the last completion.
    """

    setup_cycles: float
    serial_cycles: float
    dispatch_cycles: float
    compute_cycles: float
    sync_cycles: float

    def total(self) -> float:
        return (
            self.setup_cycles
            + self.serial_cycles
            + self.dispatch_cycles
            + self.compute_cycles
            + self.sync_cycles
        )


@dataclass(frozen=True)
class SimResult:
    total_cycles: float
    breakdown: PhaseBreakdown
    trace: tuple[Event, ...]


def _sync_credit(completions, tp: TimingParams):
    """Credit-counter completion path.

    Each cluster posts a write that lands credit_increment_cycles after its
    completion; landings take effect in completion order (ties by cluster
    index) and the counter's interrupt fires on the one that reaches the
    threshold.  Returns (events, complete_time).
    """
    m = len(completions)
    counter = CreditCounter(threshold=m)
    events = []
    fire_time = None
    order = sorted(range(m), key=lambda i: (completions[i], i))
    for i in order:
        landing = completions[i] + tp.credit_increment_cycles
        counter, fired_now = credit_increment(counter)
        events.append(Event(landing, EventKind.SYNC_INCREMENT, i))
        if fired_now:
            fire_time = landing
    events.append(Event(fire_time, EventKind.INTERRUPT_FIRED))
    complete = fire_time + tp.interrupt_latency_cycles
    return events, complete

def _sync_polling(completions, dispatch_end: float, tp: TimingParams):
    """Software completion path: serialized counter increments plus host polling.

    Increments are serviced one at a time in completion order (ties by
    cluster index), each occupying the shared counter for
    sw_increment_cycles.  The host observes the counter only at whole poll
    intervals after dispatch end and completes on the first observation at
    or after the last increment.
    """
    m = len(completions)
    events = []
    order = sorted(range(m), key=lambda i: (completions[i], i))
    service_end = -math.inf
    for i in order:
        service_end = max(completions[i], service_end) + tp.sw_increment_cycles
        events.append(Event(service_end, EventKind.SYNC_INCREMENT, i))
    interval = tp.sw_poll_interval_cycles
    if interval > 0:
        polls = max(1, math.ceil((service_end - dispatch_end) / interval))
        for k in range(1, polls + 1):
            events.append(Event(dispatch_end + k * interval, EventKind.POLL_OBSERVED))
        complete = dispatch_end + polls * interval
    else:
        # zero interval: the host watches continuously
        complete = max(service_end, dispatch_end)
        events.append(Event(complete, EventKind.POLL_OBSERVED))
    return events, complete


def simulate_offload(cfg: SystemConfig, tp: TimingParams, job: JobRequest) -> SimResult:
    """Run one offload and return its total cycles, phase breakdown, and trace."""
    if job.m > cfg.num_clusters:
        raise ValueError(f"m={job.m} exceeds num_clusters={cfg.num_clusters}")

    part = partition_work(job.n, job.m, cfg.worker_cores_per_cluster)
    durations = [tp.compute_cycles_per_elem * c for c in part.per_cluster_max()]

    setup_end = tp.offload_setup_cycles
    serial = job.n / tp.host_serial_elems_per_cycle
    dispatch_start = setup_end + serial

    events = [
        Event(setup_end, EventKind.SERIAL_START),
        Event(dispatch_start, EventKind.SERIAL_END),
    ]

    if job.protocol is Protocol.BASELINE_UNICAST:
        per_cluster = tp.unicast_cycles_per_cluster()
        sent = [dispatch_start + i * per_cluster for i in range(job.m)]
        arrivals = [dispatch_start + (i + 1) * per_cluster for i in range(job.m)]
    else:
        sent = [dispatch_start] * job.m
        arrivals = [dispatch_start + tp.multicast_dispatch_cycles] * job.m

    starts = [arr + tp.cluster_wakeup_cycles for arr in arrivals]
    completions = [start + dur for start, dur in zip(starts, durations)]
    for i in range(job.m):
        events.append(Event(sent[i], EventKind.DISPATCH_SENT, i))
        events.append(Event(arrivals[i], EventKind.DESCRIPTOR_ARRIVED, i))
        events.append(Event(starts[i], EventKind.COMPUTE_START, i))
        events.append(Event(completions[i], EventKind.COMPUTE_END, i))

    dispatch_end = max(arrivals)
    if job.sync is SyncMechanism.CREDIT_COUNTER:
        sync_events, complete = _sync_credit(completions, tp)
    else:
        sync_events, complete = _sync_polling(completions, dispatch_end, tp)
    events.extend(sync_events)
    events.append(Event(complete, EventKind.OFFLOAD_COMPLETE))

    last_start = max(starts)
    last_completion = max(completions)
    breakdown = PhaseBreakdown(
        setup_cycles=tp.offload_setup_cycles,
        serial_cycles=serial,
        dispatch_cycles=last_start - dispatch_start,
        compute_cycles=last_completion - last_start,
        sync_cycles=complete - last_completion,
    )
    events.sort(key=Event.sort_key)
    return SimResult(total_cycles=complete, breakdown=breakdown, trace=tuple(events))


def trace_to_text(trace) -> str:
    """Render a trace one event per line: time (one decimal), kind, cluster or '-'."""
    lines = []
    for event in trace:
        cluster = "-" if event.cluster is None else str(event.cluster)
        lines.append(f"{event.time:.1f},{event.kind.value},{cluster}")
    return "\n".join(lines) + ("\n" if lines else "")
