"""System description: platform shape, timing parameters, job requests, work partitioning.

All timing quantities are in clock cycles and may be fractional; averaged
per-element throughputs make sub-cycle values meaningful.
"""

import json
from dataclasses import dataclass, fields
from enum import Enum


class ConfigError(ValueError):
    """A configuration document is malformed or violates a field constraint."""


class Protocol(Enum):
    """How job descriptors reach the clusters."""

    BASELINE_UNICAST = "baseline"
    MULTICAST = "multicast"


class SyncMechanism(Enum):
    """How job completion is reported back to the host."""

    SOFTWARE_POLLING = "polling"
    CREDIT_COUNTER = "credit"


@dataclass(frozen=True)
class SystemConfig:
    """Platform shape: one host core plus identical worker clusters."""

    num_clusters: int = 32
    cores_per_cluster: int = 9
    worker_cores_per_cluster: int = 8
    max_clusters: int = 32
    clock_hz: float = 1.0e9  # informational; cycle counts are the unit of record

    def __post_init__(self):
        if self.max_clusters < 1:
            raise ConfigError(f"max_clusters={self.max_clusters} must be >= 1")
        if not 1 <= self.num_clusters <= self.max_clusters:
            raise ConfigError(
                f"num_clusters={self.num_clusters} outside [1, max_clusters={self.max_clusters}]"
            )
        if self.cores_per_cluster < 2:
            raise ConfigError(f"cores_per_cluster={self.cores_per_cluster} must be >= 2")
        if not 1 <= self.worker_cores_per_cluster < self.cores_per_cluster:
            # one core per cluster manages dispatch and synchronization
            raise ConfigError(
                f"worker_cores_per_cluster={self.worker_cores_per_cluster} must be in "
                f"[1, cores_per_cluster={self.cores_per_cluster})"
            )
        if self.clock_hz <= 0:
            raise ConfigError(f"clock_hz={self.clock_hz} must be > 0")


@dataclass(frozen=True)
class TimingParams:
    """Timing model of one offload, phase by phase.

    Defaults are the calibrated values produced by the calibrate command
    (see offload-sim.json at the repository root); the five constants
    offload_setup_cycles + multicast_dispatch_cycles + cluster_wakeup_cycles
    + credit_increment_cycles + interrupt_latency_cycles sum to the constant
    term of the analytic runtime model.
    """

    host_serial_elems_per_cycle: float = 4.0
    compute_cycles_per_elem: float = 2.6
    descriptor_words: int = 5
    unicast_cycles_per_word: float = 1.95
    unicast_fixed_per_cluster: float = 0.0
    multicast_dispatch_cycles: float = 7.0
    cluster_wakeup_cycles: float = 123.0
    sw_increment_cycles: float = 9.0
    sw_poll_interval_cycles: float = 4.0
    credit_increment_cycles: float = 1.0
    interrupt_latency_cycles: float = 4.5
    offload_setup_cycles: float = 231.5

    def __post_init__(self):
        if self.host_serial_elems_per_cycle <= 0:
            raise ConfigError(
                f"host_serial_elems_per_cycle={self.host_serial_elems_per_cycle} must be > 0"
            )
        if self.compute_cycles_per_elem <= 0:
            raise ConfigError(
                f"compute_cycles_per_elem={self.compute_cycles_per_elem} must be > 0"
            )
        if self.descriptor_words < 0:
            raise ConfigError(f"descriptor_words={self.descriptor_words} must be >= 0")
        for name in (
            "unicast_cycles_per_word",
            "unicast_fixed_per_cluster",
            "multicast_dispatch_cycles",
            "cluster_wakeup_cycles",
            "sw_increment_cycles",
            "sw_poll_interval_cycles",
            "credit_increment_cycles",
            "interrupt_latency_cycles",
            "offload_setup_cycles",
        ):
            value = getattr(self, name)
            if value < 0:
                raise ConfigError(f"{name}={value} must be >= 0")

    def unicast_cycles_per_cluster(self) -> float:
        """Cycles the host spends delivering one cluster's descriptor."""
        return self.descriptor_words * self.unicast_cycles_per_word + self.unicast_fixed_per_cluster


@dataclass(frozen=True)
class JobRequest:
    """One offload request: an n-element kernel fanned out to m clusters."""

    n: int
    m: int
    protocol: Protocol = Protocol.MULTICAST
    sync: SyncMechanism = SyncMechanism.CREDIT_COUNTER
    kernel: str = "daxpy"

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"n={self.n} must be >= 0")
        if self.m < 1:
            raise ValueError(f"m={self.m} must be >= 1")
        if self.kernel != "daxpy":
            raise ValueError(f"kernel={self.kernel!r} is not defined (only 'daxpy')")


@dataclass(frozen=True)
class Partition:
    """Per-core element counts for one job, grouped by cluster.

    chunk_sizes has m * w entries; entries [i*w, (i+1)*w) belong to cluster i.
    """

    chunk_sizes: tuple[int, ...]
    m: int
    w: int

    def cluster_chunks(self, i: int) -> tuple[int, ...]:
        return self.chunk_sizes[i * self.w : (i + 1) * self.w]

    def per_cluster_max(self) -> list[int]:
        """Largest chunk in each cluster; a cluster is done when that chunk is."""
        return [max(self.cluster_chunks(i)) for i in range(self.m)]


def partition_work(n: int, m: int, w: int) -> Partition:
    """Split n elements over m clusters of w worker cores each, balanced blocks.

    The first n mod (m*w) cores get one extra element, so chunk sizes differ
    by at most one and lower-indexed cores carry the remainder.
    """
    if n < 0:
        raise ValueError(f"n={n} must be >= 0")
    if m < 1:
        raise ValueError(f"m={m} must be >= 1")
    if w < 1:
        raise ValueError(f"w={w} must be >= 1")
    cores = m * w
    base, rem = divmod(n, cores)
    chunks = tuple(base + 1 if i < rem else base for i in range(cores))
    return Partition(chunk_sizes=chunks, m=m, w=w)


_INT_FIELDS = {
    "num_clusters",
    "cores_per_cluster",
    "worker_cores_per_cluster",
    "max_clusters",
    "descriptor_words",
}

_SYSTEM_FIELDS = tuple(f.name for f in fields(SystemConfig))
_TIMING_FIELDS = tuple(f.name for f in fields(TimingParams))


def load_config(text: str) -> tuple[SystemConfig, TimingParams]:
    """Parse a flat JSON configuration document.

    An empty document yields all defaults.  Unknown keys are an error; missing
    keys fall back to defaults; field constraints are re-checked on load.
    """
    if text.strip() == "":
        return SystemConfig(), TimingParams()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("configuration document must be a JSON object")

    known = set(_SYSTEM_FIELDS) | set(_TIMING_FIELDS)
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")

    sys_kwargs = {}
    timing_kwargs = {}
    for key, value in raw.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key}={value!r} must be a number")
        if key in _INT_FIELDS:
            if isinstance(value, float):
                raise ConfigError(f"{key}={value!r} must be an integer")
            coerced = int(value)
        else:
            coerced = float(value)
        if key in _SYSTEM_FIELDS:
            sys_kwargs[key] = coerced
        else:
            timing_kwargs[key] = coerced
    return SystemConfig(**sys_kwargs), TimingParams(**timing_kwargs)


def serialize_config(cfg: SystemConfig, tp: TimingParams) -> str:
    """Render a configuration as the flat JSON document load_config accepts."""
    doc = {name: getattr(cfg, name) for name in _SYSTEM_FIELDS}
    doc.update({name: getattr(tp, name) for name in _TIMING_FIELDS})
    return json.dumps(doc, indent=2) + "\n"
