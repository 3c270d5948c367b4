"""Platform description, job validation, work partitioning, config round trips."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from offloadsim.sysmodel import (
    ConfigError,
    JobRequest,
    Protocol,
    SyncMechanism,
    SystemConfig,
    TimingParams,
    load_config,
    partition_work,
    serialize_config,
)


class TestSystemConfig:
    def test_defaults(self):
        cfg = SystemConfig()
        assert cfg.num_clusters == 32
        assert cfg.cores_per_cluster == 9
        assert cfg.worker_cores_per_cluster == 8
        assert cfg.worker_cores_per_cluster < cfg.cores_per_cluster

    @pytest.mark.parametrize(
        "kwargs,field",
        [
            ({"num_clusters": 0}, "num_clusters"),
            ({"cores_per_cluster": 0}, "cores_per_cluster"),
            ({"worker_cores_per_cluster": 0}, "worker_cores_per_cluster"),
            ({"worker_cores_per_cluster": 9}, "worker_cores_per_cluster"),
            ({"num_clusters": 64}, "num_clusters"),
            ({"clock_hz": 0.0}, "clock_hz"),
        ],
    )
    def test_rejects_bad_values_naming_the_field(self, kwargs, field):
        with pytest.raises(ConfigError, match=field):
            SystemConfig(**kwargs)


class TestTimingParams:
    def test_unicast_cost_combines_word_and_fixed_cost(self):
        tp = TimingParams()
        expected = tp.descriptor_words * tp.unicast_cycles_per_word
        assert tp.unicast_cycles_per_cluster() == expected == 9.75

    @pytest.mark.parametrize(
        "kwargs,field",
        [
            ({"host_serial_elems_per_cycle": 0.0}, "host_serial_elems_per_cycle"),
            ({"compute_cycles_per_elem": 0.0}, "compute_cycles_per_elem"),
            ({"descriptor_words": -1}, "descriptor_words"),
            ({"cluster_wakeup_cycles": -1.0}, "cluster_wakeup_cycles"),
            ({"offload_setup_cycles": -0.5}, "offload_setup_cycles"),
        ],
    )
    def test_rejects_bad_values_naming_the_field(self, kwargs, field):
        with pytest.raises(ConfigError, match=field):
            TimingParams(**kwargs)


class TestJobRequest:
    def test_defaults_pair_multicast_with_credit(self):
        job = JobRequest(n=64, m=4)
        assert job.protocol is Protocol.MULTICAST
        assert job.sync is SyncMechanism.CREDIT_COUNTER

    def test_rejects_negative_n(self):
        with pytest.raises(ValueError, match="n="):
            JobRequest(n=-1, m=1)

    def test_rejects_zero_clusters(self):
        with pytest.raises(ValueError, match="m="):
            JobRequest(n=1, m=0)

    def test_rejects_unknown_kernel(self):
        with pytest.raises(ValueError, match="kernel"):
            JobRequest(n=1, m=1, kernel="gemm")


class TestPartition:
    def test_even_split(self):
        part = partition_work(1024, 32, 8)
        assert len(part.chunk_sizes) == 256
        assert set(part.chunk_sizes) == {4}
        assert part.per_cluster_max() == [4] * 32

    def test_remainder_goes_to_lowest_cores(self):
        part = partition_work(10, 1, 8)
        assert part.chunk_sizes == (2, 2, 1, 1, 1, 1, 1, 1)

    def test_cluster_chunks_slices_by_cluster(self):
        part = partition_work(10, 2, 4)
        assert part.cluster_chunks(0) == (2, 2, 1, 1)
        assert part.cluster_chunks(1) == (1, 1, 1, 1)
        assert part.per_cluster_max() == [2, 1]

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            partition_work(-1, 1, 8)
        with pytest.raises(ValueError):
            partition_work(1, 0, 8)
        with pytest.raises(ValueError):
            partition_work(1, 1, 0)

    @given(
        n=st.integers(min_value=0, max_value=1_000_000),
        m=st.integers(min_value=1, max_value=64),
        w=st.integers(min_value=1, max_value=16),
    )
    def test_partition_invariants(self, n, m, w):
        part = partition_work(n, m, w)
        chunks = part.chunk_sizes
        assert len(chunks) == m * w
        assert sum(chunks) == n
        assert max(chunks) - min(chunks) <= 1
        # the remainder sits on the lowest-indexed cores
        assert tuple(sorted(chunks, reverse=True)) == chunks
        assert [max(part.cluster_chunks(i)) for i in range(m)] == part.per_cluster_max()


class TestConfigDocument:
    def test_empty_document_is_all_defaults(self):
        assert load_config("") == (SystemConfig(), TimingParams())
        assert load_config("   \n") == (SystemConfig(), TimingParams())

    def test_round_trip_is_identity(self):
        cfg = SystemConfig(num_clusters=16)
        tp = TimingParams(compute_cycles_per_elem=3.0)
        assert load_config(serialize_config(cfg, tp)) == (cfg, tp)

    def test_partial_document_keeps_other_defaults(self):
        cfg, tp = load_config('{"num_clusters": 8, "sw_increment_cycles": 5}')
        assert cfg.num_clusters == 8
        assert tp.sw_increment_cycles == 5.0
        assert tp.compute_cycles_per_elem == TimingParams().compute_cycles_per_elem

    def test_unknown_keys_are_an_error(self):
        with pytest.raises(ConfigError, match="unknown configuration keys: frequency"):
            load_config('{"frequency": 3}')

    def test_unknown_keys_listed_sorted(self):
        with pytest.raises(ConfigError, match="alpha, beta"):
            load_config('{"beta": 1, "alpha": 2}')

    def test_rejects_non_object_documents(self):
        with pytest.raises(ConfigError, match="JSON object"):
            load_config("[1, 2]")

    def test_rejects_invalid_json(self):
        with pytest.raises(ConfigError, match="invalid JSON"):
            load_config("{nope")

    def test_rejects_bool_for_numeric_field(self):
        with pytest.raises(ConfigError, match="must be a number"):
            load_config('{"num_clusters": true}')

    def test_rejects_float_for_integer_field(self):
        with pytest.raises(ConfigError, match="must be an integer"):
            load_config('{"descriptor_words": 2.5}')

    def test_load_reapplies_field_constraints(self):
        with pytest.raises(ConfigError, match="num_clusters"):
            load_config('{"num_clusters": 0}')
