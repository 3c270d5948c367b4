"""Runtime model: prediction, error metrics, fitting, serialization."""

import math

import pytest

from offloadsim.analytic import (
    DEFAULT_MODEL,
    MEASUREMENTS_HEADER,
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

GRID_M = (1, 2, 4, 8, 16, 32)
GRID_N = (256, 512, 768, 1024)


class TestPredict:
    @pytest.mark.parametrize(
        "m,n,expected",
        [
            (1, 1024, 955.8),
            (2, 1024, 789.4),
            (4, 1024, 706.2),
            (5, 1024, 689.56),
            (8, 1024, 664.6),
            (32, 1024, 633.4),
            (32, 0, 367.0),
            (1, 0, 367.0),
        ],
    )
    def test_known_points(self, m, n, expected):
        assert predict_runtime(DEFAULT_MODEL, m, n) == pytest.approx(expected, abs=1e-9)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            predict_runtime(DEFAULT_MODEL, 0, 10)
        with pytest.raises(ValueError):
            predict_runtime(DEFAULT_MODEL, 1, -1)

    def test_model_rejects_non_finite_coefficients(self):
        with pytest.raises(ValueError):
            RuntimeModel(t0=math.nan, s=0.1, p=0.1)
        with pytest.raises(ValueError):
            RuntimeModel(t0=1.0, s=math.inf, p=0.1)


class TestErrorMetrics:
    def test_exact_measurements_give_zero_error(self):
        ms = [
            Measurement(m=m, n=512, t_cycles=predict_runtime(DEFAULT_MODEL, m, 512))
            for m in GRID_M
        ]
        assert mape(DEFAULT_MODEL, ms) == 0.0

    def test_uniform_one_percent_high_measurements(self):
        ms = [
            Measurement(m=m, n=512, t_cycles=1.01 * predict_runtime(DEFAULT_MODEL, m, 512))
            for m in GRID_M
        ]
        # |t - t_hat| / t = 0.01/1.01 for every configuration
        assert mape(DEFAULT_MODEL, ms) == pytest.approx(100 * 0.01 / 1.01, abs=1e-9)

    def test_averages_over_the_tested_configurations(self):
        exact = Measurement(m=1, n=100, t_cycles=predict_runtime(DEFAULT_MODEL, 1, 100))
        off = Measurement(
            m=2, n=100, t_cycles=1.02 * predict_runtime(DEFAULT_MODEL, 2, 100)
        )
        expected = (0.0 + 100 * 0.02 / 1.02) / 2
        assert mape(DEFAULT_MODEL, [exact, off]) == pytest.approx(expected, abs=1e-9)

    def test_requires_a_single_problem_size(self):
        ms = [Measurement(m=1, n=100, t_cycles=500.0), Measurement(m=1, n=200, t_cycles=600.0)]
        with pytest.raises(ValueError, match="problem size"):
            mape(DEFAULT_MODEL, ms)
        assert mape_pooled(DEFAULT_MODEL, ms) > 0.0

    def test_rejects_empty_and_nonpositive_measurements(self):
        with pytest.raises(ValueError):
            mape(DEFAULT_MODEL, [])
        with pytest.raises(ValueError):
            mape(DEFAULT_MODEL, [Measurement(m=1, n=10, t_cycles=0.0)])

    def test_speedup(self):
        assert speedup(900.0, 600.0) == pytest.approx(1.5)
        with pytest.raises(ValueError):
            speedup(0.0, 1.0)
        with pytest.raises(ValueError):
            speedup(1.0, -2.0)


class TestFit:
    def test_recovers_coefficients_from_noiseless_data(self):
        truth = RuntimeModel(t0=400.0, s=0.5, p=1.25)
        ms = [
            Measurement(m=m, n=n, t_cycles=predict_runtime(truth, m, n))
            for n in GRID_N
            for m in GRID_M
        ]
        fitted = fit_model(ms)
        assert fitted.t0 == pytest.approx(truth.t0, abs=1e-9)
        assert fitted.s == pytest.approx(truth.s, abs=1e-9)
        assert fitted.p == pytest.approx(truth.p, abs=1e-9)

    def test_needs_at_least_three_measurements(self):
        ms = [Measurement(m=1, n=100, t_cycles=500.0), Measurement(m=2, n=200, t_cycles=600.0)]
        with pytest.raises(ValueError, match="3 measurements"):
            fit_model(ms)

    def test_single_cluster_count_is_rank_deficient(self):
        # with one m the serial and parallel columns are proportional
        ms = [
            Measurement(m=4, n=n, t_cycles=predict_runtime(DEFAULT_MODEL, 4, n))
            for n in (100, 200, 300, 400)
        ]
        with pytest.raises(ValueError, match="rank"):
            fit_model(ms)


class TestSerialization:
    def test_measurements_round_trip(self):
        ms = [
            Measurement(m=1, n=256, t_cycles=521.2),
            Measurement(m=32, n=1024, t_cycles=633.4),
        ]
        text = measurements_to_csv(ms)
        assert text.splitlines()[0] == MEASUREMENTS_HEADER
        assert measurements_from_csv(text) == ms

    def test_measurements_csv_requires_the_exact_header(self):
        with pytest.raises(ValueError, match="header"):
            measurements_from_csv("m,n,cycles\n1,2,3.0\n")

    def test_model_json_round_trip(self):
        model = RuntimeModel(t0=367.0, s=0.25, p=0.325)
        again = model_from_json(model_to_json(model))
        assert again == model

    def test_model_json_is_exactly_three_keys(self):
        with pytest.raises(ValueError):
            model_from_json('{"t0": 1.0, "s": 0.1}')
        with pytest.raises(ValueError):
            model_from_json('{"t0": 1.0, "s": 0.1, "p": 0.2, "extra": 3}')
