import io

import numpy as np
import pytest

from fairorder.syncsim import (
    CorrectionDistribution,
    LatencyModel,
    ProbeRecord,
    fit_distribution,
    ntp_offset_estimate,
    read_corrections_csv,
    read_latency_trace,
    run_sync,
    sample_latency,
    write_corrections_csv,
)
from fairorder.timebase import VirtualClock


class TestOffsetEstimate:
    def test_symmetric_path_client_behind(self):
        # One-way delay 50 ns each direction, client 100 ns behind the server.
        probe = ProbeRecord(t1=0, t2=150, t3=160, t4=110)
        assert ntp_offset_estimate(probe) == 100

    def test_zero_offset_symmetric_delay(self):
        probe = ProbeRecord(t1=0, t2=40, t3=40, t4=80)
        assert ntp_offset_estimate(probe) == 0

    def test_asymmetric_delay_biases_estimate(self):
        # d_fwd=10, d_back=30, true offset 0: error is half the asymmetry.
        probe = ProbeRecord(t1=0, t2=10, t3=10, t4=40)
        assert ntp_offset_estimate(probe) == -10

    def test_rounds_toward_zero(self):
        assert ntp_offset_estimate(ProbeRecord(0, 3, 3, 3)) == 1  # 3/2 -> 1
        assert ntp_offset_estimate(ProbeRecord(0, 0, 0, 3)) == -1  # -3/2 -> -1

    def test_invalid_probe(self):
        with pytest.raises(ValueError):
            ProbeRecord(t1=10, t2=0, t3=0, t4=5)


class TestRunSync:
    def test_converges_after_first_probe(self):
        clock = VirtualClock(offset_ns=-5_000)
        server = VirtualClock()
        lat = LatencyModel.constant(200)
        clock, dist = run_sync(clock, server, lat, 1_000_000, 10_000_000, 1, client=0)
        assert dist.samples[0] == 5_000
        assert all(abs(s) <= 1 for s in dist.samples[1:])
        assert abs(clock.offset_ns) <= 1

    def test_ten_probes_per_second(self):
        clock, dist = run_sync(
            VirtualClock(), VirtualClock(), LatencyModel.constant(100),
            100_000_000, 1_000_000_000, 0,
        )
        assert len(dist) == 10

    def test_zero_latency_zero_offset_gives_zero_samples(self):
        _, dist = run_sync(
            VirtualClock(), VirtualClock(), LatencyModel.constant(0),
            1_000_000, 20_000_000, 3,
        )
        assert set(dist.samples) == {0}

    def test_bit_identical_replay(self):
        args = (
            VirtualClock(offset_ns=123, drift_ppm=4.0),
            VirtualClock(),
            LatencyModel.normal(50_000, 10_000),
            1_000_000,
            100_000_000,
        )
        _, d1 = run_sync(*args, 42)
        _, d2 = run_sync(*args, 42)
        assert d1.samples == d2.samples

    def test_correction_magnitude_bounded(self):
        # With zero initial offset, each adjustment combines at most two
        # latency asymmetries (U/2 each) and the drift accrued in one
        # interval (2 rho W), plus rounding.
        interval = 10_000_000
        rho = 50.0
        lat = LatencyModel.empirical([10_000, 30_000])  # U = 20 us
        clock = VirtualClock(offset_ns=0, drift_ppm=rho)
        _, dist = run_sync(clock, VirtualClock(), lat, interval, 500_000_000, 7)
        u = 20_000
        bound = u + 2 * rho * 1e-6 * interval + 2
        assert all(abs(s) <= bound for s in dist.samples)

    def test_ring_buffer_evicts_oldest(self):
        clock = VirtualClock(offset_ns=-1_000_000)
        _, dist = run_sync(
            clock, VirtualClock(), LatencyModel.constant(100),
            1_000_000, 50_000_000, 0, capacity=10,
        )
        assert len(dist) == 10
        # The large initial correction fell out of the ring.
        assert all(abs(s) <= 1 for s in dist.samples)


class TestSampleLatency:
    def test_constant(self):
        rng = np.random.default_rng(0)
        assert sample_latency(LatencyModel.constant(5000), rng) == 5000

    def test_degenerate_trace(self):
        rng = np.random.default_rng(0)
        assert sample_latency(LatencyModel.empirical([10, 10, 10]), rng) == 10

    def test_seeded_replay(self):
        model = LatencyModel.normal(50_000, 10_000)
        rng_a, rng_b = np.random.default_rng(9), np.random.default_rng(9)
        a = [sample_latency(model, rng_a) for _ in range(20)]
        b = [sample_latency(model, rng_b) for _ in range(20)]
        assert a == b
        assert len(set(a)) > 1

    def test_never_negative(self):
        model = LatencyModel.normal(0, 1_000_000)
        rng = np.random.default_rng(1)
        assert all(sample_latency(model, rng) >= 0 for _ in range(200))

    def test_empirical_requires_trace(self):
        with pytest.raises(ValueError):
            LatencyModel.empirical([])


class TestFitDistribution:
    def test_normal_moment_matching(self):
        samples = [1, 2, 3] * 4  # variance is population-based
        model = fit_distribution("normal", samples)
        mean, sigma = model.params
        assert mean == pytest.approx(2.0)
        assert sigma**2 == pytest.approx(2.0 / 3.0)

    def test_constant_fallback_on_degenerate_samples(self):
        model = fit_distribution("normal", [7] * 12)
        assert model.kind == "constant"
        assert model.params[0] == 7

    def test_bimodal_recovers_two_clusters(self):
        rng = np.random.default_rng(5)
        lo = rng.normal(10.0, 1.0, 500)
        hi = rng.normal(100.0, 5.0, 500)
        samples = np.concatenate([lo, hi]).tolist()
        model = fit_distribution("bimodal", samples)
        m1, _, m2, _, w1 = model.params
        means = sorted((m1, m2))
        assert abs(means[0] - 10) <= 1.0
        assert abs(means[1] - 100) <= 10.0
        assert 0.2 < w1 < 0.8

    def test_pareto_fit_samples_stay_on_support(self):
        rng = np.random.default_rng(6)
        samples = (10_000 + 5_000 * (1.0 + rng.pareto(3.0, 500))).astype(int).tolist()
        model = fit_distribution("pareto", samples)
        assert model.kind == "pareto"
        draws = [sample_latency(model, rng) for _ in range(100)]
        assert min(draws) >= min(samples) - 1

    def test_lognormal_fit(self):
        rng = np.random.default_rng(7)
        samples = (1000 + np.exp(rng.normal(8.0, 0.5, 400))).astype(int).tolist()
        model = fit_distribution("lognormal", samples)
        assert model.kind == "lognormal"

    def test_needs_ten_samples(self):
        with pytest.raises(ValueError):
            fit_distribution("normal", [1, 2, 3])


class TestSupport:
    def test_constant_support(self):
        assert LatencyModel.constant(5000).support() == (5000, 5000)

    def test_empirical_support_and_uncertainty(self):
        model = LatencyModel.empirical([10, 40, 25])
        assert model.support() == (10, 40)
        assert model.uncertainty_ns() == 30


class TestTraceAndCsv:
    def test_latency_trace_roundtrip(self, tmp_path):
        path = tmp_path / "trace.txt"
        path.write_text("100\n200\n\n300\n")
        assert read_latency_trace(path) == (100, 200, 300)

    def test_latency_trace_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("12\nnope\n")
        with pytest.raises(ValueError):
            read_latency_trace(path)

    def test_corrections_csv_roundtrip(self, tmp_path):
        dists = [
            CorrectionDistribution(0, [5, -3, 2], 100),
            CorrectionDistribution(1, [7], 100),
        ]
        buf = io.StringIO()
        write_corrections_csv(buf, dists)
        text = buf.getvalue()
        assert text.splitlines()[0] == "client_id,probe_index,correction_ns"
        path = tmp_path / "corr.csv"
        path.write_text(text)
        loaded = read_corrections_csv(path)
        assert loaded[0].samples == [5, -3, 2]
        assert loaded[1].samples == [7]
