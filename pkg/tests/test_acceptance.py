"""Acceptance suite.

One test per acceptance criterion, each printing a PASS/FAIL line with its
measured runtime (run with ``pytest -s tests/test_acceptance.py`` to see the
lines as they complete). Criteria marked exact use no tolerance at all.
"""

import io
import time
from dataclasses import replace

import numpy as np
import pytest

from fairorder.harness import (
    HedgingConfig,
    SimConfig,
    measure_precompute_speedup,
    run_hedging,
    run_scenario,
    run_trial,
    sweep,
    write_hedging_csv,
    write_results_csv,
)
from fairorder.metrics import drift_bound, offset_bound, ras
from fairorder.pairwise import pairwise_probability, pairwise_query, precompute_diffs
from fairorder.sequencer import build_prob_matrix, gaussian_transitivity_check, order_events
from fairorder.syncsim import CorrectionDistribution
from fairorder.timebase import Event

DESK = SimConfig(n_clients=25, n_events=100, trials=3, seed=2026)


class _Criterion:
    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        self._start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self._start
        status = "PASS" if exc_type is None else "FAIL"
        print(f"[{status}] {self.name} ({elapsed:.1f}s)")
        return False


def test_oracle_equivalence_alg1_vs_alg23():
    with _Criterion("oracle equivalence: query path equals direct estimator on 10000 cases"):
        start = time.perf_counter()
        rng = np.random.default_rng(515)
        for _ in range(10_000):
            nx, ny = int(rng.integers(1, 21)), int(rng.integers(1, 21))
            cx = CorrectionDistribution(0, rng.integers(-100, 101, nx).tolist(), 32)
            cy = CorrectionDistribution(1, rng.integers(-100, 101, ny).tolist(), 32)
            dist = precompute_diffs([cx, cy]).get(0, 1)
            lo, hi = int(dist.diffs.min()), int(dist.diffs.max())
            x = int(rng.integers(-50, 51))
            y = x + int(rng.integers(lo, hi + 1))
            direct = pairwise_probability(x, y, cx, cy)
            fast = pairwise_query(Event(0, x, 0), Event(1, y, 0), dist)
            assert fast == direct
        assert time.perf_counter() - start < 10.0


def test_intransitivity_witness_efron_triple():
    with _Criterion("intransitivity witness: cyclic 5/9 probabilities collapse to one batch"):
        dists = [
            CorrectionDistribution(0, [2, 4, 9], 3),
            CorrectionDistribution(1, [1, 6, 8], 3),
            CorrectionDistribution(2, [3, 5, 7], 3),
        ]
        table = precompute_diffs(dists)
        events = [Event(c, 0, 0) for c in range(3)]
        P = build_prob_matrix(events, table)
        assert P[1, 0] == 5 / 9
        assert P[2, 1] == 5 / 9
        assert P[0, 2] == 5 / 9
        batches = order_events(events, table)
        assert len(batches) == 1
        assert {e.client for e in batches[0]} == {0, 1, 2}
        assert order_events(list(reversed(events)), table) == batches


def test_gaussian_corrections_sort_by_mean():
    with _Criterion("gaussian transitivity: 5 well-separated clients sort by mean in >= 99/100 trials"):
        start = time.perf_counter()
        sigma, samples = 100.0, 5000
        gap = 25.0  # >= 5 * sigma / sqrt(samples) = 7.08
        means = [1000.0 + k * gap for k in range(5)]
        passes = sum(
            gaussian_transitivity_check(means, sigma, samples, seed=s) for s in range(100)
        )
        assert passes >= 99
        assert time.perf_counter() - start < 60.0


def test_fairness_versus_delay_trend():
    with _Criterion("fairness vs delay: perfect at 500us, probabilistic wins mid-range, baseline >= 0 at 0"):
        start = time.perf_counter()
        wide = run_scenario(replace(DESK, inter_event_delay_ns=500_000))
        assert wide.mean_ras_tommy == 1.0
        assert wide.mean_ras_baseline == 1.0

        mid = None
        for delay in (10_000, 5_000, 20_000, 2_000):
            candidate = run_scenario(replace(DESK, inter_event_delay_ns=delay))
            if candidate.mean_ras_baseline < 0.5:
                mid = candidate
                break
        assert mid is not None, "no mid-range delay with baseline RAS < 0.5"
        assert mid.mean_ras_tommy > mid.mean_ras_baseline

        zero = run_scenario(replace(DESK, inter_event_delay_ns=0))
        assert zero.mean_ras_baseline >= 0.0
        assert time.perf_counter() - start < 300.0


def test_edge_threshold_trend():
    with _Criterion("edge threshold: RAS(0.5) >= RAS(0.7) and > RAS(0.3) on shared seeds"):
        start = time.perf_counter()
        cfg = replace(DESK, inter_event_delay_ns=10_000)
        by_threshold = {
            r.param: r.mean_ras_tommy for r in sweep("threshold", cfg, values=[0.3, 0.5, 0.7])
        }
        assert by_threshold[0.5] >= by_threshold[0.7]
        assert by_threshold[0.5] > by_threshold[0.3]
        assert time.perf_counter() - start < 300.0


def test_client_count_neutrality():
    with _Criterion("client count: RAS spread < 0.05 across 5/10/25 clients"):
        values = [r.mean_ras_tommy for r in sweep("clients", DESK, values=[5, 10, 25])]
        assert max(values) - min(values) < 0.05


def test_windowed_ras_event_count_neutrality():
    with _Criterion("event count: windowed RAS spread < 0.05 across 50/100/200 events"):
        values = [r.mean_aux1 for r in sweep("events", DESK, values=[50, 100, 200])]
        assert max(values) - min(values) < 0.05


def test_stable_margin_grows_with_drift():
    with _Criterion("stable timestamps: margin non-decreasing across 0/20/50/100 ppm drift"):
        # Drift contributes 2*rho*W per probe interval W; a 500 ms interval
        # keeps the 20 ppm point clear of the quantile estimation noise.
        cfg = replace(DESK, sync_interval_ns=500_000_000)
        margins = [r.mean_aux1 for r in sweep("stable", cfg, values=[0.0, 20.0, 50.0, 100.0])]
        assert all(a <= b for a, b in zip(margins, margins[1:]))


def test_precompute_speedup_monotone():
    with _Criterion("precompute speedup: >= 1 and increasing over 5/10/20 clients"):
        speedups = [
            measure_precompute_speedup(n, seed=DESK.seed).speedup for n in (5, 10, 20)
        ]
        assert all(s >= 1.0 for s in speedups)
        assert speedups[0] < speedups[1] < speedups[2]


def test_error_bound_calculators():
    with _Criterion("error bound calculators: 2*rho*W = 800 ns and U*(1-1/n) = 20 us exactly"):
        assert drift_bound(20.0, 20_000_000) == 800.0
        assert offset_bound(40_000, 2) == 20_000.0


def test_ras_unit_suite():
    with _Criterion("RAS: tagged examples exact; antisymmetry and one-batch-zero on 1000 cases"):
        truth = [(0, 0), (1, 0), (2, 0)]
        singles = lambda order: [[Event(c, 0, 0)] for c in order]
        assert ras(singles([0, 1, 2]), truth).value == 1.0
        assert ras(singles([2, 1, 0]), truth).value == -1.0
        grouped = [[Event(0, 0, 0), Event(1, 0, 0)], [Event(2, 0, 0)]]
        assert ras(grouped, truth).value == pytest.approx(2 / 3)

        rng = np.random.default_rng(99)
        for _ in range(1000):
            n = int(rng.integers(2, 10))
            case_truth = [(c, 0) for c in range(n)]
            order = rng.permutation(n).tolist()
            cuts = sorted(set(rng.integers(1, n, size=int(rng.integers(0, n))).tolist()))
            batches, prev = [], 0
            for cut in cuts + [n]:
                if cut > prev:
                    batches.append([Event(c, 0, 0) for c in order[prev:cut]])
                    prev = cut
            score = ras(batches, case_truth)
            reverse = ras(list(reversed(batches)), case_truth)
            assert (reverse.correct, reverse.incorrect) == (score.incorrect, score.correct)
            if score.unordered == 0:
                assert reverse.value == -score.value
            assert ras([[Event(c, 0, 0) for c in range(n)]], case_truth).value == 0.0


def test_hedging_rank_variance():
    with _Criterion("hedging: rotation turns variance 8.25 into 0; stochastic case halves variance"):
        start = time.perf_counter()
        fixed = run_hedging(HedgingConfig(sigma_us=0.0, trials=10, seed=0))
        assert fixed.policies["no-hedging"][1] == pytest.approx(8.25)
        assert fixed.policies["hedging"][1] == 0.0

        noisy = run_hedging(HedgingConfig(sigma_us=1.0, trials=1000, seed=DESK.seed))
        assert noisy.policies["hedging"][1] <= 0.5 * noisy.policies["no-hedging"][1]
        assert time.perf_counter() - start < 30.0


def test_experiment_reruns_are_byte_identical():
    with _Criterion("determinism: re-running an experiment reproduces CSV bytes"):
        small = replace(DESK, n_clients=6, n_events=24, correction_capacity=25, trials=2)

        def results_bytes() -> bytes:
            buf = io.StringIO()
            write_results_csv(buf, [run_scenario(small)])
            write_results_csv(buf, sweep("threshold", small, values=[0.3, 0.5]))
            write_results_csv(buf, sweep("stable", small, values=[0.0, 50.0]))
            return buf.getvalue().encode()

        def hedging_bytes() -> bytes:
            buf = io.StringIO()
            write_hedging_csv(buf, run_hedging(HedgingConfig(trials=200, seed=small.seed)))
            return buf.getvalue().encode()

        assert results_bytes() == results_bytes()
        assert hedging_bytes() == hedging_bytes()

        trial_a = run_trial(small, 0)
        trial_b = run_trial(small, 0)
        assert [r.event.key() for r in trial_a.emission_log] == [
            r.event.key() for r in trial_b.emission_log
        ]
