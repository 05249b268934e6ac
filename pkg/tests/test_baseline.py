import math

import pytest

from fairorder.baseline import (
    ErrorBound,
    baseline_order,
    compute_bound,
    compute_client_bounds,
    intervals_for,
    online_baseline_sequencer,
)
from fairorder.online import Heartbeat
from fairorder.syncsim import CorrectionDistribution
from fairorder.timebase import Event


class TestComputeBound:
    def test_two_point_set(self):
        bound = compute_bound([-1, 1])
        assert bound.sigma_ns == 1.0
        assert bound.bound_ns == 3

    def test_all_equal_gives_zero(self):
        assert compute_bound([5, 5, 5]).bound_ns == 0

    def test_skewed_set_rounds(self):
        bound = compute_bound([0, 0, 0, 6])
        assert bound.sigma_ns == pytest.approx(math.sqrt(6.75))
        assert bound.bound_ns == 8

    def test_pools_across_clients(self):
        dists = [
            CorrectionDistribution(0, [-1], 10),
            CorrectionDistribution(1, [1], 10),
        ]
        assert compute_bound(dists).bound_ns == 3

    def test_requires_two_samples(self):
        with pytest.raises(ValueError):
            compute_bound([4])


def ev(client, ts, seq=0):
    return Event(client, ts, seq)


class TestBaselineOrder:
    def test_disjoint_intervals_separate_batches(self):
        batches = baseline_order([ev(0, 0), ev(1, 10)], ErrorBound(3, 1.0))
        assert batches == [[ev(0, 0)], [ev(1, 10)]]

    def test_overlapping_intervals_share_a_batch(self):
        batches = baseline_order([ev(0, 0), ev(1, 5)], ErrorBound(3, 1.0))
        assert batches == [[ev(0, 0), ev(1, 5)]]

    def test_chain_overlap_merges_transitively(self):
        # [-3,3], [2,8], [7,13]: the ends never overlap directly but the
        # chain connects them.
        batches = baseline_order([ev(0, 0), ev(1, 5), ev(2, 10)], ErrorBound(3, 1.0))
        assert len(batches) == 1
        assert [e.ts for e in batches[0]] == [0, 5, 10]

    def test_touching_endpoints_overlap(self):
        batches = baseline_order([ev(0, 0), ev(1, 6)], ErrorBound(3, 1.0))
        assert len(batches) == 1

    def test_zero_bound_distinct_timestamps_total_order(self):
        events = [ev(0, 30), ev(1, 10), ev(2, 20)]
        batches = baseline_order(events, ErrorBound(0, 0.0))
        assert [b[0].ts for b in batches] == [10, 20, 30]
        assert all(len(b) == 1 for b in batches)

    def test_partition(self):
        events = [ev(c, ts, s) for s, ts in enumerate((5, 9, 40)) for c in (0, 1)]
        batches = baseline_order(events, ErrorBound(2, 0.6))
        flat = [e.key() for b in batches for e in b]
        assert sorted(flat) == sorted(e.key() for e in events)

    def test_certain_pairs_never_inverted(self):
        bound = ErrorBound(4, 1.3)
        events = [ev(0, 0), ev(1, 100), ev(0, 200, 1)]
        batches = baseline_order(events, bound)
        positions = {e.key(): i for i, batch in enumerate(batches) for e in batch}
        for a in events:
            for b in events:
                if a.ts + bound.bound_ns < b.ts - bound.bound_ns:
                    assert positions[a.key()] < positions[b.key()]

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            baseline_order([], ErrorBound(0, 0.0))


def test_intervals_for():
    iv = intervals_for([ev(0, 100)], ErrorBound(7, 2.0))[0]
    assert (iv.lo, iv.hi) == (93, 107)


class TestPerClientBounds:
    def test_each_client_gets_its_own_sigma(self):
        dists = [
            CorrectionDistribution(0, [-1, 1], 10),
            CorrectionDistribution(1, [-10, 10], 10),
        ]
        bounds = compute_client_bounds(dists)
        assert bounds[0].bound_ns == 3
        assert bounds[1].bound_ns == 30

    def test_order_uses_per_event_bound(self):
        bounds = {0: ErrorBound(1, 0.3), 1: ErrorBound(50, 17.0)}
        # Client 0's tight interval [99,101] still overlaps client 1's wide
        # [60,160]; with a shared bound of 1 they would be disjoint.
        batches = baseline_order([ev(0, 100), ev(1, 110)], bounds)
        assert len(batches) == 1

    def test_missing_client_bound_raises(self):
        with pytest.raises(KeyError):
            baseline_order([ev(0, 100), ev(2, 110)], {0: ErrorBound(1, 0.3)})


class TestOnlineBaseline:
    def test_stable_margin_is_twice_bound_plus_tick(self):
        seq = online_baseline_sequencer([0, 1], ErrorBound(10, 3.0))
        seq.on_event(Event(0, 100, 0), 100)
        assert seq.on_heartbeat(Heartbeat(0, 120), 110) == []
        assert seq.on_heartbeat(Heartbeat(1, 120), 111) == []  # 120 < 100+21
        batches = seq.on_heartbeat(Heartbeat(1, 121), 112)
        assert batches == []  # client 0 watermark still 120
        batches = seq.on_heartbeat(Heartbeat(0, 121), 113)
        assert batches == [[Event(0, 100, 0)]]

    def test_orders_with_interval_rule(self):
        seq = online_baseline_sequencer([0, 1], ErrorBound(3, 1.0))
        seq.on_event(Event(0, 0, 0), 0)
        seq.on_event(Event(1, 5, 0), 5)
        seq.on_heartbeat(Heartbeat(0, 50), 20)
        batches = seq.on_heartbeat(Heartbeat(1, 50), 21)
        assert batches == [[Event(0, 0, 0), Event(1, 5, 0)]]
