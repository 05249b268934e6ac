"""TrueTime-inspired baseline ordering.

Each event timestamp becomes an uncertainty interval [ts - bound, ts + bound]
with the bound set to three standard deviations of the pooled correction
samples. Intervals are sorted by their starting point; events whose intervals
overlap (transitively, endpoints inclusive) share a rank and are emitted as
one batch.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .online import OnlineSequencer
from .sequencer import OrderedBatches
from .syncsim import CorrectionDistribution
from .timebase import ClientId, Event, LocalTimestamp, SimTime, round_half_away


@dataclass(frozen=True)
class UncertaintyInterval:
    event: Event
    lo: LocalTimestamp
    hi: LocalTimestamp


@dataclass(frozen=True)
class ErrorBound:
    """3-sigma bound over the pooled correction samples."""

    bound_ns: int
    sigma_ns: float


def compute_bound(
    samples: Iterable[CorrectionDistribution] | Iterable[int],
) -> ErrorBound:
    """Population standard deviation of all pooled samples; bound = 3 sigma."""
    pooled: list[int] = []
    for item in samples:
        if isinstance(item, CorrectionDistribution):
            pooled.extend(item.samples)
        else:
            pooled.append(int(item))
    if len(pooled) < 2:
        raise ValueError("need at least 2 correction samples for a bound")
    sigma = float(np.std(np.asarray(pooled, dtype=np.float64)))
    return ErrorBound(bound_ns=round_half_away(3.0 * sigma), sigma_ns=sigma)


def compute_client_bounds(
    dists: Iterable[CorrectionDistribution],
) -> dict[ClientId, ErrorBound]:
    """Per-client 3-sigma bounds, for sensitivity runs instead of pooling."""
    return {d.client: compute_bound(d.samples) for d in dists}


def _bound_for(bound: ErrorBound | dict[ClientId, ErrorBound], event: Event) -> int:
    if isinstance(bound, ErrorBound):
        return bound.bound_ns
    try:
        return bound[event.client].bound_ns
    except KeyError:
        raise KeyError(f"no error bound for client {event.client}") from None


def intervals_for(
    events: Sequence[Event], bound: ErrorBound | dict[ClientId, ErrorBound]
) -> list[UncertaintyInterval]:
    return [
        UncertaintyInterval(
            event=e, lo=e.ts - _bound_for(bound, e), hi=e.ts + _bound_for(bound, e)
        )
        for e in events
    ]


def baseline_order(
    events: Sequence[Event], bound: ErrorBound | dict[ClientId, ErrorBound]
) -> OrderedBatches:
    """Sort intervals by start; transitively merge overlapping ones into batches.

    Overlap is inclusive (touching endpoints overlap), and chains of pairwise
    overlaps merge into a single batch: same-rank assignment must be an
    equivalence relation, and connected components are its minimal consistent
    completion. *bound* is the pooled bound, or a per-client map for
    sensitivity runs.
    """
    if len(events) == 0:
        raise ValueError("cannot order an empty event set")
    intervals = sorted(intervals_for(events, bound), key=lambda iv: (iv.lo, iv.event.client, iv.event.seq))
    batches: OrderedBatches = []
    current = [intervals[0].event]
    reach = intervals[0].hi
    for iv in intervals[1:]:
        if iv.lo <= reach:
            current.append(iv.event)
            reach = max(reach, iv.hi)
        else:
            batches.append(current)
            current = [iv.event]
            reach = iv.hi
    batches.append(current)
    for batch in batches:
        batch.sort(key=lambda e: (e.ts, e.client, e.seq))
    return batches


def online_baseline_sequencer(
    clients: Sequence[ClientId],
    bound: ErrorBound,
    *,
    exclusion_timeout_ns: int | None = None,
    start_ns: SimTime = 0,
) -> OnlineSequencer:
    """Online variant: same stable-time protocol, interval ordering.

    Replaces the probabilistic stable timestamps with a flat margin of twice
    the error bound plus one tick: past that point a new event's interval
    cannot reach back to the frontier's.
    """
    margin = 2 * bound.bound_ns + 1

    def stable_times(t_frontier: LocalTimestamp, _frontier_client: ClientId):
        return {c: t_frontier + margin for c in clients}

    return OnlineSequencer(
        clients,
        table=None,
        exclusion_timeout_ns=exclusion_timeout_ns,
        start_ns=start_ns,
        order_fn=lambda events: baseline_order(events, bound),
        stable_times_fn=stable_times,
    )
