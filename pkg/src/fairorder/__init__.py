"""Probabilistic fair ordering of timestamped events.

Library layout:

- ``timebase``: integer-nanosecond time types and the virtual clock model.
- ``syncsim``: NTP-style sync simulation producing correction distributions.
- ``pairwise``: preceding-probability estimation, direct and precomputed.
- ``sequencer``: Smith-set batch ordering over the probability tournament.
- ``online``: stable-time online sequencing with watermarks and heartbeats.
- ``baseline``: TrueTime-style uncertainty-interval ordering.
- ``metrics``: Rank Agreement Score and clock-error bound calculators.
- ``harness``: deterministic simulation driver, sweeps, hedging study.
- ``figures``: renders experiment CSVs to images.
- ``cli``: command-line entry point.
"""

__version__ = "0.1.0"

from .baseline import ErrorBound, baseline_order, compute_bound
from .metrics import RasScore, drift_bound, offset_bound, ras, windowed_ras
from .online import Heartbeat, OnlineSequencer
from .pairwise import (
    DifferenceDistribution,
    DifferenceTable,
    pairwise_probability,
    pairwise_query,
    precompute_diffs,
)
from .sequencer import build_prob_matrix, order_events
from .syncsim import CorrectionDistribution, LatencyModel, run_sync
from .timebase import Event, VirtualClock, clock_read, clock_step

__all__ = [
    "__version__",
    "CorrectionDistribution",
    "DifferenceDistribution",
    "DifferenceTable",
    "ErrorBound",
    "Event",
    "Heartbeat",
    "LatencyModel",
    "OnlineSequencer",
    "RasScore",
    "VirtualClock",
    "baseline_order",
    "build_prob_matrix",
    "clock_read",
    "clock_step",
    "compute_bound",
    "drift_bound",
    "offset_bound",
    "order_events",
    "pairwise_probability",
    "pairwise_query",
    "precompute_diffs",
    "ras",
    "run_sync",
    "windowed_ras",
]
