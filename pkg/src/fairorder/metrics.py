"""Fairness metrics and clock-error bound calculators.

The Rank Agreement Score (RAS) compares an ordered-batches output against the
ground-truth generation order: +1 per correctly ordered cross-batch pair, -1
per inverted pair, 0 per same-batch (unordered) pair, normalized by the total
number of pairs. Same-client pairs are scored like any other pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .sequencer import OrderedBatches

GroundTruth = Sequence[tuple[int, int]]  # (client, seq) in true generation order


@dataclass(frozen=True)
class RasScore:
    value: float
    correct: int
    incorrect: int
    unordered: int

    @property
    def total_pairs(self) -> int:
        return self.correct + self.incorrect + self.unordered


def _batch_positions(batches: OrderedBatches, truth: GroundTruth) -> np.ndarray:
    batch_of: dict[tuple[int, int], int] = {}
    for index, batch in enumerate(batches):
        for event in batch:
            key = event.key()
            if key in batch_of:
                raise ValueError(f"event {key} appears in more than one batch")
            batch_of[key] = index
    truth_keys = [tuple(k) for k in truth]
    if len(set(truth_keys)) != len(truth_keys):
        raise ValueError("ground truth repeats an event")
    if set(batch_of) != set(truth_keys):
        raise ValueError("batches and ground truth cover different event sets")
    return np.array([batch_of[k] for k in truth_keys], dtype=np.int64)


def _pair_counts(ranks: np.ndarray) -> tuple[int, int, int]:
    # ranks[p] = batch index of the event at truth position p. A pair (p, q)
    # with p < q is correct when the earlier-truth event sits in an earlier batch.
    n = ranks.size
    diff = ranks[None, :] - ranks[:, None]
    upper = np.triu_indices(n, k=1)
    vals = diff[upper]
    correct = int(np.count_nonzero(vals > 0))
    incorrect = int(np.count_nonzero(vals < 0))
    unordered = vals.size - correct - incorrect
    return correct, incorrect, unordered


def ras(batches: OrderedBatches, truth: GroundTruth) -> RasScore:
    """Rank Agreement Score of *batches* against the true generation order."""
    ranks = _batch_positions(batches, truth)
    if ranks.size < 2:
        return RasScore(value=0.0, correct=0, incorrect=0, unordered=0)
    correct, incorrect, unordered = _pair_counts(ranks)
    total = correct + incorrect + unordered
    return RasScore(
        value=(correct - incorrect) / total,
        correct=correct,
        incorrect=incorrect,
        unordered=unordered,
    )


def windowed_ras(batches: OrderedBatches, truth: GroundTruth, window: int) -> float:
    """Mean RAS over consecutive non-overlapping ground-truth windows.

    Only pairs inside the same window are scored, using the batch order
    induced by the full output; a trailing partial window is dropped.
    """
    if window < 2:
        raise ValueError("window must be >= 2")
    ranks = _batch_positions(batches, truth)
    n_windows = ranks.size // window
    if n_windows < 1:
        raise ValueError(f"need at least one full window of {window} events")
    scores = []
    for w in range(n_windows):
        sub = ranks[w * window : (w + 1) * window]
        correct, incorrect, unordered = _pair_counts(sub)
        scores.append((correct - incorrect) / (correct + incorrect + unordered))
    return float(np.mean(scores))


def rank_stats(ranks: Sequence[Sequence[int]] | np.ndarray) -> tuple[np.ndarray, float]:
    """Per-client average ranks and the population variance of those averages.

    Each row is one trial's ranks, a permutation of 1..K.
    """
    matrix = np.asarray(ranks, dtype=np.int64)
    if matrix.ndim != 2 or matrix.size == 0:
        raise ValueError("ranks must be a non-empty trials x clients matrix")
    k = matrix.shape[1]
    expected = np.arange(1, k + 1)
    for row in matrix:
        if not np.array_equal(np.sort(row), expected):
            raise ValueError(f"row {row.tolist()} is not a permutation of 1..{k}")
    means = matrix.mean(axis=0)
    return means, float(np.var(means))


def drift_bound(rho_ppm: float, window_ns: float) -> float:
    """Worst-case relative drift accrued between two clocks over one probe
    interval: 2 * rho * W (ns)."""
    if rho_ppm < 0 or window_ns < 0:
        raise ValueError("rho and W must be non-negative")
    return 2.0 * rho_ppm * window_ns / 1e6


def offset_bound(u_ns: float, n: int) -> float:
    """Lower bound on achievable clock offset error for n clocks under delay
    uncertainty U: U * (1 - 1/n) (ns)."""
    if u_ns < 0:
        raise ValueError("U must be non-negative")
    if n < 2:
        raise ValueError("need at least 2 clocks")
    return u_ns * (1.0 - 1.0 / n)
