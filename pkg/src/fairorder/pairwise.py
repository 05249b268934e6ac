"""Preceding-probability engine.

Given two events with local timestamps x and y and the clients' empirical
clock-correction samples Cx and Cy, the probability that the first event
truly happened before the second is estimated as

    Pr(x + cx < y + cy) = |{(cx, cy) : cx - cy < y - x}| / (|Cx| * |Cy|)

with a strict inequality, so sample pairs tying exactly at the threshold
contribute to neither direction. ``pairwise_probability`` evaluates this by
direct enumeration; ``precompute_diffs`` + ``pairwise_query`` answer the same
question in O(log) time from sorted pairwise-difference lists and must agree
with the direct path exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .syncsim import CorrectionDistribution
from .timebase import ClientId, Event, LocalTimestamp, SimTime

# Row block size keeps the brute-force outer difference within ~32MB.
_BLOCK_ELEMENTS = 4_000_000


def _samples_array(dist: CorrectionDistribution | Sequence[int]) -> np.ndarray:
    if isinstance(dist, CorrectionDistribution):
        return dist.as_array()
    arr = np.asarray(dist, dtype=np.int64)
    if arr.size == 0:
        raise ValueError("empty correction distribution")
    return arr


@dataclass(frozen=True)
class PrecedingProbability:
    """Probability in [0, 1] that one event truly preceded another."""

    value: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"probability out of range: {self.value}")


@dataclass(frozen=True)
class DifferenceDistribution:
    """Sorted multiset of correction differences c_i - c_j for a client pair."""

    pair: tuple[ClientId, ClientId]
    diffs: np.ndarray
    built_at: SimTime = 0

    @property
    def size(self) -> int:
        return int(self.diffs.size)


def pairwise_probability(
    x: LocalTimestamp,
    y: LocalTimestamp,
    cx: CorrectionDistribution | Sequence[int],
    cy: CorrectionDistribution | Sequence[int],
) -> float:
    """Direct estimator: fraction of sample pairs with cx - cy < y - x.

    Enumerates all |Cx| * |Cy| pairs; quadratic in the sample counts. This is
    the reference path that the precomputed query path is checked against.
    """
    cx_arr = _samples_array(cx)
    cy_arr = _samples_array(cy)
    tau = y - x
    total = cx_arr.size * cy_arr.size
    count = 0
    block = max(1, _BLOCK_ELEMENTS // cy_arr.size)
    for start in range(0, cx_arr.size, block):
        rows = cx_arr[start : start + block]
        count += int(np.count_nonzero(rows[:, None] - cy_arr[None, :] < tau))
    return count / total


def precompute_diffs(
    dists: Mapping[ClientId, CorrectionDistribution] | Iterable[CorrectionDistribution],
    *,
    built_at: SimTime = 0,
) -> "DifferenceTable":
    """Build sorted difference lists for every ordered client pair."""
    if isinstance(dists, Mapping):
        by_client = dict(dists)
    else:
        by_client = {d.client: d for d in dists}
    arrays = {c: d.as_array() for c, d in by_client.items()}
    table: dict[tuple[ClientId, ClientId], DifferenceDistribution] = {}
    for i, ci in arrays.items():
        for j, cj in arrays.items():
            diffs = (ci[:, None] - cj[None, :]).ravel()
            diffs.sort()
            table[(i, j)] = DifferenceDistribution(pair=(i, j), diffs=diffs, built_at=built_at)
    return DifferenceTable(table)


class DifferenceTable:
    """All-pairs difference distributions, immutable once built."""

    def __init__(self, pairs: Mapping[tuple[ClientId, ClientId], DifferenceDistribution]):
        self._pairs = dict(pairs)
        self.clients = sorted({i for i, _ in self._pairs})

    def get(self, i: ClientId, j: ClientId) -> DifferenceDistribution:
        try:
            return self._pairs[(i, j)]
        except KeyError:
            raise KeyError(f"no difference distribution for client pair ({i}, {j})") from None

    def __contains__(self, pair: tuple[ClientId, ClientId]) -> bool:
        return pair in self._pairs

    def items(self):
        return self._pairs.items()


def count_below(dist: DifferenceDistribution, tau: int) -> int:
    """Number of stored differences strictly below tau (binary search)."""
    return int(np.searchsorted(dist.diffs, tau, side="left"))


def pairwise_query(e_i: Event, e_j: Event, dist: DifferenceDistribution) -> float:
    """O(log) preceding-probability from a precomputed difference list.

    Equals pairwise_probability(e_i.ts, e_j.ts, C_i, C_j) exactly when *dist*
    was precomputed from the same correction samples.
    """
    if dist.pair != (e_i.client, e_j.client):
        raise ValueError(
            f"difference distribution is for pair {dist.pair}, "
            f"got events from ({e_i.client}, {e_j.client})"
        )
    tau = e_j.ts - e_i.ts
    return count_below(dist, tau) / dist.size
