"""Batch fair ordering.

Builds the all-pairs preceding-probability matrix for a set of events, adds a
directed edge i -> j wherever the probability exceeds the edge threshold, and
emits the strongly connected components of that graph in topological order.
Each SCC is the smallest set of events pairwise unbeaten from outside (a
Smith set), so events inside one SCC share a rank and are emitted as one
batch; cross-batch order is the condensation's topological order.
"""

from __future__ import annotations

import csv
import heapq
from pathlib import Path
from typing import IO, Sequence

import numpy as np

from . import pairwise
from .pairwise import DifferenceTable
from .timebase import Event

Batch = list[Event]
OrderedBatches = list[Batch]

DEFAULT_EDGE_THRESHOLD = 0.5


def _event_key(event: Event) -> tuple[int, int, int]:
    return (event.ts, event.client, event.seq)


def build_prob_matrix(events: Sequence[Event], table: DifferenceTable) -> np.ndarray:
    """n x n matrix P with P[i, j] = preceding-probability of event i before j.

    Vectorised per client pair: all (i, j) entries sharing a client pair are
    answered with one binary-search batch against that pair's difference
    list. Diagonal entries are unused and left at 0.
    """
    n = len(events)
    ts = np.array([e.ts for e in events], dtype=np.int64)
    P = np.zeros((n, n), dtype=np.float64)
    by_client: dict[int, list[int]] = {}
    for idx, event in enumerate(events):
        by_client.setdefault(event.client, []).append(idx)
    groups = {c: np.asarray(ix, dtype=np.intp) for c, ix in by_client.items()}
    for ci, idx_i in groups.items():
        for cj, idx_j in groups.items():
            dist = table.get(ci, cj)
            tau = ts[idx_j][None, :] - ts[idx_i][:, None]
            counts = np.searchsorted(dist.diffs, tau.ravel(), side="left")
            P[np.ix_(idx_i, idx_j)] = counts.reshape(tau.shape) / dist.size
    np.fill_diagonal(P, 0.0)
    return P


def _tarjan_sccs(adjacency: list[np.ndarray], n: int) -> list[list[int]]:
    """Iterative Tarjan over vertices 0..n-1 in ascending order."""
    index = [-1] * n
    lowlink = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    sccs: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, edge_pos = work[-1]
            if edge_pos == 0:
                index[v] = lowlink[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            neighbors = adjacency[v]
            while edge_pos < len(neighbors):
                w = int(neighbors[edge_pos])
                edge_pos += 1
                if index[w] == -1:
                    work[-1] = (v, edge_pos)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if lowlink[v] == index[v]:
                component = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    component.append(w)
                    if w == v:
                        break
                sccs.append(component)
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
    return sccs


def order_events_from_matrix(
    events: Sequence[Event],
    P: np.ndarray,
    threshold: float = DEFAULT_EDGE_THRESHOLD,
) -> OrderedBatches:
    """Order events given an explicit preceding-probability matrix."""
    if len(events) == 0:
        raise ValueError("cannot order an empty event set")
    if not 0.0 <= threshold < 1.0:
        raise ValueError("edge threshold must be in [0, 1)")
    n = len(events)
    edges = P > threshold
    np.fill_diagonal(edges, False)
    adjacency = [np.nonzero(edges[v])[0] for v in range(n)]
    sccs = _tarjan_sccs(adjacency, n)

    # Condensation DAG over components; topological order linearised
    # deterministically by each component's minimum member key.
    comp_of = [0] * n
    for comp_id, members in enumerate(sccs):
        for v in members:
            comp_of[v] = comp_id
    n_comp = len(sccs)
    successors: list[set[int]] = [set() for _ in range(n_comp)]
    indegree = [0] * n_comp
    src, dst = np.nonzero(edges)
    for u, v in zip(src.tolist(), dst.tolist()):
        cu, cv = comp_of[u], comp_of[v]
        if cu != cv and cv not in successors[cu]:
            successors[cu].add(cv)
            indegree[cv] += 1

    comp_key = [min(_event_key(events[v]) for v in members) for members in sccs]
    ready = [(comp_key[c], c) for c in range(n_comp) if indegree[c] == 0]
    heapq.heapify(ready)
    batches: OrderedBatches = []
    while ready:
        _, comp = heapq.heappop(ready)
        members = sorted(sccs[comp], key=lambda v: _event_key(events[v]))
        batches.append([events[v] for v in members])
        for succ in successors[comp]:
            indegree[succ] -= 1
            if indegree[succ] == 0:
                heapq.heappush(ready, (comp_key[succ], succ))
    return batches


def order_events(
    events: Sequence[Event],
    table: DifferenceTable,
    threshold: float = DEFAULT_EDGE_THRESHOLD,
) -> OrderedBatches:
    """Order events into batches using precomputed difference distributions."""
    P = build_prob_matrix(events, table)
    return order_events_from_matrix(events, P, threshold)


def _sorted_pair_probability(ci: np.ndarray, cj_sorted: np.ndarray, tau: int) -> float:
    # Exact count of (ci, cj) pairs with ci - cj < tau, via one sorted side.
    # ci - cj < tau  <=>  cj > ci - tau.
    above = ci.size * cj_sorted.size - int(
        np.searchsorted(cj_sorted, ci - tau, side="right").sum()
    )
    return above / (ci.size * cj_sorted.size)


def gaussian_transitivity_check(
    means: Sequence[float],
    sigmas: Sequence[float] | float,
    sample_count: int,
    seed: int,
) -> bool:
    """Check that Gaussian corrections order equal-timestamp events by mean.

    Draws Gaussian correction samples per client, orders one equal-timestamp
    event per client, and returns True iff every batch is a singleton and the
    batch order matches ascending correction means. With Gaussian corrections
    the pairwise preference depends only on the means, so the preference
    graph is acyclic whenever the means are well separated relative to the
    sampling noise.
    """
    k = len(means)
    if k < 2:
        raise ValueError("need at least 2 clients")
    sigma_list = [float(sigmas)] * k if np.isscalar(sigmas) else [float(s) for s in sigmas]
    if len(sigma_list) != k:
        raise ValueError("sigmas must match means")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    samples = [
        np.rint(rng.normal(means[c], sigma_list[c], sample_count)).astype(np.int64)
        for c in range(k)
    ]
    sorted_samples = [np.sort(s) for s in samples]
    events = [Event(client=c, ts=0, seq=0) for c in range(k)]
    P = np.zeros((k, k))
    for i in range(k):
        for j in range(k):
            if i != j:
                P[i, j] = _sorted_pair_probability(samples[i], sorted_samples[j], 0)
    batches = order_events_from_matrix(events, P, DEFAULT_EDGE_THRESHOLD)
    if any(len(batch) != 1 for batch in batches):
        return False
    emitted = [batch[0].client for batch in batches]
    expected = sorted(range(k), key=lambda c: (means[c], c))
    return emitted == expected


def write_batches_csv(out: IO[str] | str | Path, batches: OrderedBatches) -> None:
    """Batch dump: batch_index,client_id,seq,local_ts_ns."""
    def write_rows(fh: IO[str]) -> None:
        writer = csv.writer(fh)
        writer.writerow(["batch_index", "client_id", "seq", "local_ts_ns"])
        for index, batch in enumerate(batches):
            for event in batch:
                writer.writerow([index, event.client, event.seq, event.ts])

    if isinstance(out, (str, Path)):
        with open(out, "w", newline="", encoding="ascii") as fh:
            write_rows(fh)
    else:
        write_rows(out)
