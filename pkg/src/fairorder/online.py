"""Online sequencing with stable timestamps.

Arriving events are buffered; per-client watermarks advance with heartbeats
and in-order event arrivals. On every arrival the buffer is ordered, a
frontier event is chosen from the last batch, and a stable timestamp is
computed for each client: the earliest local time from which a new event
would, with probability >= p_stable, rank strictly after the frontier. Only
when every active client's watermark has passed its stable timestamp are the
buffered batches emitted and the buffer cleared.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Callable, Iterable, Sequence

from . import sequencer
from .pairwise import DifferenceTable
from .sequencer import OrderedBatches
from .timebase import ClientId, Event, LocalTimestamp, SimTime

DEFAULT_P_STABLE = 0.999

OrderFn = Callable[[list[Event]], OrderedBatches]
StableTimesFn = Callable[[LocalTimestamp, ClientId], dict[ClientId, LocalTimestamp]]


@dataclass(frozen=True)
class Heartbeat:
    client: ClientId
    ts: LocalTimestamp


@dataclass(frozen=True)
class EmissionRecord:
    emit_ns: SimTime
    batch_index: int
    event: Event


def stable_margin(dist, p_stable: float) -> int:
    """Smallest tau with count(diffs < tau) / |diffs| >= p_stable.

    On a sorted difference list this is the value at rank ceil(p * |D|) plus
    one tick, equivalent to a binary search over candidate future timestamps.
    """
    if not 0.5 < p_stable <= 1.0:
        raise ValueError("p_stable must be in (0.5, 1]")
    rank = math.ceil(p_stable * dist.size)
    return int(dist.diffs[rank - 1]) + 1


def stability_margin_summary(
    table: DifferenceTable, p_stable: float = DEFAULT_P_STABLE
) -> float:
    """Mean binding stability margin over all frontier clients.

    For a frontier at client x, emission waits until every client's watermark
    passes its stable timestamp, so the wait is governed by the largest
    per-client margin. Averaging that maximum over all possible frontier
    clients summarises how far stable timestamps reach past the frontier.
    """
    clients = table.clients
    worst = [
        max(stable_margin(table.get(x, c), p_stable) for c in clients) for x in clients
    ]
    return sum(worst) / len(worst)


class OnlineSequencer:
    """Event-loop sequencer: buffer, watermarks, stable-time emission.

    Mutating calls (on_event / on_heartbeat) must be externally serialized;
    the difference table is an immutable shared read.
    """

    def __init__(
        self,
        clients: Sequence[ClientId],
        table: DifferenceTable | None,
        *,
        p_stable: float = DEFAULT_P_STABLE,
        threshold: float = sequencer.DEFAULT_EDGE_THRESHOLD,
        exclusion_timeout_ns: int | None = None,
        start_ns: SimTime = 0,
        order_fn: OrderFn | None = None,
        stable_times_fn: StableTimesFn | None = None,
    ):
        if table is None and (order_fn is None or stable_times_fn is None):
            raise ValueError("need a difference table or explicit order/stable functions")
        self.clients = list(clients)
        self.table = table
        self.p_stable = p_stable
        self.threshold = threshold
        self.exclusion_timeout_ns = exclusion_timeout_ns
        self._order_fn = order_fn or (lambda events: sequencer.order_events(events, table, threshold))
        self._stable_times_fn = stable_times_fn or self.stable_times
        self._now: SimTime = start_ns
        self._buffer: list[Event] = []
        self._watermark: dict[ClientId, LocalTimestamp | None] = {c: None for c in self.clients}
        self._last_heard: dict[ClientId, SimTime] = {c: start_ns for c in self.clients}
        self._last_seq: dict[ClientId, int] = {}
        self._last_ts: dict[ClientId, LocalTimestamp] = {}
        self._seen_keys: set[tuple[int, int]] = set()
        self._cache: tuple[OrderedBatches, LocalTimestamp, ClientId, dict[ClientId, int]] | None = None
        self._batch_counter = 0
        self.emission_log: list[EmissionRecord] = []
        self.margin_samples: list[int] = []

    # -- protocol events ---------------------------------------------------

    def on_event(self, event: Event, arrival_ns: SimTime) -> OrderedBatches:
        """Buffer an arriving event, advance its client's watermark, attempt."""
        self._advance(arrival_ns, event.client)
        self._check_fifo(event)
        self._buffer.append(event)
        self._cache = None
        watermark = self._watermark[event.client]
        if watermark is None or event.ts > watermark:
            self._watermark[event.client] = event.ts
        return self._attempt_order()

    def on_heartbeat(self, heartbeat: Heartbeat, arrival_ns: SimTime) -> OrderedBatches:
        """Raise the client's watermark (max-update), then attempt."""
        if heartbeat.client not in self._watermark:
            raise KeyError(f"unknown client {heartbeat.client}")
        self._advance(arrival_ns, heartbeat.client)
        watermark = self._watermark[heartbeat.client]
        if watermark is None or heartbeat.ts > watermark:
            self._watermark[heartbeat.client] = heartbeat.ts
        return self._attempt_order()

    def stable_times(
        self, t_frontier: LocalTimestamp, frontier_client: ClientId
    ) -> dict[ClientId, LocalTimestamp]:
        """Per-client earliest local time safely ranked after the frontier."""
        assert self.table is not None
        times: dict[ClientId, LocalTimestamp] = {}
        for c in self.clients:
            margin = stable_margin(self.table.get(frontier_client, c), self.p_stable)
            times[c] = t_frontier + margin
        return times

    # -- internals -----------------------------------------------------------

    def _advance(self, arrival_ns: SimTime, client: ClientId) -> None:
        if arrival_ns > self._now:
            self._now = arrival_ns
        self._last_heard[client] = max(self._last_heard.get(client, arrival_ns), arrival_ns)

    def _check_fifo(self, event: Event) -> None:
        if event.client not in self._watermark:
            raise KeyError(f"unknown client {event.client}")
        if event.key() in self._seen_keys:
            raise ValueError(f"duplicate event {event.key()}")
        last_seq = self._last_seq.get(event.client)
        if last_seq is not None and event.seq <= last_seq:
            raise ValueError(
                f"client {event.client}: seq {event.seq} arrived after seq {last_seq}"
            )
        last_ts = self._last_ts.get(event.client)
        if last_ts is not None and event.ts < last_ts:
            raise ValueError(
                f"client {event.client}: timestamp {event.ts} regressed below {last_ts}"
            )
        self._seen_keys.add(event.key())
        self._last_seq[event.client] = event.seq
        self._last_ts[event.client] = event.ts

    def _active_clients(self) -> list[ClientId]:
        if self.exclusion_timeout_ns is None:
            return self.clients
        cutoff = self._now - self.exclusion_timeout_ns
        return [c for c in self.clients if self._last_heard[c] >= cutoff]

    def _attempt_order(self) -> OrderedBatches:
        if not self._buffer:
            return []
        if self._cache is None:
            batches = self._order_fn(list(self._buffer))
            frontier = max(batches[-1], key=lambda e: (e.ts, e.client, e.seq))
            stable_until = self._stable_times_fn(frontier.ts, frontier.client)
            self._cache = (batches, frontier.ts, frontier.client, stable_until)
            self.margin_samples.extend(t - frontier.ts for t in stable_until.values())
        batches, _, _, stable_until = self._cache
        for c in self._active_clients():
            watermark = self._watermark[c]
            if watermark is None or watermark < stable_until[c]:
                return []
        for batch in batches:
            for event in batch:
                self.emission_log.append(EmissionRecord(self._now, self._batch_counter, event))
            self._batch_counter += 1
        self._buffer.clear()
        self._cache = None
        return batches

    @property
    def buffered(self) -> list[Event]:
        return list(self._buffer)

    @property
    def emitted_batches(self) -> int:
        return self._batch_counter


def write_emission_log(out: IO[str] | str | Path, records: Iterable[EmissionRecord]) -> None:
    """Emission log: emit_sim_time_ns,batch_index,client_id,seq,local_ts_ns."""
    def write_rows(fh: IO[str]) -> None:
        writer = csv.writer(fh)
        writer.writerow(["emit_sim_time_ns", "batch_index", "client_id", "seq", "local_ts_ns"])
        for rec in records:
            writer.writerow([rec.emit_ns, rec.batch_index, rec.event.client, rec.event.seq, rec.event.ts])

    if isinstance(out, (str, Path)):
        with open(out, "w", newline="", encoding="ascii") as fh:
            write_rows(fh)
    else:
        write_rows(out)
