"""Integer-nanosecond time types and the per-client virtual clock model.

All simulated time is kept in integer nanoseconds so that ordering decisions
never depend on platform floating-point behaviour. ``SimTime`` is true
(global) simulated time; ``LocalTimestamp`` is what a client's clock reads.
Both are plain ``int`` ticks constrained to the signed 64-bit range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

SimTime = int
LocalTimestamp = int
ClientId = int

I64_MIN = -(2**63)
I64_MAX = 2**63 - 1

# A clock running slower than -10^6 ppm would run backwards.
MIN_DRIFT_PPM = -1_000_000.0


def check_ticks(value: int, context: str = "tick arithmetic") -> int:
    """Raise OverflowError if *value* leaves the signed 64-bit tick range."""
    if not I64_MIN <= value <= I64_MAX:
        raise OverflowError(f"{context} overflows 64-bit ticks: {value}")
    return value


def round_half_away(x: float) -> int:
    """Round to nearest integer, ties away from zero."""
    if x >= 0.0:
        return int(math.floor(x + 0.5))
    return int(math.ceil(x - 0.5))


@dataclass(frozen=True)
class Event:
    """One timestamped event submitted for ordering.

    ``true_time`` is ground truth carried by simulator-generated events only;
    ordering code must never read it.
    """

    client: ClientId
    ts: LocalTimestamp
    seq: int
    true_time: SimTime | None = None

    def key(self) -> tuple[int, int]:
        return (self.client, self.seq)


@dataclass(frozen=True)
class VirtualClock:
    """Affine clock model: constant offset plus constant-rate drift.

    ``drift_ppm`` is the rate error in parts per million; drift accrues
    linearly from ``epoch``. Reads are strictly increasing in true time as
    long as drift_ppm > -10^6.
    """

    offset_ns: int = 0
    drift_ppm: float = 0.0
    epoch: SimTime = 0

    def __post_init__(self) -> None:
        check_ticks(self.offset_ns, "clock offset")
        if self.drift_ppm <= MIN_DRIFT_PPM:
            raise ValueError(f"drift_ppm must exceed {MIN_DRIFT_PPM}")


def clock_read(clock: VirtualClock, now: SimTime) -> LocalTimestamp:
    """Read a virtual clock at true time *now*.

    Local time is now + offset + drift_ppm * (now - epoch) / 10^6, the drift
    term rounded to the nearest tick (ties away from zero).
    """
    if now < clock.epoch:
        raise ValueError(f"clock read at {now} precedes epoch {clock.epoch}")
    drift_ns = round_half_away(clock.drift_ppm * (now - clock.epoch) / 1e6)
    return check_ticks(now + clock.offset_ns + drift_ns, "clock read")


def clock_step(clock: VirtualClock, adjustment_ns: int) -> VirtualClock:
    """Apply a synchronization adjustment to the clock's offset."""
    new_offset = check_ticks(clock.offset_ns + adjustment_ns, "clock step")
    return replace(clock, offset_ns=new_offset)


class EventStream:
    """Per-client event factory enforcing the seq/timestamp ordering invariant.

    Within one client, sequence numbers increase by one and timestamps are
    non-decreasing; violations indicate a simulator bug and raise ValueError.
    """

    def __init__(self, client: ClientId):
        self.client = client
        self._next_seq = 0
        self._last_ts: LocalTimestamp | None = None

    def emit(self, ts: LocalTimestamp, true_time: SimTime | None = None) -> Event:
        if self._last_ts is not None and ts < self._last_ts:
            raise ValueError(
                f"client {self.client}: timestamp {ts} decreases below {self._last_ts}"
            )
        event = Event(self.client, check_ticks(ts), self._next_seq, true_time)
        self._next_seq += 1
        self._last_ts = ts
        return event
