"""NTP-style synchronization simulation.

Runs periodic four-timestamp probe exchanges against a reference (server)
clock over a configurable latency model, applies the resulting adjustments to
the client clock, and records them: the retained adjustments form the
client's empirical clock-correction distribution.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from .timebase import ClientId, SimTime, VirtualClock, clock_read, clock_step

DEFAULT_CAPACITY = 1000

LATENCY_KINDS = ("constant", "normal", "bimodal", "pareto", "lognormal", "empirical")

# Sanity ceiling on one-way latency draws (10 s); heavy-tailed fits can
# otherwise produce draws that overflow 64-bit tick arithmetic.
LATENCY_CAP_NS = 10_000_000_000


@dataclass
class CorrectionDistribution:
    """Ring buffer of a client's most recent clock corrections (ns)."""

    client: ClientId
    samples: list[int] = field(default_factory=list)
    capacity: int = DEFAULT_CAPACITY

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise ValueError("capacity must be >= 1")
        if len(self.samples) > self.capacity:
            raise ValueError("more samples than capacity")

    def append(self, correction_ns: int) -> None:
        self.samples.append(int(correction_ns))
        if len(self.samples) > self.capacity:
            del self.samples[0]

    def as_array(self) -> np.ndarray:
        if not self.samples:
            raise ValueError(f"client {self.client}: empty correction distribution")
        return np.asarray(self.samples, dtype=np.int64)

    def __len__(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class ProbeRecord:
    """Four-timestamp probe exchange.

    t1/t4 are client-clock send/receive times; t2/t3 are server-clock
    receive/reply times.
    """

    t1: int
    t2: int
    t3: int
    t4: int

    def __post_init__(self) -> None:
        if self.t4 < self.t1:
            raise ValueError("probe receive precedes send on client clock")
        if self.t3 < self.t2:
            raise ValueError("probe reply precedes receive on server clock")


def ntp_offset_estimate(probe: ProbeRecord) -> int:
    """Standard four-timestamp offset estimate, rounded toward zero.

    Returns the estimated server-minus-client offset theta, i.e. the
    adjustment that moves the client clock toward the reference.
    """
    total = (probe.t2 - probe.t1) + (probe.t3 - probe.t4)
    quotient = abs(total) // 2
    return quotient if total >= 0 else -quotient


@dataclass(frozen=True)
class LatencyModel:
    """One-way message latency distribution (ns).

    Supported kinds: constant, normal, bimodal (two-component Gaussian
    mixture), pareto (classic Pareto on a shifted support), lognormal
    (shifted), empirical (resampled trace). Draws are clamped to >= 0.
    """

    kind: str
    params: tuple[float, ...] = ()
    trace: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in LATENCY_KINDS:
            raise ValueError(f"unknown latency kind: {self.kind!r}")
        if self.kind == "empirical" and not self.trace:
            raise ValueError("empirical latency model requires a non-empty trace")

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, value_ns: float) -> "LatencyModel":
        return cls("constant", (float(value_ns),))

    @classmethod
    def normal(cls, mean_ns: float, sigma_ns: float) -> "LatencyModel":
        return cls("normal", (float(mean_ns), float(sigma_ns)))

    @classmethod
    def bimodal(
        cls,
        mean1_ns: float,
        sigma1_ns: float,
        mean2_ns: float,
        sigma2_ns: float,
        weight1: float = 0.5,
    ) -> "LatencyModel":
        if not 0.0 <= weight1 <= 1.0:
            raise ValueError("mixture weight must be in [0, 1]")
        return cls(
            "bimodal",
            (float(mean1_ns), float(sigma1_ns), float(mean2_ns), float(sigma2_ns), float(weight1)),
        )

    @classmethod
    def pareto(cls, alpha: float, scale_ns: float, shift_ns: float = 0.0) -> "LatencyModel":
        if alpha <= 0 or scale_ns <= 0:
            raise ValueError("pareto needs alpha > 0 and scale > 0")
        return cls("pareto", (float(alpha), float(scale_ns), float(shift_ns)))

    @classmethod
    def lognormal(cls, mu_log: float, sigma_log: float, shift_ns: float = 0.0) -> "LatencyModel":
        return cls("lognormal", (float(mu_log), float(sigma_log), float(shift_ns)))

    @classmethod
    def empirical(cls, trace: Sequence[int]) -> "LatencyModel":
        values = tuple(int(v) for v in trace)
        if any(v < 0 for v in values):
            raise ValueError("latency trace contains negative values")
        return cls("empirical", (), values)

    # -- support -----------------------------------------------------------

    def support(self) -> tuple[int, int]:
        """Derived (d_min, d_max) bounds in ns.

        Unbounded parametric tails are cut at the 99.9th percentile; lower
        bounds are clamped to 0 like the draws themselves.
        """
        if self.kind == "constant":
            v = int(round(self.params[0]))
            return max(0, v), max(0, v)
        if self.kind == "empirical":
            return min(self.trace), max(self.trace)
        if self.kind == "normal":
            mean, sigma = self.params
            return max(0, int(mean - 3 * sigma)), max(0, int(mean + 3 * sigma))
        if self.kind == "bimodal":
            m1, s1, m2, s2, _ = self.params
            lo = min(m1 - 3 * s1, m2 - 3 * s2)
            hi = max(m1 + 3 * s1, m2 + 3 * s2)
            return max(0, int(lo)), max(0, int(hi))
        if self.kind == "pareto":
            alpha, scale, shift = self.params
            hi = shift + scale * (1e-3 ** (-1.0 / alpha))
            return max(0, int(shift + scale)), max(0, int(hi))
        # lognormal
        mu, sigma, shift = self.params
        hi = shift + float(np.exp(mu + 3.09 * sigma))
        lo = shift + float(np.exp(mu - 3.09 * sigma))
        return max(0, int(lo)), max(0, int(hi))

    def uncertainty_ns(self) -> int:
        """Delay uncertainty U = d_max - d_min of the one-way latency."""
        lo, hi = self.support()
        return hi - lo


def sample_latency(model: LatencyModel, rng: np.random.Generator) -> int:
    """Draw one one-way latency in ns, clamped to [0, LATENCY_CAP_NS]."""
    if model.kind == "constant":
        value = model.params[0]
    elif model.kind == "normal":
        mean, sigma = model.params
        value = rng.normal(mean, sigma)
    elif model.kind == "bimodal":
        m1, s1, m2, s2, w1 = model.params
        if rng.random() < w1:
            value = rng.normal(m1, s1)
        else:
            value = rng.normal(m2, s2)
    elif model.kind == "pareto":
        alpha, scale, shift = model.params
        value = shift + scale * (1.0 + rng.pareto(alpha))
    elif model.kind == "lognormal":
        mu, sigma, shift = model.params
        value = shift + float(np.exp(rng.normal(mu, sigma)))
    else:  # empirical
        value = model.trace[int(rng.integers(len(model.trace)))]
    return min(max(0, int(round(value))), LATENCY_CAP_NS)


def fit_distribution(kind: str, samples: Sequence[int]) -> LatencyModel:
    """Fit a parametric latency model to observed latency samples.

    normal: moment matching (population variance). pareto: maximum likelihood
    on the support shifted to start at 1. bimodal: 2-component Gaussian
    mixture via EM, 100 fixed iterations, means initialised at the sample min
    and max. lognormal: moment matching on logs of (samples - min + 1).
    Zero-variance samples fall back to a constant model for every kind.
    """
    data = np.asarray(samples, dtype=np.float64)
    if data.size < 10:
        raise ValueError("need at least 10 samples to fit a distribution")
    if float(data.var()) == 0.0:
        return LatencyModel.constant(float(data[0]))

    if kind == "constant":
        return LatencyModel.constant(float(data.mean()))
    if kind == "empirical":
        return LatencyModel.empirical([int(v) for v in samples])
    if kind == "normal":
        return LatencyModel.normal(float(data.mean()), float(data.std()))
    if kind == "pareto":
        # Classic Pareto-I MLE with the scale at the sample minimum; shift
        # only if the support would otherwise start at or below zero.
        shift = 0.0 if float(data.min()) >= 1.0 else float(data.min()) - 1.0
        scale = float(data.min()) - shift
        ratios = (data - shift) / scale
        log_sum = float(np.log(ratios).sum())
        if log_sum <= 0.0:
            return LatencyModel.constant(float(data.mean()))
        alpha = data.size / log_sum
        return LatencyModel.pareto(alpha, scale, shift)
    if kind == "lognormal":
        shift = float(data.min()) - 1.0
        logs = np.log(data - shift)
        return LatencyModel.lognormal(float(logs.mean()), float(logs.std()), shift)
    if kind == "bimodal":
        return _fit_bimodal(data)
    raise ValueError(f"cannot fit latency kind: {kind!r}")


def _fit_bimodal(data: np.ndarray, iterations: int = 100) -> LatencyModel:
    # Deterministic init: means at the extremes, shared pooled variance.
    mu = np.array([data.min(), data.max()], dtype=np.float64)
    var = np.array([data.var(), data.var()]) / 2.0
    var = np.maximum(var, 1.0)
    weight = np.array([0.5, 0.5])
    for _ in range(iterations):
        # E-step: responsibilities under the current components.
        diff = data[None, :] - mu[:, None]
        log_pdf = -0.5 * diff**2 / var[:, None] - 0.5 * np.log(2 * np.pi * var[:, None])
        log_w = np.log(weight)[:, None] + log_pdf
        log_w -= log_w.max(axis=0, keepdims=True)
        resp = np.exp(log_w)
        resp /= resp.sum(axis=0, keepdims=True)
        # M-step.
        total = resp.sum(axis=1)
        total = np.maximum(total, 1e-12)
        mu = (resp * data[None, :]).sum(axis=1) / total
        var = (resp * (data[None, :] - mu[:, None]) ** 2).sum(axis=1) / total
        var = np.maximum(var, 1.0)
        weight = total / data.size
    return LatencyModel.bimodal(
        float(mu[0]), float(np.sqrt(var[0])), float(mu[1]), float(np.sqrt(var[1])), float(weight[0])
    )


def run_sync(
    clock: VirtualClock,
    server_clock: VirtualClock,
    latency: LatencyModel,
    interval_ns: int,
    duration_ns: int,
    rng_seed: int | np.random.Generator,
    *,
    capacity: int = DEFAULT_CAPACITY,
    client: ClientId = 0,
    start_ns: SimTime = 0,
    phase_ns: int = 0,
) -> tuple[VirtualClock, CorrectionDistribution]:
    """Run periodic sync probes and collect the applied corrections.

    One probe per interval, the grid shifted by *phase_ns* (clients do not
    align their probe schedules): the four-timestamp exchange is evaluated
    with ntp_offset_estimate, the estimate is applied with clock_step, and
    the adjustment is appended to the client's correction distribution.
    Fully deterministic for a fixed seed.
    """
    if interval_ns <= 0:
        raise ValueError("interval_ns must be positive")
    if not 0 <= phase_ns < interval_ns:
        raise ValueError("phase_ns must lie within one interval")
    rng = (
        rng_seed
        if isinstance(rng_seed, np.random.Generator)
        else np.random.default_rng(np.random.SeedSequence(rng_seed))
    )
    dist = CorrectionDistribution(client=client, capacity=capacity)
    probes = (duration_ns - phase_ns) // interval_ns
    for k in range(1, probes + 1):
        send = start_ns + phase_ns + k * interval_ns
        t1 = clock_read(clock, send)
        d_fwd = sample_latency(latency, rng)
        server_rx = send + d_fwd
        t2 = clock_read(server_clock, server_rx)
        t3 = t2  # immediate reply
        d_back = sample_latency(latency, rng)
        t4 = clock_read(clock, server_rx + d_back)
        adjustment = ntp_offset_estimate(ProbeRecord(t1, t2, t3, t4))
        clock = clock_step(clock, adjustment)
        dist.append(adjustment)
    return clock, dist


def read_latency_trace(path: str | Path) -> tuple[int, ...]:
    """Read a latency trace file: one non-negative integer (ns) per line."""
    values: list[int] = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                value = int(text)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: not an integer: {text!r}") from exc
            if value < 0:
                raise ValueError(f"{path}:{lineno}: negative latency {value}")
            values.append(value)
    if not values:
        raise ValueError(f"{path}: empty latency trace")
    return tuple(values)


def write_corrections_csv(
    out: IO[str] | str | Path, dists: Iterable[CorrectionDistribution]
) -> None:
    """Export retained correction samples as client_id,probe_index,correction_ns."""
    def write_rows(fh: IO[str]) -> None:
        writer = csv.writer(fh)
        writer.writerow(["client_id", "probe_index", "correction_ns"])
        for dist in dists:
            for index, value in enumerate(dist.samples):
                writer.writerow([dist.client, index, value])

    if isinstance(out, (str, Path)):
        with open(out, "w", newline="", encoding="ascii") as fh:
            write_rows(fh)
    else:
        write_rows(out)


def read_corrections_csv(path: str | Path, *, capacity: int | None = None) -> dict[int, CorrectionDistribution]:
    """Read a correction-samples CSV back into per-client distributions."""
    dists: dict[int, CorrectionDistribution] = {}
    with open(path, "r", newline="", encoding="ascii") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["client_id", "probe_index", "correction_ns"]:
            raise ValueError(f"{path}: expected header client_id,probe_index,correction_ns")
        rows = [(int(r[0]), int(r[1]), int(r[2])) for r in reader if r]
    if not rows:
        raise ValueError(f"{path}: no correction samples")
    rows.sort(key=lambda r: (r[0], r[1]))
    for client, _, value in rows:
        if client not in dists:
            cap = capacity if capacity is not None else max(DEFAULT_CAPACITY, len(rows))
            dists[client] = CorrectionDistribution(client=client, capacity=cap)
        dists[client].append(value)
    return dists
