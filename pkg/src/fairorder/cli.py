"""Command-line entry point.

Subcommands: run (single scenario), sweep (one experiment across its
parameter values), hedging (machine-heterogeneity study), probes-export
(sync warm-up corrections as CSV), order-file (order an events CSV against a
corrections CSV without the simulator), and plot (render a results or
hedging CSV to an image).

Exit codes: 0 success, 2 configuration error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__, figures, harness
from .harness import HedgingConfig, SimConfig
from .online import write_emission_log
from .pairwise import precompute_diffs
from .sequencer import order_events, write_batches_csv
from .syncsim import read_corrections_csv, write_corrections_csv
from .timebase import Event


class ConfigError(Exception):
    pass


def _load_config(path: str | None, seed_override: int | None) -> SimConfig:
    data: dict = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must be a JSON object")
    try:
        cfg = SimConfig.from_dict(data)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad config: {exc}") from exc
    if seed_override is not None:
        cfg = replace(cfg, seed=seed_override)
    return cfg


def _write_manifest(out_dir: Path, payload: dict) -> None:
    payload = dict(payload)
    payload["artifact_version"] = __version__
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _ensure_out(path_text: str) -> Path:
    out_dir = Path(path_text)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config, args.seed)
    out_dir = _ensure_out(args.out)
    result = harness.run_scenario(cfg)
    results_csv = out_dir / "results.csv"
    harness.write_results_csv(results_csv, [result])

    trial0 = harness.run_trial(cfg, 0)
    emissions_csv = out_dir / "emissions.csv"
    write_emission_log(emissions_csv, trial0.emission_log)
    tommy_csv = out_dir / "batches_tommy.csv"
    write_batches_csv(tommy_csv, trial0.batches_tommy)
    baseline_csv = out_dir / "batches_baseline.csv"
    write_batches_csv(baseline_csv, trial0.batches_baseline)

    outputs = [results_csv, emissions_csv, tommy_csv, baseline_csv]
    if args.figures:
        outputs.append(figures.render_results(results_csv, out_dir / "results.png"))
    _write_manifest(
        out_dir,
        {
            "command": "run",
            "config": cfg.to_dict(),
            "seed": cfg.seed,
            "outputs": [p.name for p in outputs],
        },
    )
    print(f"run: ras_tommy={result.mean_ras_tommy:.4f} ras_baseline={result.mean_ras_baseline:.4f}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config, args.seed)
    out_dir = _ensure_out(args.out)
    values = None
    if args.values:
        values = [_parse_sweep_value(v) for v in args.values.split(",")]
    results = harness.sweep(args.experiment, cfg, values)
    results_csv = out_dir / f"{args.experiment}.csv"
    harness.write_results_csv(results_csv, results)
    outputs = [results_csv]
    if args.figures:
        outputs.append(figures.render_results(results_csv, out_dir / f"{args.experiment}.png"))
    _write_manifest(
        out_dir,
        {
            "command": "sweep",
            "experiment": args.experiment,
            "config": cfg.to_dict(),
            "seed": cfg.seed,
            "sweep_values": [r.param for r in results],
            "outputs": [p.name for p in outputs],
        },
    )
    for result in results:
        if result.records[0].ras_tommy is None:
            print(f"{args.experiment} param={result.param}: aux1={result.mean_aux1:.4f}")
        else:
            print(
                f"{args.experiment} param={result.param}: "
                f"ras_tommy={result.mean_ras_tommy:.4f} ras_baseline={result.mean_ras_baseline:.4f}"
            )
    return 0


def _parse_sweep_value(text: str):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def _cmd_hedging(args: argparse.Namespace) -> int:
    data: dict = {}
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read hedging config: {exc}") from exc
        hedging_keys = {"n_clients", "n_machines", "sigma_us", "trials", "seed"}
        data = {k: v for k, v in data.items() if k in hedging_keys}
    try:
        cfg = HedgingConfig(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad hedging config: {exc}") from exc
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    out_dir = _ensure_out(args.out)
    result = harness.run_hedging(cfg)
    hedging_csv = out_dir / "hedging.csv"
    harness.write_hedging_csv(hedging_csv, result)
    outputs = [hedging_csv]
    if args.figures:
        outputs.append(figures.render_hedging(hedging_csv, out_dir / "hedging.png"))
    _write_manifest(
        out_dir,
        {
            "command": "hedging",
            "config": {
                "n_clients": cfg.n_clients,
                "n_machines": cfg.n_machines,
                "sigma_us": cfg.sigma_us,
                "trials": cfg.trials,
                "seed": cfg.seed,
            },
            "seed": cfg.seed,
            "outputs": [p.name for p in outputs],
        },
    )
    for policy, (_, variance) in result.policies.items():
        print(f"hedging: {policy} rank variance {variance:.4f}")
    return 0


def _cmd_probes_export(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config, args.seed)
    out_dir = _ensure_out(args.out)
    trial = harness.run_trial(cfg, args.trial)
    corrections_csv = out_dir / "corrections.csv"
    write_corrections_csv(corrections_csv, trial.dists)
    _write_manifest(
        out_dir,
        {
            "command": "probes-export",
            "config": cfg.to_dict(),
            "seed": cfg.seed,
            "trial": args.trial,
            "outputs": [corrections_csv.name],
        },
    )
    print(f"wrote {corrections_csv}")
    return 0


def _read_events_csv(path: str) -> list[Event]:
    import csv as _csv

    events: list[Event] = []
    seqs: dict[int, int] = {}
    last_ts: dict[int, int] = {}
    with open(path, "r", newline="", encoding="ascii") as fh:
        reader = _csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["client_id", "local_ts_ns"]:
            raise ConfigError(f"{path}: expected header client_id,local_ts_ns")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                client, ts = int(row[0]), int(row[1])
            except (ValueError, IndexError):
                raise ConfigError(f"{path}:{lineno}: malformed row {row}") from None
            if client in last_ts and ts < last_ts[client]:
                raise ConfigError(
                    f"{path}:{lineno}: client {client} timestamps must be non-decreasing"
                )
            last_ts[client] = ts
            seq = seqs.get(client, 0)
            seqs[client] = seq + 1
            events.append(Event(client=client, ts=ts, seq=seq))
    if not events:
        raise ConfigError(f"{path}: no events")
    return events


def _cmd_order_file(args: argparse.Namespace) -> int:
    events = _read_events_csv(args.events)
    try:
        dists = read_corrections_csv(args.corrections)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    missing = {e.client for e in events} - set(dists)
    if missing:
        raise ConfigError(f"no correction samples for clients {sorted(missing)}")
    table = precompute_diffs(dists)
    batches = order_events(events, table, args.threshold)
    if args.out:
        write_batches_csv(args.out, batches)
        print(f"wrote {args.out}")
    else:
        write_batches_csv(sys.stdout, batches)
    return 0


def _cmd_plot(args: argparse.Namespace) -> int:
    out = args.out
    if out is None:
        out = str(Path(args.csv).with_suffix(".png"))
    figures.render(args.csv, out)
    print(f"wrote {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairorder",
        description="Probabilistic fair ordering of timestamped events: simulation and evaluation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run the configured scenario")
    run_p.add_argument("--config", help="JSON config file")
    run_p.add_argument("--seed", type=int, help="override the config seed")
    run_p.add_argument("--out", default="out", help="output directory")
    run_p.add_argument("--figures", action="store_true", help="render figures next to CSVs")
    run_p.set_defaults(func=_cmd_run)

    sweep_p = sub.add_parser("sweep", help="sweep one experiment parameter")
    sweep_p.add_argument("--experiment", required=True, choices=[e for e in harness.EXPERIMENTS if e != "run"])
    sweep_p.add_argument("--config", help="JSON config file")
    sweep_p.add_argument("--seed", type=int, help="override the config seed")
    sweep_p.add_argument("--values", help="comma-separated sweep values")
    sweep_p.add_argument("--out", default="out", help="output directory")
    sweep_p.add_argument("--figures", action="store_true", help="render figures next to CSVs")
    sweep_p.set_defaults(func=_cmd_sweep)

    hedge_p = sub.add_parser("hedging", help="machine-heterogeneity rank study")
    hedge_p.add_argument("--config", help="JSON config file")
    hedge_p.add_argument("--seed", type=int, help="override the config seed")
    hedge_p.add_argument("--out", default="out", help="output directory")
    hedge_p.add_argument("--figures", action="store_true", help="render figures next to CSVs")
    hedge_p.set_defaults(func=_cmd_hedging)

    probes_p = sub.add_parser("probes-export", help="export sync warm-up corrections as CSV")
    probes_p.add_argument("--config", help="JSON config file")
    probes_p.add_argument("--seed", type=int, help="override the config seed")
    probes_p.add_argument("--trial", type=int, default=0, help="trial index to export")
    probes_p.add_argument("--out", default="out", help="output directory")
    probes_p.set_defaults(func=_cmd_probes_export)

    order_p = sub.add_parser("order-file", help="order an events CSV using a corrections CSV")
    order_p.add_argument("--events", required=True, help="CSV with header client_id,local_ts_ns")
    order_p.add_argument(
        "--corrections", required=True, help="CSV with header client_id,probe_index,correction_ns"
    )
    order_p.add_argument("--threshold", type=float, default=0.5, help="edge threshold")
    order_p.add_argument("--out", help="write batches CSV here instead of stdout")
    order_p.set_defaults(func=_cmd_order_file)

    plot_p = sub.add_parser("plot", help="render a results or hedging CSV to an image")
    plot_p.add_argument("--csv", required=True, help="input CSV")
    plot_p.add_argument("--out", help="output image path (default: CSV path with .png)")
    plot_p.set_defaults(func=_cmd_plot)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except figures.SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
