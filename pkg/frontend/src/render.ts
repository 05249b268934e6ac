/** Schema detection and figure dispatch for the fairorder CSV outputs. */

import { SchemaError, parseCsv } from "./csv.js";
import { HEDGING_HEADER, parseHedging } from "./hedging.js";
import { ExperimentId, RESULTS_HEADER, aggregate, parseResults } from "./results.js";
import { BarPanel, barPanels, lineChart } from "./svg.js";

const AXIS_LABELS: Record<ExperimentId, { x: string; y: string }> = {
  run: { x: "inter-event delay (ns)", y: "RAS" },
  delay: { x: "inter-event delay (ns)", y: "RAS" },
  threshold: { x: "edge threshold", y: "RAS" },
  clients: { x: "number of clients", y: "RAS" },
  events: { x: "number of events", y: "RAS" },
  latency: { x: "latency model", y: "RAS" },
  fit: { x: "distribution fit", y: "RAS" },
  sync_interval: { x: "sync interval (ns)", y: "RAS" },
  drift: { x: "drift sigma (ppm)", y: "RAS" },
  stable: { x: "drift sigma (ppm)", y: "mean stability margin (ns)" },
  speedup: { x: "number of clients", y: "speedup" },
};

export function renderResultsSvg(text: string): string {
  const file = parseResults(text);
  const labels = AXIS_LABELS[file.experiment];
  const options = { title: `experiment: ${file.experiment}`, xLabel: labels.x, yLabel: labels.y };
  if (file.experiment === "speedup") {
    return lineChart([aggregate(file.rows, (r) => r.aux1, "speedup")], options);
  }
  if (file.experiment === "stable") {
    return lineChart([aggregate(file.rows, (r) => r.aux1, "stability margin")], options);
  }
  const series = [
    aggregate(file.rows, (r) => r.rasTommy, "probabilistic"),
    aggregate(file.rows, (r) => r.rasBaseline, "interval baseline"),
  ];
  if (file.experiment === "events") {
    series.push(aggregate(file.rows, (r) => r.aux1, "probabilistic (windowed)"));
    series.push(aggregate(file.rows, (r) => r.aux2, "baseline (windowed)"));
  }
  return lineChart(series, options);
}

export function renderHedgingSvg(text: string): string {
  const policies = parseHedging(text);
  const panels: BarPanel[] = policies.map((policy) => ({
    title:
      policy.variance === null
        ? policy.policy
        : `${policy.policy} (variance ${policy.variance.toPrecision(3)})`,
    bars: policy.ranks.map((r) => ({ label: String(r.client), value: r.avgRank })),
  }));
  return barPanels(panels, {
    title: "average rank per client",
    xLabel: "client",
    yLabel: "average rank",
  });
}

/** Render a CSV string, detecting its schema from the header row. */
export function renderSvg(text: string): string {
  const { header } = parseCsv(text);
  if (header.length === HEDGING_HEADER.length && header.every((h, i) => h === HEDGING_HEADER[i])) {
    return renderHedgingSvg(text);
  }
  if (header.length === RESULTS_HEADER.length && header.every((h, i) => h === RESULTS_HEADER[i])) {
    return renderResultsSvg(text);
  }
  throw new SchemaError(`unrecognized CSV header: ${header.join(",")}`);
}
