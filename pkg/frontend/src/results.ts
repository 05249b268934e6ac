/** Results-CSV model: experiment,param,trial,ras_tommy,ras_baseline,aux1,aux2,seed */

import { CsvTable, SchemaError, parseCsv, requireHeader, toNumber } from "./csv.js";

export const RESULTS_HEADER = [
  "experiment",
  "param",
  "trial",
  "ras_tommy",
  "ras_baseline",
  "aux1",
  "aux2",
  "seed",
];

export const KNOWN_EXPERIMENTS = [
  "run",
  "delay",
  "threshold",
  "clients",
  "events",
  "latency",
  "fit",
  "sync_interval",
  "drift",
  "stable",
  "speedup",
] as const;

export type ExperimentId = (typeof KNOWN_EXPERIMENTS)[number];

export interface ResultRow {
  experiment: ExperimentId;
  param: string;
  rasTommy: number | null;
  rasBaseline: number | null;
  aux1: number | null;
  aux2: number | null;
}

export interface ResultsFile {
  experiment: ExperimentId;
  rows: ResultRow[];
}

function optionalNumber(text: string, what: string): number | null {
  return text.trim() === "" ? null : toNumber(text, what);
}

export function parseResults(text: string): ResultsFile {
  const table: CsvTable = parseCsv(text);
  requireHeader(table, RESULTS_HEADER, "results CSV");
  const rows: ResultRow[] = table.rows.map((cells, index) => {
    if (cells.length !== RESULTS_HEADER.length) {
      throw new SchemaError(`results CSV row ${index + 2}: expected ${RESULTS_HEADER.length} fields`);
    }
    const experiment = cells[0] as ExperimentId;
    if (!KNOWN_EXPERIMENTS.includes(experiment)) {
      throw new SchemaError(`results CSV row ${index + 2}: unknown experiment "${cells[0]}"`);
    }
    return {
      experiment,
      param: cells[1],
      rasTommy: optionalNumber(cells[3], "ras_tommy"),
      rasBaseline: optionalNumber(cells[4], "ras_baseline"),
      aux1: optionalNumber(cells[5], "aux1"),
      aux2: optionalNumber(cells[6], "aux2"),
    };
  });
  const experiments = new Set(rows.map((r) => r.experiment));
  if (experiments.size !== 1) {
    throw new SchemaError(`results CSV mixes experiments: ${[...experiments].join(", ")}`);
  }
  return { experiment: rows[0].experiment, rows };
}

export interface Series {
  label: string;
  /** Mean value per swept parameter, in first-appearance order. */
  points: { param: string; value: number }[];
}

/** Average a column over trials, grouped by the swept parameter. */
export function aggregate(rows: ResultRow[], pick: (row: ResultRow) => number | null, label: string): Series {
  const order: string[] = [];
  const sums = new Map<string, { total: number; count: number }>();
  for (const row of rows) {
    const value = pick(row);
    if (value === null) continue;
    if (!sums.has(row.param)) {
      sums.set(row.param, { total: 0, count: 0 });
      order.push(row.param);
    }
    const bucket = sums.get(row.param)!;
    bucket.total += value;
    bucket.count += 1;
  }
  if (order.length === 0) {
    throw new SchemaError(`no values for series "${label}"`);
  }
  return {
    label,
    points: order.map((param) => {
      const { total, count } = sums.get(param)!;
      return { param, value: total / count };
    }),
  };
}
