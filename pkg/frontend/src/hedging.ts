/** Hedging-CSV model: policy,client_id,avg_rank with policy,variance summary rows. */

import { SchemaError, parseCsv, requireHeader, toNumber } from "./csv.js";

export const HEDGING_HEADER = ["policy", "client_id", "avg_rank"];

export interface PolicyRanks {
  policy: string;
  ranks: { client: number; avgRank: number }[];
  variance: number | null;
}

export function parseHedging(text: string): PolicyRanks[] {
  const table = parseCsv(text);
  requireHeader(table, HEDGING_HEADER, "hedging CSV");
  const byPolicy = new Map<string, PolicyRanks>();
  for (const cells of table.rows) {
    if (cells.length !== 3) {
      throw new SchemaError(`hedging CSV: malformed row [${cells.join(",")}]`);
    }
    const [policy, clientField, valueField] = cells;
    if (!byPolicy.has(policy)) {
      byPolicy.set(policy, { policy, ranks: [], variance: null });
    }
    const entry = byPolicy.get(policy)!;
    if (clientField === "variance") {
      entry.variance = toNumber(valueField, "variance");
    } else {
      entry.ranks.push({
        client: Math.trunc(toNumber(clientField, "client_id")),
        avgRank: toNumber(valueField, "avg_rank"),
      });
    }
  }
  const policies = [...byPolicy.values()];
  if (policies.every((p) => p.ranks.length === 0)) {
    throw new SchemaError("hedging CSV: no per-client rank rows");
  }
  for (const policy of policies) {
    policy.ranks.sort((a, b) => a.client - b.client);
  }
  return policies;
}
