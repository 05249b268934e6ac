/** Minimal CSV handling for the fairorder output schemas (no quoting used). */

export class SchemaError extends Error {}

export interface CsvTable {
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string): CsvTable {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("empty CSV");
  }
  const header = lines[0].split(",").map((h) => h.trim());
  const rows = lines.slice(1).map((line) => line.split(","));
  return { header, rows };
}

export function requireHeader(table: CsvTable, expected: string[], what: string): void {
  if (
    table.header.length !== expected.length ||
    expected.some((name, i) => table.header[i] !== name)
  ) {
    throw new SchemaError(
      `${what}: header [${table.header.join(",")}] does not match [${expected.join(",")}]`
    );
  }
  if (table.rows.length === 0) {
    throw new SchemaError(`${what}: no data rows`);
  }
}

export function toNumber(text: string, what: string): number {
  const value = Number(text);
  if (text.trim() === "" || Number.isNaN(value)) {
    throw new SchemaError(`${what}: not a number: "${text}"`);
  }
  return value;
}
