import { describe, expect, it } from "vitest";
import { SchemaError, parseCsv, requireHeader, toNumber } from "../src/csv.js";

describe("parseCsv", () => {
  it("splits header and rows", () => {
    const table = parseCsv("a,b\n1,2\n3,4\n");
    expect(table.header).toEqual(["a", "b"]);
    expect(table.rows).toEqual([
      ["1", "2"],
      ["3", "4"],
    ]);
  });

  it("ignores trailing blank lines", () => {
    expect(parseCsv("a\n1\n\n").rows).toEqual([["1"]]);
  });

  it("rejects empty input", () => {
    expect(() => parseCsv("")).toThrow(SchemaError);
  });
});

describe("requireHeader", () => {
  it("accepts a matching header with rows", () => {
    const table = parseCsv("a,b\n1,2\n");
    expect(() => requireHeader(table, ["a", "b"], "test")).not.toThrow();
  });

  it("rejects a mismatched header", () => {
    const table = parseCsv("a,b\n1,2\n");
    expect(() => requireHeader(table, ["a", "c"], "test")).toThrow(SchemaError);
  });

  it("rejects header-only files", () => {
    const table = parseCsv("a,b\n");
    expect(() => requireHeader(table, ["a", "b"], "test")).toThrow(/no data rows/);
  });
});

describe("toNumber", () => {
  it("parses numbers", () => {
    expect(toNumber("2.5", "x")).toBe(2.5);
  });

  it("rejects blanks and garbage", () => {
    expect(() => toNumber("", "x")).toThrow(SchemaError);
    expect(() => toNumber("abc", "x")).toThrow(SchemaError);
  });
});
