import { readFileSync } from "fs";
import { describe, expect, it } from "vitest";
import { SchemaError } from "../src/csv.js";
import { parseHedging } from "../src/hedging.js";
import { renderHedgingSvg, renderResultsSvg, renderSvg } from "../src/render.js";

const fixture = (name: string) => readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf-8");

describe("renderSvg dispatch", () => {
  for (const name of ["delay.csv", "events.csv", "stable.csv", "speedup.csv"]) {
    it(`renders ${name} to SVG`, () => {
      const svg = renderSvg(fixture(name));
      expect(svg.startsWith("<svg")).toBe(true);
      expect(svg).toContain("</svg>");
      expect(svg).toContain("experiment:");
    });
  }

  it("renders the hedging fixture via dispatch", () => {
    const svg = renderSvg(fixture("hedging.csv"));
    expect(svg).toContain("average rank per client");
  });

  it("rejects unknown headers", () => {
    expect(() => renderSvg("x,y\n1,2\n")).toThrow(SchemaError);
  });

  it("rejects empty input", () => {
    expect(() => renderSvg("")).toThrow(SchemaError);
  });
});

describe("results charts", () => {
  it("plots two series for RAS experiments", () => {
    const svg = renderResultsSvg(fixture("delay.csv"));
    expect(svg).toContain("probabilistic");
    expect(svg).toContain("interval baseline");
    expect((svg.match(/<path /g) ?? []).length).toBe(2);
  });

  it("adds windowed series for the events experiment", () => {
    const svg = renderResultsSvg(fixture("events.csv"));
    expect(svg).toContain("probabilistic (windowed)");
    expect((svg.match(/<path /g) ?? []).length).toBe(4);
  });

  it("plots a single aux series for speedup", () => {
    const svg = renderResultsSvg(fixture("speedup.csv"));
    expect(svg).toContain("speedup");
    expect((svg.match(/<path /g) ?? []).length).toBe(1);
  });
});

describe("hedging chart", () => {
  it("parses both policies with variances", () => {
    const policies = parseHedging(fixture("hedging.csv"));
    expect(policies.map((p) => p.policy).sort()).toEqual(["hedging", "no-hedging"]);
    for (const policy of policies) {
      expect(policy.ranks.length).toBe(10);
      expect(policy.variance).not.toBeNull();
    }
  });

  it("draws one panel per policy", () => {
    const svg = renderHedgingSvg(fixture("hedging.csv"));
    expect((svg.match(/class="panel"/g) ?? []).length).toBe(2);
    expect(svg).toContain("no-hedging");
    expect((svg.match(/<rect x=/g) ?? []).length).toBe(20);
  });

  it("rejects files with only summary rows", () => {
    const text = "policy,client_id,avg_rank\nno-hedging,variance,8.25\n";
    expect(() => parseHedging(text)).toThrow(/no per-client/);
  });
});
