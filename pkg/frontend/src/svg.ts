/** Dependency-free SVG chart builders. */

import { Series } from "./results.js";

const WIDTH = 720;
const HEIGHT = 440;
const MARGIN = { top: 40, right: 24, bottom: 64, left: 72 };

const PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"];

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function niceTicks(lo: number, hi: number, count = 5): number[] {
  if (lo === hi) {
    return [lo];
  }
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = span / count / step;
  const factor = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const size = factor * step;
  const start = Math.ceil(lo / size) * size;
  const ticks: number[] = [];
  for (let v = start; v <= hi + size / 1e6; v += size) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

function formatTick(value: number): string {
  if (Math.abs(value) >= 1e6) return `${value / 1e6}M`;
  if (Math.abs(value) >= 1e3) return `${value / 1e3}k`;
  return `${Number(value.toPrecision(6))}`;
}

export interface ChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
}

interface Scaled {
  x: (i: number) => number;
  y: (v: number) => number;
  yTicks: number[];
}

function scales(series: Series[], categories: string[]): Scaled {
  const values = series.flatMap((s) => s.points.map((p) => p.value));
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  const pad = (hi - lo) * 0.08;
  lo -= pad;
  hi += pad;
  const innerW = WIDTH - MARGIN.left - MARGIN.right;
  const innerH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const denom = Math.max(categories.length - 1, 1);
  return {
    x: (i) => MARGIN.left + (categories.length === 1 ? innerW / 2 : (i / denom) * innerW),
    y: (v) => MARGIN.top + innerH - ((v - lo) / (hi - lo)) * innerH,
    yTicks: niceTicks(lo, hi),
  };
}

/** Line chart over the shared category axis (the swept parameter values). */
export function lineChart(series: Series[], options: ChartOptions): string {
  if (series.length === 0 || series.every((s) => s.points.length === 0)) {
    throw new Error("nothing to plot");
  }
  const categories = series[0].points.map((p) => p.param);
  const { x, y, yTicks } = scales(series, categories);
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">`
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<text x="${WIDTH / 2}" y="22" text-anchor="middle" font-size="16">${esc(options.title)}</text>`
  );

  const plotBottom = HEIGHT - MARGIN.bottom;
  for (const tick of yTicks) {
    const ty = y(tick);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${ty}" x2="${WIDTH - MARGIN.right}" y2="${ty}" stroke="#ddd"/>`,
      `<text x="${MARGIN.left - 8}" y="${ty + 4}" text-anchor="end" font-size="11">${formatTick(tick)}</text>`
    );
  }
  categories.forEach((label, i) => {
    const tx = x(i);
    parts.push(
      `<line x1="${tx}" y1="${plotBottom}" x2="${tx}" y2="${plotBottom + 5}" stroke="#333"/>`,
      `<text x="${tx}" y="${plotBottom + 20}" text-anchor="middle" font-size="11">${esc(label)}</text>`
    );
  });
  parts.push(
    `<line x1="${MARGIN.left}" y1="${plotBottom}" x2="${WIDTH - MARGIN.right}" y2="${plotBottom}" stroke="#333"/>`,
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${plotBottom}" stroke="#333"/>`
  );

  series.forEach((s, index) => {
    const color = PALETTE[index % PALETTE.length];
    const path = s.points
      .map((p, i) => `${i === 0 ? "M" : "L"}${x(i).toFixed(1)},${y(p.value).toFixed(1)}`)
      .join(" ");
    parts.push(`<path d="${path}" fill="none" stroke="${color}" stroke-width="2"/>`);
    for (let i = 0; i < s.points.length; i++) {
      parts.push(`<circle cx="${x(i).toFixed(1)}" cy="${y(s.points[i].value).toFixed(1)}" r="3.5" fill="${color}"/>`);
    }
    const lx = MARGIN.left + 12;
    const ly = MARGIN.top + 8 + index * 18;
    parts.push(
      `<line x1="${lx}" y1="${ly}" x2="${lx + 22}" y2="${ly}" stroke="${color}" stroke-width="2"/>`,
      `<text x="${lx + 28}" y="${ly + 4}" font-size="12">${esc(s.label)}</text>`
    );
  });

  parts.push(
    `<text x="${WIDTH / 2}" y="${HEIGHT - 16}" text-anchor="middle" font-size="13">${esc(options.xLabel)}</text>`,
    `<text x="20" y="${HEIGHT / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 20 ${HEIGHT / 2})">${esc(options.yLabel)}</text>`,
    `</svg>`
  );
  return parts.join("\n");
}

export interface BarPanel {
  title: string;
  bars: { label: string; value: number }[];
}

/** Side-by-side bar panels sharing one y scale (hedging average ranks). */
export function barPanels(panels: BarPanel[], options: ChartOptions): string {
  if (panels.length === 0 || panels.every((p) => p.bars.length === 0)) {
    throw new Error("nothing to plot");
  }
  const width = 380 * panels.length;
  const height = 400;
  const margin = { top: 48, right: 16, bottom: 56, left: 56 };
  const values = panels.flatMap((p) => p.bars.map((b) => b.value));
  const hi = Math.max(...values) * 1.1;
  const innerH = height - margin.top - margin.bottom;
  const y = (v: number) => margin.top + innerH - (v / hi) * innerH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="sans-serif">`
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(
    `<text x="${width / 2}" y="20" text-anchor="middle" font-size="16">${esc(options.title)}</text>`
  );
  panels.forEach((panel, index) => {
    const x0 = index * 380;
    const innerW = 380 - margin.left - margin.right;
    const slot = innerW / panel.bars.length;
    parts.push(`<g class="panel" data-policy="${esc(panel.title)}">`);
    parts.push(
      `<text x="${x0 + 380 / 2}" y="${margin.top - 10}" text-anchor="middle" font-size="13">${esc(panel.title)}</text>`
    );
    for (const tick of niceTicks(0, hi, 4)) {
      const ty = y(tick);
      parts.push(
        `<line x1="${x0 + margin.left}" y1="${ty}" x2="${x0 + 380 - margin.right}" y2="${ty}" stroke="#eee"/>`,
        `<text x="${x0 + margin.left - 6}" y="${ty + 4}" text-anchor="end" font-size="10">${formatTick(tick)}</text>`
      );
    }
    panel.bars.forEach((bar, i) => {
      const bx = x0 + margin.left + i * slot + slot * 0.15;
      const bw = slot * 0.7;
      const by = y(bar.value);
      parts.push(
        `<rect x="${bx.toFixed(1)}" y="${by.toFixed(1)}" width="${bw.toFixed(1)}" height="${(height - margin.bottom - by).toFixed(1)}" fill="#1f77b4"/>`,
        `<text x="${(bx + bw / 2).toFixed(1)}" y="${height - margin.bottom + 16}" text-anchor="middle" font-size="10">${esc(bar.label)}</text>`
      );
    });
    parts.push(
      `<line x1="${x0 + margin.left}" y1="${height - margin.bottom}" x2="${x0 + 380 - margin.right}" y2="${height - margin.bottom}" stroke="#333"/>`
    );
    parts.push(`</g>`);
  });
  parts.push(
    `<text x="${width / 2}" y="${height - 12}" text-anchor="middle" font-size="13">${esc(options.xLabel)}</text>`,
    `<text x="16" y="${height / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 16 ${height / 2})">${esc(options.yLabel)}</text>`,
    `</svg>`
  );
  return parts.join("\n");
}
