/** Deterministic SVG renderer: one mean line plus a +-SD band per series. */

import { CurveTable, Series } from "./csv.js";

export interface PlotOptions {
  width?: number;
  height?: number;
  title?: string;
  xLabel?: string;
  yLabel?: string;
  /** overrides the series labels from the CSV header (same order) */
  labels?: string[];
  /** fixed y range, e.g. [0, 1000] for single-step reward curves */
  yDomain?: [number, number];
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
  "#8c564b"];

const MARGIN = { top: 42, right: 18, bottom: 48, left: 64 };

interface Scale {
  (v: number): number;
  domain: [number, number];
}

function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const fn = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  fn.domain = domain;
  return fn;
}

function niceTicks(lo: number, hi: number, count = 6): number[] {
  const span = hi - lo || 1;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = (count * step) / span;
  const mult = err <= 0.15 ? 10 : err <= 0.35 ? 5 : err <= 0.75 ? 2 : 1;
  const s = step * mult;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-9; v += s) {
    ticks.push(Number(v.toFixed(12)));
  }
  return ticks;
}

function fmt(v: number): string {
  if (Number.isInteger(v)) return String(v);
  return String(Number(v.toPrecision(6)));
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;")
    .replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

function pathFrom(xs: number[], ys: number[]): string {
  return xs.map((x, i) => `${i === 0 ? "M" : "L"}${fmt(x)},${fmt(ys[i])}`)
    .join("");
}

function bandPath(sx: Scale, sy: Scale, s: Series): string {
  const upper = s.x.map((x, i) =>
    `${i === 0 ? "M" : "L"}${fmt(sx(x))},${fmt(sy(s.mean[i] + s.sd[i]))}`);
  const lower = [...s.x.keys()].reverse().map((i) =>
    `L${fmt(sx(s.x[i]))},${fmt(sy(s.mean[i] - s.sd[i]))}`);
  return upper.join("") + lower.join("") + "Z";
}

export function renderCurves(table: CurveTable, opts: PlotOptions = {}): string {
  const width = opts.width ?? 760;
  const height = opts.height ?? 440;
  const series = table.series.filter((s) => s.x.length > 0);
  if (opts.labels) {
    if (opts.labels.length !== table.series.length) {
      throw new Error(`got ${opts.labels.length} labels for ` +
        `${table.series.length} series`);
    }
    table.series.forEach((s, i) => { s.label = opts.labels![i]; });
  }
  const xs = series.flatMap((s) => s.x);
  const xDomain: [number, number] = [Math.min(...xs), Math.max(...xs)];
  let yDomain = opts.yDomain;
  if (!yDomain) {
    const lows = series.flatMap((s) => s.mean.map((m, i) => m - s.sd[i]));
    const highs = series.flatMap((s) => s.mean.map((m, i) => m + s.sd[i]));
    const lo = Math.min(...lows);
    const hi = Math.max(...highs);
    const pad = (hi - lo || 1) * 0.05;
    yDomain = [lo - pad, hi + pad];
  }
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;
  const sx = linearScale(xDomain, [0, plotW]);
  const sy = linearScale(yDomain, [plotH, 0]);

  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
    `height="${height}" viewBox="0 0 ${width} ${height}" ` +
    `font-family="Helvetica, Arial, sans-serif">`);
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  if (opts.title) {
    parts.push(`<text class="title" x="${width / 2}" y="24" ` +
      `text-anchor="middle" font-size="15">${esc(opts.title)}</text>`);
  }
  parts.push(`<g transform="translate(${MARGIN.left},${MARGIN.top})">`);

  for (const t of niceTicks(yDomain[0], yDomain[1])) {
    const y = sy(t);
    parts.push(`<line class="grid" x1="0" y1="${fmt(y)}" x2="${plotW}" ` +
      `y2="${fmt(y)}" stroke="#dddddd" stroke-width="1"/>`);
    parts.push(`<text class="y-tick" x="-8" y="${fmt(y + 4)}" ` +
      `text-anchor="end" font-size="11">${fmt(t)}</text>`);
  }
  for (const t of niceTicks(xDomain[0], xDomain[1])) {
    const x = sx(t);
    parts.push(`<line class="x-tick-mark" x1="${fmt(x)}" y1="${plotH}" ` +
      `x2="${fmt(x)}" y2="${plotH + 5}" stroke="#333333"/>`);
    parts.push(`<text class="x-tick" x="${fmt(x)}" y="${plotH + 18}" ` +
      `text-anchor="middle" font-size="11">${fmt(t)}</text>`);
  }
  parts.push(`<line x1="0" y1="${plotH}" x2="${plotW}" y2="${plotH}" ` +
    `stroke="#333333"/>`);
  parts.push(`<line x1="0" y1="0" x2="0" y2="${plotH}" stroke="#333333"/>`);

  series.forEach((s, k) => {
    const color = PALETTE[k % PALETTE.length];
    if (s.sd.some((v) => v > 0)) {
      parts.push(`<path class="band" data-series="${esc(s.label)}" ` +
        `d="${bandPath(sx, sy, s)}" fill="${color}" fill-opacity="0.18" ` +
        `stroke="none"/>`);
    } else {
      parts.push(`<path class="band band-empty" data-series="${esc(s.label)}" ` +
        `d="${bandPath(sx, sy, s)}" fill="${color}" fill-opacity="0" ` +
        `stroke="none"/>`);
    }
    const line = pathFrom(s.x.map((v) => sx(v)), s.mean.map((v) => sy(v)));
    parts.push(`<path class="mean-line" data-series="${esc(s.label)}" ` +
      `data-points="${s.x.length}" d="${line}" fill="none" ` +
      `stroke="${color}" stroke-width="1.8"/>`);
  });

  series.forEach((s, k) => {
    const color = PALETTE[k % PALETTE.length];
    const y = 10 + k * 18;
    parts.push(`<line x1="${plotW - 150}" y1="${y}" x2="${plotW - 120}" ` +
      `y2="${y}" stroke="${color}" stroke-width="2"/>`);
    parts.push(`<text class="legend" x="${plotW - 112}" y="${y + 4}" ` +
      `font-size="12">${esc(s.label)}</text>`);
  });

  if (opts.xLabel) {
    parts.push(`<text class="x-label" x="${plotW / 2}" y="${plotH + 38}" ` +
      `text-anchor="middle" font-size="13">${esc(opts.xLabel)}</text>`);
  }
  if (opts.yLabel) {
    parts.push(`<text class="y-label" transform="rotate(-90)" ` +
      `x="${-plotH / 2}" y="-46" text-anchor="middle" font-size="13">` +
      `${esc(opts.yLabel)}</text>`);
  }
  parts.push("</g>");
  parts.push("</svg>");
  return parts.join("\n");
}
