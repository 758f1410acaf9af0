/** Shared chart geometry: margins, scales and tick positions. */

import { Fig2Row } from "./schema";

export interface SeriesColors {
  mean: string;
  max: string;
  min: string;
  bound: string;
}

/** Defaults follow the conventional naming of the four series. */
export const DEFAULT_COLORS: SeriesColors = {
  mean: "#1f4fd8", // blue stars: means
  max: "#222222", // black triangles: maxima
  min: "#1a9641", // green squares: minima
  bound: "#d7191c", // red crosses: bound overlay
};

export interface Layout {
  width: number;
  height: number;
  left: number;
  right: number;
  top: number;
  bottom: number;
  xOf(n: number): number;
  yOf(freq: number): number;
  xTicks: number[];
  yTicks: number[];
}

export function makeLayout(rows: Fig2Row[], width = 840, height = 520): Layout {
  const left = 70;
  const right = width - 30;
  const top = 40;
  const bottom = height - 55;
  const ns = rows.map((r) => r.n);
  const lo = ns.length > 0 ? Math.min(...ns) : 1;
  const hi = ns.length > 0 ? Math.max(...ns) : 10;
  const span = hi > lo ? hi - lo : 1;
  const xOf = (n: number) => left + ((n - lo) / span) * (right - left);
  const yOf = (freq: number) => bottom - freq * (bottom - top);
  const xTicks = ns.length > 1 ? dedupe(ns) : [lo];
  const yTicks = [0, 0.2, 0.4, 0.6, 0.8, 1.0];
  return { width, height, left, right, top, bottom, xOf, yOf, xTicks, yTicks };
}

function dedupe(values: number[]): number[] {
  return [...new Set(values)].sort((a, b) => a - b);
}
