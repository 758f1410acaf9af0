/** Vector renderer: the sweep as four marker series on frequency-vs-n axes. */

import { DEFAULT_COLORS, Layout, makeLayout, SeriesColors } from "./layout";
import { Fig2Row } from "./schema";

const FMT = (v: number) => (Number.isInteger(v) ? String(v) : v.toFixed(2));

function star(x: number, y: number, r: number): string {
  const pts: string[] = [];
  for (let k = 0; k < 10; k++) {
    const rad = k % 2 === 0 ? r : r * 0.45;
    const a = -Math.PI / 2 + (k * Math.PI) / 5;
    pts.push(`${(x + rad * Math.cos(a)).toFixed(2)},${(y + rad * Math.sin(a)).toFixed(2)}`);
  }
  return `<polygon points="${pts.join(" ")}"/>`;
}

function triangle(x: number, y: number, r: number): string {
  return `<polygon points="${x},${(y - r).toFixed(2)} ${(x - r).toFixed(2)},${(y + r).toFixed(2)} ${(x + r).toFixed(2)},${(y + r).toFixed(2)}"/>`;
}

function square(x: number, y: number, r: number): string {
  return `<rect x="${(x - r).toFixed(2)}" y="${(y - r).toFixed(2)}" width="${2 * r}" height="${2 * r}"/>`;
}

function cross(x: number, y: number, r: number): string {
  return (
    `<path d="M ${(x - r).toFixed(2)} ${(y - r).toFixed(2)} L ${(x + r).toFixed(2)} ${(y + r).toFixed(2)} ` +
    `M ${(x - r).toFixed(2)} ${(y + r).toFixed(2)} L ${(x + r).toFixed(2)} ${(y - r).toFixed(2)}" stroke-width="2.2"/>`
  );
}

function axes(l: Layout): string {
  const parts: string[] = [];
  parts.push(
    `<line x1="${l.left}" y1="${l.bottom}" x2="${l.right}" y2="${l.bottom}" stroke="#333"/>`,
    `<line x1="${l.left}" y1="${l.top}" x2="${l.left}" y2="${l.bottom}" stroke="#333"/>`,
  );
  for (const t of l.yTicks) {
    const y = l.yOf(t);
    parts.push(
      `<line x1="${l.left - 5}" y1="${y.toFixed(2)}" x2="${l.right}" y2="${y.toFixed(2)}" stroke="#ddd"/>`,
      `<text x="${l.left - 10}" y="${(y + 4).toFixed(2)}" text-anchor="end" font-size="12">${FMT(t)}</text>`,
    );
  }
  for (const t of l.xTicks) {
    const x = l.xOf(t);
    parts.push(
      `<line x1="${x.toFixed(2)}" y1="${l.bottom}" x2="${x.toFixed(2)}" y2="${l.bottom + 5}" stroke="#333"/>`,
      `<text x="${x.toFixed(2)}" y="${l.bottom + 20}" text-anchor="middle" font-size="12">${t}</text>`,
    );
  }
  parts.push(
    `<text x="${(l.left + l.right) / 2}" y="${l.bottom + 42}" text-anchor="middle" font-size="14">dimension n</text>`,
    `<text x="18" y="${(l.top + l.bottom) / 2}" text-anchor="middle" font-size="14" transform="rotate(-90 18 ${(l.top + l.bottom) / 2})">separability frequency</text>`,
  );
  return parts.join("\n");
}

function legend(l: Layout, colors: SeriesColors): string {
  const entries: Array<[string, string, (x: number, y: number, r: number) => string]> = [
    ["mean", colors.mean, star],
    ["max", colors.max, triangle],
    ["min", colors.min, square],
    ["bound", colors.bound, cross],
  ];
  const parts: string[] = [`<g id="legend" font-size="12">`];
  entries.forEach(([label, color, shape], i) => {
    const x = l.left + 18 + i * 90;
    const y = l.top - 18;
    const mark = shape(x, y, 5);
    const styled = label === "bound"
      ? mark.replace("<path ", `<path stroke="${color}" fill="none" `)
      : mark.replace(/^<(polygon|rect) /, `<$1 fill="${color}" `);
    parts.push(styled, `<text x="${x + 10}" y="${y + 4}">${label}</text>`);
  });
  parts.push("</g>");
  return parts.join("\n");
}

/** Render the rows as a standalone SVG document string. */
export function renderSvg(rows: Fig2Row[], colors: SeriesColors = DEFAULT_COLORS): string {
  const l = makeLayout(rows);
  const sorted = [...rows].sort((a, b) => a.n - b.n);
  const markerOf = {
    mean: (r: Fig2Row) => star(l.xOf(r.n), l.yOf(r.meanFreq), 6),
    max: (r: Fig2Row) => triangle(l.xOf(r.n), l.yOf(r.maxFreq), 5),
    min: (r: Fig2Row) => square(l.xOf(r.n), l.yOf(r.minFreq), 4),
    bound: (r: Fig2Row) => cross(l.xOf(r.n), l.yOf(Math.max(0, r.boundEq12)), 6),
  };
  const series = (Object.keys(markerOf) as Array<keyof typeof markerOf>)
    .map((name) => {
      const color = colors[name];
      const fill = name === "bound" ? `stroke="${color}" fill="none"` : `fill="${color}"`;
      const marks = sorted.map((r) => markerOf[name](r)).join("\n");
      return `<g id="series-${name}" ${fill}>\n${marks}\n</g>`;
    })
    .join("\n");
  return [
    `<?xml version="1.0" encoding="UTF-8"?>`,
    `<svg xmlns="http://www.w3.org/2000/svg" width="${l.width}" height="${l.height}" viewBox="0 0 ${l.width} ${l.height}">`,
    `<rect width="${l.width}" height="${l.height}" fill="white"/>`,
    axes(l),
    legend(l, colors),
    series,
    `</svg>`,
    ``,
  ].join("\n");
}
