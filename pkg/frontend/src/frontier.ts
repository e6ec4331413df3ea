/** Profit-vs-swap-cap frontier with a spill overlay and plateau marker.
 * Pure geometry plus invariant checks; rendering is string SVG. */

import { pct } from "./format.js";
import type { FrontierPointDoc } from "./types.js";

export interface FrontierLayout {
  width: number;
  height: number;
  profit: { x: number; y: number; point: FrontierPointDoc }[];
  spill: { x: number; y: number }[];
  plateauIndex: number;
  monotone: boolean;
}

export function isMonotone(points: FrontierPointDoc[]): boolean {
  for (let k = 1; k < points.length; k += 1) {
    const prev = points[k - 1].profit;
    if (points[k].profit < prev - 1e-6 * Math.max(1, Math.abs(prev))) {
      return false;
    }
  }
  return true;
}

export function plateauIndex(points: FrontierPointDoc[]): number {
  for (let k = 1; k < points.length; k += 1) {
    const prev = points[k - 1].profit;
    if (points[k].profit <= prev + 1e-6 * Math.max(1, Math.abs(prev))) {
      return k - 1;
    }
  }
  return Math.max(points.length - 1, 0);
}

export function layoutFrontier(
  points: FrontierPointDoc[],
  opts: { width?: number; height?: number } = {},
): FrontierLayout {
  const width = opts.width ?? 640;
  const height = opts.height ?? 280;
  const lo = Math.min(...points.map((p) => p.profit));
  const hi = Math.max(...points.map((p) => p.profit));
  const span = Math.max(hi - lo, 1e-9);
  const sMax = Math.max(...points.map((p) => p.spill_pct), 1e-9);
  const x = (k: number) =>
    60 + (k / Math.max(points.length - 1, 1)) * (width - 100);
  const yProfit = (v: number) => height - 50 - ((v - lo) / span) *
    (height - 100);
  const ySpill = (v: number) => height - 50 - (v / sMax) * (height - 100);
  return {
    width,
    height,
    profit: points.map((p) => ({
      x: x(p.max_swap),
      y: yProfit(p.profit),
      point: p,
    })),
    spill: points.map((p) => ({ x: x(p.max_swap), y: ySpill(p.spill_pct) })),
    plateauIndex: plateauIndex(points),
    monotone: isMonotone(points),
  };
}

export function renderFrontierSvg(layout: FrontierLayout): string {
  const { width, height } = layout;
  const parts = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
    `height="${height}" font-family="sans-serif" font-size="11">`,
  ];
  const path = layout.profit
    .map((p, i) => `${i === 0 ? "M" : "L"}${p.x.toFixed(1)},${p.y.toFixed(1)}`)
    .join(" ");
  parts.push(`<path d="${path}" fill="none" stroke="#2b6cb0" ` +
    `stroke-width="2"/>`);
  const spillPath = layout.spill
    .map((p, i) => `${i === 0 ? "M" : "L"}${p.x.toFixed(1)},${p.y.toFixed(1)}`)
    .join(" ");
  parts.push(`<path d="${spillPath}" fill="none" stroke="#c23b22" ` +
    `stroke-dasharray="4,3"/>`);
  layout.profit.forEach((p, i) => {
    parts.push(
      `<circle cx="${p.x.toFixed(1)}" cy="${p.y.toFixed(1)}" r="4" ` +
      `fill="#2b6cb0" data-k="${p.point.max_swap}">` +
      `<title>cap ${p.point.max_swap}: profit ${p.point.profit}, ` +
      `spill ${pct(p.point.spill_pct)}, swaps used ` +
      `${p.point.swaps_used}</title></circle>`,
    );
    if (i === layout.plateauIndex) {
      parts.push(
        `<line x1="${p.x.toFixed(1)}" y1="30" x2="${p.x.toFixed(1)}" ` +
        `y2="${height - 50}" stroke="#888" stroke-dasharray="2,3" ` +
        `data-plateau="${p.point.max_swap}"/>`,
        `<text x="${p.x.toFixed(1)}" y="22" text-anchor="middle" ` +
        `fill="#555">plateau at ${p.point.max_swap}</text>`,
      );
    }
  });
  if (!layout.monotone) {
    parts.push(`<text x="${width - 10}" y="16" text-anchor="end" ` +
      `fill="#c00" data-badge="non-monotone">frontier not monotone ` +
      `(solver statuses need review)</text>`);
  }
  parts.push("</svg>");
  return parts.join("");
}
