/** Time-space network layout: horizontal time axis, one lane per airport,
 * flight arcs colored per tail, dotted when the cruise keeps its original
 * block time and solid when compressed; swap points and new flights are
 * marked. Pure geometry; the DOM layer just prints SVG from it. */

import { clock, minutes } from "./format.js";
import type { PlanView } from "./schedule.js";

export interface Arc {
  flight: string;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  dotted: boolean;
  isNew: boolean;
  color: string;
  tardy: boolean;
  title: string;
}

export interface SwapMark {
  x: number;
  y: number;
  label: string;
}

export interface TimeSpaceLayout {
  width: number;
  height: number;
  lanes: { airport: string; y: number }[];
  arcs: Arc[];
  swapMarks: SwapMark[];
  ticks: { x: number; label: string }[];
}

const PALETTE = ["#c23b22", "#2b6cb0", "#2f855a", "#b7791f", "#6b46c1",
  "#0f766e", "#9d174d", "#4338ca"];

export function layoutTimeSpace(
  plan: PlanView,
  opts: { width?: number; laneGap?: number } = {},
): TimeSpaceLayout {
  const width = opts.width ?? 960;
  const laneGap = opts.laneGap ?? 56;
  const airports = [...new Set(
    plan.flights.flatMap((f) => [f.origin, f.dest]),
  )].sort();
  const laneOf = new Map(airports.map((a, i) => [a, 40 + i * laneGap]));
  const t0 = Math.min(...plan.flights.map((f) => f.dep)) - 30;
  const t1 = Math.max(...plan.flights.map((f) => f.arr)) + 30;
  const x = (t: number) => 80 + ((t - t0) / (t1 - t0)) * (width - 120);

  const tails = [...new Set(plan.flights.map((f) => f.tail ?? "new"))]
    .sort();
  const colorOf = new Map(
    tails.map((t, i) => [t, PALETTE[i % PALETTE.length]]),
  );
  // new flights ride the hosting aircraft's lane sequence: color them by
  // the host's tail when an insertion arc names it
  const hostOf = new Map<string, string>();
  for (const ins of plan.insertions) {
    const hostTail = plan.flights.find((f) => f.id === ins.host)?.tail;
    const flight = plan.flights.find((f) => f.id === ins.flight);
    if (flight && hostTail && flight.kind === "new") {
      hostOf.set(flight.id, hostTail);
    }
  }

  const arcs: Arc[] = plan.flights
    .slice()
    .sort((a, b) => a.dep - b.dep)
    .map((f) => {
      const tail = f.kind === "new"
        ? hostOf.get(f.id) ?? f.tail ?? "new"
        : f.tail ?? "new";
      return {
        flight: f.id,
        x1: x(f.dep),
        y1: laneOf.get(f.origin) ?? 0,
        x2: x(f.arr),
        y2: laneOf.get(f.dest) ?? 0,
        dotted: !f.compressed,
        isNew: f.kind === "new",
        color: colorOf.get(tail) ?? "#444",
        tardy: f.tardiness > 1e-9,
        title:
          `${f.id} ${f.origin}->${f.dest} dep ${clock(f.dep)} ` +
          `arr ${clock(f.arr)} cruise ${minutes(f.cruise)}` +
          (f.tardiness > 1e-9 ? ` late ${minutes(f.tardiness)}` : ""),
      };
    });

  const swapMarks: SwapMark[] = plan.swaps.map(([a, b]) => {
    const fa = plan.flights.find((f) => f.id === a);
    const fb = plan.flights.find((f) => f.id === b);
    const dep = Math.min(fa?.dep ?? 0, fb?.dep ?? 0);
    const lane = laneOf.get(fa?.origin ?? "") ?? 0;
    return { x: x(dep), y: lane, label: `swap ${a}↔${b}` };
  });

  const ticks = [];
  const firstHour = Math.ceil(t0 / 120) * 120;
  for (let t = firstHour; t <= t1; t += 120) {
    ticks.push({ x: x(t), label: clock(t) });
  }
  return {
    width,
    height: 80 + airports.length * laneGap,
    lanes: airports.map((a) => ({ airport: a, y: laneOf.get(a) ?? 0 })),
    arcs,
    swapMarks,
    ticks,
  };
}

export function renderTimeSpaceSvg(
  layout: TimeSpaceLayout,
  badge: string | null = null,
): string {
  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${layout.width}" ` +
    `height="${layout.height}" font-family="sans-serif" font-size="11">`,
  ];
  for (const lane of layout.lanes) {
    parts.push(
      `<line x1="60" y1="${lane.y}" x2="${layout.width - 20}" ` +
      `y2="${lane.y}" stroke="#ddd"/>`,
      `<text x="8" y="${lane.y + 4}">${lane.airport}</text>`,
    );
  }
  for (const tick of layout.ticks) {
    parts.push(
      `<text x="${tick.x}" y="${layout.height - 8}" text-anchor="middle" ` +
      `fill="#888">${tick.label}</text>`,
    );
  }
  for (const arc of layout.arcs) {
    const dash = arc.dotted ? ` stroke-dasharray="5,4"` : "";
    const widthAttr = arc.isNew ? 3 : 1.8;
    parts.push(
      `<line x1="${arc.x1.toFixed(1)}" y1="${arc.y1}" ` +
      `x2="${arc.x2.toFixed(1)}" y2="${arc.y2}" stroke="${arc.color}" ` +
      `stroke-width="${widthAttr}"${dash} data-flight="${arc.flight}">` +
      `<title>${arc.title}</title></line>`,
    );
    if (arc.tardy) {
      parts.push(
        `<circle cx="${arc.x2.toFixed(1)}" cy="${arc.y2}" r="5" ` +
        `fill="none" stroke="#c00" data-badge="tardy-${arc.flight}"/>`,
      );
    }
  }
  for (const mark of layout.swapMarks) {
    parts.push(
      `<g data-swap="${mark.label}">` +
      `<rect x="${(mark.x - 5).toFixed(1)}" y="${mark.y - 5}" width="10" ` +
      `height="10" fill="#fff" stroke="#000" transform="rotate(45 ` +
      `${mark.x.toFixed(1)} ${mark.y})"/>` +
      `<text x="${mark.x.toFixed(1)}" y="${mark.y - 10}" ` +
      `text-anchor="middle">${mark.label}</text></g>`,
    );
  }
  if (badge) {
    parts.push(
      `<text x="${layout.width - 24}" y="18" text-anchor="end" ` +
      `fill="#c00" data-badge="validation">${badge}</text>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}
