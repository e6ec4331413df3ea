/** Read-only interpretation of a solved schedule.
 *
 * Everything here is parsed straight out of the solution's variable map;
 * the client never recomputes objectives or feasibility.
 */

import type { InstanceDoc, SolutionDoc } from "./types.js";

export interface FlightSchedule {
  id: string;
  kind: "existing" | "new";
  origin: string;
  dest: string;
  dep: number;
  arr: number;
  cruise: number;
  tardiness: number;
  type: string | null;
  compressed: boolean;
  tail: string | null;
}

export interface PlanView {
  flights: FlightSchedule[];
  insertions: { host: string; flight: string }[]; // y[i|j] = 1 arcs
  swaps: [string, string][];                      // unordered, once each
}

function value(sol: SolutionDoc, name: string): number | undefined {
  return sol.values[name];
}

function assignedType(
  sol: SolutionDoc,
  inst: InstanceDoc,
  fid: string,
): string | null {
  const row = inst.flights.find((f) => f.id === fid);
  if (!row) return null;
  if (sol.model_kind === "ctc" && row.kind === "existing") {
    return row.assigned_type ?? null;
  }
  for (const [name, v] of Object.entries(sol.values)) {
    if (v > 0.5 && name.startsWith(`z[${fid}|`)) {
      return name.slice(name.indexOf("|") + 1, -1);
    }
  }
  return row.assigned_type ?? null;
}

export function extractPlan(inst: InstanceDoc, sol: SolutionDoc): PlanView {
  const tails = new Map<string, string>();
  for (const route of inst.routes) {
    for (const fid of route.flights) tails.set(fid, route.tail);
  }
  const flights: FlightSchedule[] = [];
  for (const row of inst.flights) {
    const dep = value(sol, `d[${row.id}]`);
    const arr = value(sol, `a[${row.id}]`);
    if (dep === undefined || arr === undefined) continue;
    const type = assignedType(sol, inst, row.id);
    let cruise = 0;
    for (const [name, v] of Object.entries(sol.values)) {
      if (name.startsWith(`f[${row.id}|`)) cruise += v;
    }
    const bounds = type ? row.cruise_bounds?.[type] : undefined;
    // interior-point solutions sit a hundredth of a minute inside the
    // bound; only real compression (6+ seconds) drops the dotted style
    const compressed = bounds ? cruise < bounds[1] - 0.1 : false;
    flights.push({
      id: row.id,
      kind: row.kind,
      origin: row.origin,
      dest: row.dest,
      dep,
      arr,
      cruise,
      tardiness: value(sol, `b[${row.id}]`) ?? 0,
      type,
      compressed,
      tail: tails.get(row.id) ?? null,
    });
  }
  const insertions: { host: string; flight: string }[] = [];
  const swapSet = new Map<string, [string, string]>();
  for (const [name, v] of Object.entries(sol.values)) {
    if (v <= 0.5) continue;
    if (name.startsWith("y[")) {
      const [host, flight] = name.slice(2, -1).split("|");
      insertions.push({ host, flight });
    } else if (name.startsWith("s[")) {
      const [a, b] = name.slice(2, -1).split("|");
      const key = [a, b].sort().join("|");
      swapSet.set(key, [a, b].sort() as [string, string]);
    }
  }
  insertions.sort((a, b) => a.flight.localeCompare(b.flight));
  return { flights, insertions, swaps: [...swapSet.values()] };
}
