/** Wire types mirroring the service's versioned JSON schemas. */

export interface InstanceSummary {
  existing_flights: number;
  new_flights: number;
  routes: number;
  new_pairs: number;
  connections: number;
  aircraft_types: number;
}

export interface FlightRow {
  id: string;
  kind: "existing" | "new";
  hub_direction: "inbound" | "outbound";
  origin: string;
  dest: string;
  dep_window: [number, number];
  non_cruise: number;
  cruise_bounds?: Record<string, [number, number]>;
  orig_arrival?: number;
  demand?: number;
  assigned_type?: string;
}

export interface InstanceDoc {
  schema_version: number;
  hub: string;
  airports: { code: string }[];
  flights: FlightRow[];
  routes: { tail: string; flights: string[] }[];
  new_pairs: { outbound: string; inbound: string }[];
}

export interface SolveStats {
  nodes: number;
  wall_time: number;
  rel_gap_pct: number | null;
  incumbent: number | null;
  best_bound: number | null;
  status: string;
}

export interface SolutionDoc {
  model_kind: "ctc" | "ctcas";
  variant: string;
  objective: number;
  breakdown: Record<string, number>;
  values: Record<string, number>;
}

export interface RunRecordDoc {
  id: string;
  instance_hash: string;
  model_kind: string;
  variant: string;
  config: Record<string, unknown>;
  solution: SolutionDoc | null;
  stats: SolveStats | null;
}

export interface FrontierPointDoc {
  max_swap: number;
  profit: number;
  spill_pct: number;
  swaps_used: number;
  status: string;
}

export interface JobSnapshot {
  id: string;
  kind: "solve" | "whatif";
  status: "queued" | "running" | "done" | "failed" | "cancelled";
  error: string | null;
  events: number;
  result: Record<string, unknown> | null;
}
