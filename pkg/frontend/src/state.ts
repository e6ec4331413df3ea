/** Client-side view state.
 *
 * Parameter edits never mutate persisted runs: pending what-if settings
 * live here until a re-solve posts them, and every displayed figure keeps
 * the run id it came from. Editing a parameter after results are shown
 * raises the stale flag until the next solve lands.
 */

import type { FrontierPointDoc, RunRecordDoc } from "./types.js";

export interface WhatifParams {
  maxSwap: number;
  psi: number;
  sigmaBase: number;
  cFuel: number;
  windowWidth: number;
}

export interface ViewState {
  instanceId: string | null;
  pending: WhatifParams;
  appliedParams: WhatifParams | null;
  activeJobs: string[];
  frontier: { runIds: (string | null)[]; points: FrontierPointDoc[] };
  selectedRun: RunRecordDoc | null;
  stale: boolean;
  sweepInFlight: boolean;
}

export const DEFAULT_PARAMS: WhatifParams = {
  maxSwap: 3,
  psi: 500,
  sigmaBase: 60,
  cFuel: 1.2,
  windowWidth: 90,
};

export function initialState(): ViewState {
  return {
    instanceId: null,
    pending: { ...DEFAULT_PARAMS },
    appliedParams: null,
    activeJobs: [],
    frontier: { runIds: [], points: [] },
    selectedRun: null,
    stale: false,
    sweepInFlight: false,
  };
}

export function editParam(
  state: ViewState,
  key: keyof WhatifParams,
  value: number,
): ViewState {
  const pending = { ...state.pending, [key]: value };
  const stale = state.appliedParams !== null &&
    JSON.stringify(pending) !== JSON.stringify(state.appliedParams);
  return { ...state, pending, stale };
}

export function beginSweep(state: ViewState, jobId: string): ViewState {
  if (state.sweepInFlight) {
    throw new Error("a what-if sweep is already in flight for this tab");
  }
  return {
    ...state,
    activeJobs: [...state.activeJobs, jobId],
    sweepInFlight: true,
  };
}

export function sweepLanded(
  state: ViewState,
  jobId: string,
  points: FrontierPointDoc[],
  runIds: (string | null)[],
): ViewState {
  return {
    ...state,
    activeJobs: state.activeJobs.filter((j) => j !== jobId),
    frontier: { points, runIds },
    appliedParams: { ...state.pending },
    stale: false,
    sweepInFlight: false,
  };
}

export function selectRun(
  state: ViewState,
  record: RunRecordDoc,
): ViewState {
  return { ...state, selectedRun: record };
}
