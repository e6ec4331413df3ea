/** Planner console wiring: load an instance, run what-if sweeps, browse
 * the frontier, and inspect a run's time-space network. Single-page,
 * talking only to the documented service API. */

import { ApiClient, rawNumberToken } from "./api.js";
import { layoutFrontier, renderFrontierSvg } from "./frontier.js";
import { pollJob } from "./poll.js";
import { extractPlan } from "./schedule.js";
import {
  beginSweep,
  editParam,
  initialState,
  selectRun,
  sweepLanded,
  ViewState,
  WhatifParams,
} from "./state.js";
import { layoutTimeSpace, renderTimeSpaceSvg } from "./timespace.js";
import type { FrontierPointDoc, InstanceDoc } from "./types.js";

export class PlannerApp {
  state: ViewState = initialState();
  instance: InstanceDoc | null = null;

  constructor(
    private api: ApiClient,
    private root: { querySelector(sel: string): { innerHTML: string } | null },
  ) {}

  private panel(sel: string): { innerHTML: string } {
    const el = this.root.querySelector(sel);
    if (!el) throw new Error(`missing panel ${sel}`);
    return el;
  }

  async loadInstance(doc: InstanceDoc): Promise<void> {
    const { id } = await this.api.uploadInstance(doc);
    this.state = { ...initialState(), instanceId: id };
    this.instance = await this.api.getInstance(id);
    this.panel("#status").innerHTML =
      `instance ${id}: ${this.instance.flights.length} flights, ` +
      `${this.instance.routes.length} routes`;
  }

  onParamEdit(key: keyof WhatifParams, value: number): void {
    this.state = editParam(this.state, key, value);
    this.renderBanner();
  }

  renderBanner(): void {
    this.panel("#banner").innerHTML = this.state.stale
      ? `<div class="stale" data-banner="stale">parameters changed; ` +
        `results below are stale until you re-solve</div>`
      : "";
  }

  async runSweep(): Promise<FrontierPointDoc[]> {
    if (!this.state.instanceId) throw new Error("load an instance first");
    const { job_id } = await this.api.startWhatif({
      instance_id: this.state.instanceId,
      k_max: this.state.pending.maxSwap,
    });
    this.state = beginSweep(this.state, job_id);
    try {
      const snap = await pollJob(this.api, job_id, {
        onUpdate: (s) => {
          this.panel("#status").innerHTML =
            `sweep ${job_id}: ${s.status} (${s.events} events)`;
        },
      });
      const points = this.api.frontierFromJob(snap);
      const runIds = points.map(() => null);
      this.state = sweepLanded(this.state, job_id, points, runIds);
      this.renderFrontier();
      this.renderBanner();
      return points;
    } catch (err) {
      this.state = {
        ...this.state,
        sweepInFlight: false,
        activeJobs: this.state.activeJobs.filter((j) => j !== job_id),
      };
      this.panel("#status").innerHTML =
        `sweep failed: ${(err as Error).message} ` +
        `<button data-retry="1">retry</button>`;
      throw err;
    }
  }

  renderFrontier(): void {
    const points = this.state.frontier.points;
    if (!points.length) {
      this.panel("#frontier").innerHTML =
        `<p class="empty">no sweep yet; pick a swap cap and re-solve</p>`;
      return;
    }
    this.panel("#frontier").innerHTML =
      renderFrontierSvg(layoutFrontier(points));
  }

  async showRun(runId: string): Promise<void> {
    const record = await this.api.getRun(runId);
    this.state = selectRun(this.state, record);
    if (!record.solution || !this.instance) {
      this.panel("#timespace").innerHTML =
        `<p class="empty">run ${runId} carries no solution</p>`;
      return;
    }
    const plan = extractPlan(this.instance, record.solution);
    const layout = layoutTimeSpace(plan);
    this.panel("#timespace").innerHTML = renderTimeSpaceSvg(layout, null);
    const raw = this.api.rawRunText.get(runId) ?? "";
    const profitToken = rawNumberToken(raw, "objective") ??
      String(record.solution.objective);
    this.panel("#profit").innerHTML =
      `<span data-run="${runId}" data-profit="${profitToken}">` +
      `profit ${profitToken} (run ${runId})</span>`;
  }
}
