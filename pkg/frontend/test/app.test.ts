import { readFileSync } from "node:fs";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { ApiClient, rawNumberToken } from "../src/api.js";
import { PlannerApp } from "../src/app.js";
import {
  beginSweep,
  editParam,
  initialState,
  sweepLanded,
} from "../src/state.js";

const rawInstance = readFileSync(
  join(__dirname, "fixtures", "instance.json"), "utf8");
const rawRecord = readFileSync(
  join(__dirname, "fixtures", "run_record.json"), "utf8");
const rawSweep = readFileSync(
  join(__dirname, "fixtures", "sweep.json"), "utf8");
const recordId = (JSON.parse(rawRecord) as { id: string }).id;

function fixtureFetch() {
  const routes: Record<string, string> = {
    "/instances": `{"id":"inst1"}`,
    "/instances/inst1": rawInstance,
    [`/runs/${recordId}`]: rawRecord,
    "/whatif": `{"job_id":"j1"}`,
    "/solves/j1": JSON.stringify({
      id: "j1", kind: "whatif", status: "done", error: null, events: 3,
      result: JSON.parse(rawSweep),
    }),
  };
  return async (url: string) => ({
    ok: url in routes,
    status: url in routes ? 200 : 404,
    text: async () => routes[url] ?? "not found",
  });
}

function fakeDom() {
  const panels: Record<string, { innerHTML: string }> = {};
  return {
    panels,
    querySelector(sel: string) {
      panels[sel] = panels[sel] ?? { innerHTML: "" };
      return panels[sel];
    },
  };
}

describe("planner console", () => {
  it("runs a sweep and renders the frontier from the job result", async () => {
    const api = new ApiClient("", fixtureFetch());
    const dom = fakeDom();
    const app = new PlannerApp(api, dom);
    await app.loadInstance(JSON.parse(rawInstance));
    app.onParamEdit("maxSwap", 10);
    const points = await app.runSweep();
    expect(points).toHaveLength(11);
    expect(dom.panels["#frontier"].innerHTML).toContain("data-plateau");
    expect(app.state.sweepInFlight).toBe(false);
    expect(app.state.stale).toBe(false);
  });

  it("displays the profit byte-identically to the run record JSON", async () => {
    const api = new ApiClient("", fixtureFetch());
    const dom = fakeDom();
    const app = new PlannerApp(api, dom);
    await app.loadInstance(JSON.parse(rawInstance));
    await app.showRun(recordId);
    const token = rawNumberToken(rawRecord, "objective");
    expect(token).not.toBeNull();
    expect(rawRecord).toContain(`"objective":${token}`);
    expect(dom.panels["#profit"].innerHTML)
      .toContain(`data-profit="${token}"`);
    expect(dom.panels["#profit"].innerHTML).toContain(recordId);
    // the time-space view marks the recorded swap
    expect(dom.panels["#timespace"].innerHTML).toContain("data-swap");
  });

  it("raises the stale banner on parameter edits after results", () => {
    let state = initialState();
    state = beginSweep(state, "j1");
    state = sweepLanded(state, "j1", [], []);
    expect(state.stale).toBe(false);
    state = editParam(state, "psi", 1000);
    expect(state.stale).toBe(true);
    expect(() => beginSweep(beginSweep(state, "a"), "b")).toThrow(
      /already in flight/);
  });
});
