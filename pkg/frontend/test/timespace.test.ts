import { readFileSync } from "node:fs";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { extractPlan } from "../src/schedule.js";
import { layoutTimeSpace, renderTimeSpaceSvg } from "../src/timespace.js";
import type { InstanceDoc, RunRecordDoc } from "../src/types.js";

const instance = JSON.parse(readFileSync(
  join(__dirname, "fixtures", "instance.json"), "utf8",
)) as InstanceDoc;
const record = JSON.parse(readFileSync(
  join(__dirname, "fixtures", "run_record.json"), "utf8",
)) as RunRecordDoc;

const plan = extractPlan(instance, record.solution!);

describe("plan extraction from a recorded run", () => {
  it("reads the chosen swap straight from the variable map", () => {
    expect(plan.swaps).toEqual([["451", "623"]]);
  });

  it("keeps the insertion arcs", () => {
    const arcs = plan.insertions.map((i) => `${i.host}->${i.flight}`);
    expect(arcs).toContain("521->1842");
    expect(arcs).toContain("430->451");
  });

  it("reports the re-fleeted pair type without recomputation", () => {
    const outbound = plan.flights.find((f) => f.id === "1842");
    expect(outbound?.type).toBe("A320_212");
  });
});

describe("time-space rendering", () => {
  const layout = layoutTimeSpace(plan);
  const svg = renderTimeSpaceSvg(layout);

  it("draws one lane per airport and one arc per flight", () => {
    expect(layout.lanes.map((l) => l.airport)).toEqual(
      ["IAH", "MCO", "MSP", "ORD"],
    );
    expect(layout.arcs).toHaveLength(10);
  });

  it("marks the swap point", () => {
    expect(layout.swapMarks).toHaveLength(1);
    expect(svg).toContain("data-swap=\"swap 451↔623\"");
  });

  it("distinguishes original block times from compressed cruises", () => {
    const dotted = layout.arcs.filter((a) => a.dotted);
    const solid = layout.arcs.filter((a) => !a.dotted);
    expect(dotted.length).toBeGreaterThan(0);
    expect(solid.length).toBeGreaterThan(0);
    expect(svg).toContain("stroke-dasharray");
  });

  it("badges tardy arrivals", () => {
    const tardy = plan.flights.filter((f) => f.tardiness > 1e-9);
    expect(tardy.length).toBeGreaterThan(0);
    for (const f of tardy) {
      expect(svg).toContain(`data-badge="tardy-${f.id}"`);
    }
  });

  it("highlights new flights on the hosting aircraft's color", () => {
    const newArcs = layout.arcs.filter((a) => a.isNew);
    expect(newArcs).toHaveLength(2);
    const hostArc = layout.arcs.find((a) => a.flight === "521");
    expect(newArcs[0].color).toBe(hostArc?.color);
  });

  it("shows a validation badge when the audit failed upstream", () => {
    const badged = renderTimeSpaceSvg(layout, "audit failed");
    expect(badged).toContain(`data-badge="validation"`);
  });
});
