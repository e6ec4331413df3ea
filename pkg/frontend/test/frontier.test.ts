import { readFileSync } from "node:fs";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import {
  isMonotone,
  layoutFrontier,
  plateauIndex,
  renderFrontierSvg,
} from "../src/frontier.js";
import type { FrontierPointDoc } from "../src/types.js";

const sweep = JSON.parse(readFileSync(
  join(__dirname, "fixtures", "sweep.json"), "utf8",
)) as { points: FrontierPointDoc[] };

describe("recorded eleven-point sweep", () => {
  it("has eleven points and a nondecreasing profit curve", () => {
    expect(sweep.points).toHaveLength(11);
    expect(isMonotone(sweep.points)).toBe(true);
  });

  it("annotates the plateau where profit stops improving", () => {
    const k = plateauIndex(sweep.points);
    expect(k).toBe(1); // one swap pays off, further budget is idle
    const svg = renderFrontierSvg(layoutFrontier(sweep.points));
    expect(svg).toContain(`data-plateau="${k}"`);
    expect(svg).toContain("plateau at 1");
  });

  it("renders one marker per point with profit in the tooltip", () => {
    const svg = renderFrontierSvg(layoutFrontier(sweep.points));
    for (const p of sweep.points) {
      expect(svg).toContain(`data-k="${p.max_swap}"`);
    }
    expect((svg.match(/<circle/g) ?? []).length).toBe(11);
  });
});

describe("non-monotone input", () => {
  it("gets a review badge instead of silent rendering", () => {
    const broken = sweep.points.map((p) => ({ ...p }));
    broken[5].profit -= 1000.0;
    expect(isMonotone(broken)).toBe(false);
    const svg = renderFrontierSvg(layoutFrontier(broken));
    expect(svg).toContain(`data-badge="non-monotone"`);
  });
});
