import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, rawNumberToken } from "../src/api.js";

function fakeFetch(routes: Record<string, unknown>) {
  const calls: { url: string; body?: string }[] = [];
  const impl = async (url: string, init?: { body?: string }) => {
    calls.push({ url, body: init?.body });
    if (!(url in routes)) {
      return { ok: false, status: 404, text: async () => "not found" };
    }
    const payload = routes[url];
    const text = typeof payload === "string"
      ? payload
      : JSON.stringify(payload);
    return { ok: true, status: 200, text: async () => text };
  };
  return { impl, calls };
}

describe("ApiClient", () => {
  it("uploads instances and returns the id", async () => {
    const { impl, calls } = fakeFetch({ "/instances": { id: "abc123" } });
    const api = new ApiClient("", impl);
    const out = await api.uploadInstance({ flights: [] } as never);
    expect(out.id).toBe("abc123");
    expect(calls[0].body).toContain("flights");
  });

  it("raises ApiError with the status on failures", async () => {
    const { impl } = fakeFetch({});
    const api = new ApiClient("", impl);
    await expect(api.getJob("zzz")).rejects.toThrowError(ApiError);
    await expect(api.getJob("zzz")).rejects.toMatchObject({ status: 404 });
  });

  it("keeps the raw record text for byte-exact display", async () => {
    const raw = `{"id":"r1","solution":{"objective":30362.15859387021}}`;
    const { impl } = fakeFetch({ "/runs/r1": raw });
    const api = new ApiClient("", impl);
    await api.getRun("r1");
    expect(api.rawRunText.get("r1")).toBe(raw);
  });
});

describe("rawNumberToken", () => {
  it("returns the literal token, not a reformatted float", () => {
    const raw = `{"objective":30362.158593870205,"other":1}`;
    expect(rawNumberToken(raw, "objective")).toBe("30362.158593870205");
  });

  it("handles integers and exponent forms", () => {
    expect(rawNumberToken(`{"objective":-5}`, "objective")).toBe("-5");
    expect(rawNumberToken(`{"objective":1.2e-07}`, "objective"))
      .toBe("1.2e-07");
    expect(rawNumberToken(`{}`, "objective")).toBeNull();
  });
});
