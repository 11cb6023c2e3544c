// Client behavior with a stubbed fetch: outcome mapping and latest-wins.

import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, LatestWins } from "../src/api.js";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("ApiClient", () => {
  it("maps 200 to ok with the parsed result", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => jsonResponse(200, { evidence: {}, count: "3", likelihoods: {} }))
    );
    const outcome = await new ApiClient().query("t", { evidence: {}, target: "actions" });
    expect(outcome.kind).toBe("ok");
  });

  it("maps 409 to the no-support outcome", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => jsonResponse(409, { detail: "none" })));
    const outcome = await new ApiClient().query("t", { evidence: {}, target: "actions" });
    expect(outcome).toEqual({ kind: "no-support" });
  });

  it("maps 413 to too drawing-cap outcome with the detail", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => jsonResponse(413, { detail: "circuit has 5000 nodes" }))
    );
    const outcome = await new ApiClient().dag("t", {});
    expect(outcome).toEqual({ kind: "too-large", detail: "circuit has 5000 nodes" });
  });

  it("maps 422 to an error with the server detail", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => jsonResponse(422, { detail: "unknown variable" })));
    const outcome = await new ApiClient().query("t", { evidence: {}, target: "actions" });
    expect(outcome).toEqual({ kind: "error", message: "unknown variable" });
  });

  it("sends evidence whole on every call (stateless server)", async () => {
    const spy = vi.fn(async () => jsonResponse(200, { evidence: {}, count: "1", likelihoods: {} }));
    vi.stubGlobal("fetch", spy);
    await new ApiClient().query("demo", {
      evidence: { x: true, y: false },
      target: "actions",
    });
    const [url, init] = spy.mock.calls[0] as unknown as [string, RequestInit];
    expect(url).toBe("/theories/demo/query");
    expect(JSON.parse(init.body as string)).toEqual({
      evidence: { x: true, y: false },
      target: "actions",
    });
  });
});

describe("LatestWins", () => {
  it("drops stale responses: only the newest resolves with a value", async () => {
    const seq = new LatestWins();
    let resolveSlow!: (v: string) => void;
    const slow = new Promise<string>((resolve) => (resolveSlow = resolve));
    const wrappedSlow = seq.wrap(slow);
    const wrappedFast = seq.wrap(Promise.resolve("fast"));
    expect(await wrappedFast).toBe("fast");
    resolveSlow("slow");
    expect(await wrappedSlow).toBeNull(); // superseded
  });

  it("passes through when uncontested", async () => {
    const seq = new LatestWins();
    expect(await seq.wrap(Promise.resolve(42))).toBe(42);
  });
});
