// Thin fetch client for the policylens service. 409 (no supporting
// observations) and 413 (circuit too large to draw) are expected outcomes,
// not failures, and surface as typed results.

import { DagJson, QueryResultJson, TheoryInfo } from "./types.js";

export type QueryOutcome =
  | { kind: "ok"; result: QueryResultJson }
  | { kind: "no-support" }
  | { kind: "error"; message: string };

export type DagOutcome =
  | { kind: "ok"; dag: DagJson }
  | { kind: "too-large"; detail: string }
  | { kind: "error"; message: string };

export class ApiClient {
  constructor(private readonly base: string = "") {}

  async theories(): Promise<TheoryInfo[]> {
    const res = await fetch(`${this.base}/theories`);
    if (!res.ok) throw new Error(`GET /theories failed: ${res.status}`);
    return res.json();
  }

  async query(
    theoryId: string,
    body: { evidence: Record<string, boolean>; target: string; action?: string }
  ): Promise<QueryOutcome> {
    const res = await fetch(`${this.base}/theories/${theoryId}/query`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (res.status === 409) return { kind: "no-support" };
    if (!res.ok) return { kind: "error", message: await errorDetail(res) };
    return { kind: "ok", result: await res.json() };
  }

  async dag(
    theoryId: string,
    evidence: Record<string, boolean>
  ): Promise<DagOutcome> {
    const res = await fetch(`${this.base}/theories/${theoryId}/dag`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ evidence }),
    });
    if (res.status === 413) return { kind: "too-large", detail: await errorDetail(res) };
    if (!res.ok) return { kind: "error", message: await errorDetail(res) };
    return { kind: "ok", dag: await res.json() };
  }
}

async function errorDetail(res: Response): Promise<string> {
  try {
    const body = await res.json();
    return typeof body.detail === "string" ? body.detail : `HTTP ${res.status}`;
  } catch {
    return `HTTP ${res.status}`;
  }
}

/** Latest-wins sequencing: stale responses resolve to null and are dropped. */
export class LatestWins {
  private seq = 0;

  wrap<T>(promise: Promise<T>): Promise<T | null> {
    const token = ++this.seq;
    return promise.then((value) => (token === this.seq ? value : null));
  }
}
