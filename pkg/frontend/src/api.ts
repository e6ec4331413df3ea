/** Thin typed client over the service API; no hidden endpoints. */

import type {
  FrontierPointDoc,
  InstanceDoc,
  JobSnapshot,
  RunRecordDoc,
} from "./types.js";

export type FetchLike = (
  url: string,
  init?: { method?: string; body?: string; headers?: Record<string, string> },
) => Promise<{ ok: boolean; status: number; text(): Promise<string> }>;

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  /** Raw JSON text of the last fetched run record, keyed by run id.
   * Displayed numbers are sliced from this text so they byte-match the
   * persisted record rather than a re-formatted float. */
  readonly rawRunText = new Map<string, string>();

  constructor(
    private base: string,
    private fetchImpl: FetchLike = fetch as unknown as FetchLike,
  ) {}

  private async request<T>(path: string, init?: {
    method?: string;
    body?: string;
  }): Promise<T> {
    const resp = await this.fetchImpl(this.base + path, {
      ...init,
      headers: { "content-type": "application/json" },
    });
    const text = await resp.text();
    if (!resp.ok) {
      throw new ApiError(resp.status, `${path}: ${text}`);
    }
    if (path.startsWith("/runs/") && !path.endsWith("/events")) {
      const parsed = JSON.parse(text) as { id?: string };
      if (parsed.id) this.rawRunText.set(parsed.id, text);
    }
    return JSON.parse(text) as T;
  }

  uploadInstance(doc: InstanceDoc): Promise<{ id: string }> {
    return this.request("/instances", {
      method: "POST",
      body: JSON.stringify(doc),
    });
  }

  getInstance(id: string): Promise<InstanceDoc> {
    return this.request(`/instances/${id}`);
  }

  startSolve(body: {
    instance_id: string;
    model: string;
    variant?: string;
    max_swap?: number | null;
  }): Promise<{ job_id: string }> {
    return this.request("/solves", {
      method: "POST",
      body: JSON.stringify(body),
    });
  }

  startWhatif(body: { instance_id: string; k_max: number }): Promise<{
    job_id: string;
  }> {
    return this.request("/whatif", {
      method: "POST",
      body: JSON.stringify(body),
    });
  }

  getJob(jobId: string): Promise<JobSnapshot> {
    return this.request(`/solves/${jobId}`);
  }

  cancelJob(jobId: string): Promise<{ cancelling: boolean }> {
    return this.request(`/solves/${jobId}/cancel`, { method: "POST" });
  }

  getRun(runId: string): Promise<RunRecordDoc> {
    return this.request(`/runs/${runId}`);
  }

  listRuns(): Promise<{ runs: { id: string }[] }> {
    return this.request("/runs");
  }

  frontierFromJob(job: JobSnapshot): FrontierPointDoc[] {
    const result = job.result as { points?: FrontierPointDoc[] } | null;
    return result?.points ?? [];
  }
}

/** Literal JSON token for a top-level-ish numeric field, as persisted.
 * Keeps the UI's displayed profit byte-identical to the record. */
export function rawNumberToken(rawJson: string, field: string): string | null {
  const pattern = new RegExp(
    `"${field}"\\s*:\\s*(-?\\d+(?:\\.\\d+)?(?:[eE][+-]?\\d+)?)`,
  );
  const match = pattern.exec(rawJson);
  return match ? match[1] : null;
}
