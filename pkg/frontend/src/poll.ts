/** Poll a job until it reaches a terminal state. */

import type { ApiClient } from "./api.js";
import type { JobSnapshot } from "./types.js";

export interface PollOptions {
  intervalMs?: number;
  timeoutMs?: number;
  onUpdate?: (snap: JobSnapshot) => void;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) =>
  new Promise<void>((resolve) => setTimeout(resolve, ms));

export async function pollJob(
  api: ApiClient,
  jobId: string,
  opts: PollOptions = {},
): Promise<JobSnapshot> {
  const interval = opts.intervalMs ?? 500;
  const deadline = Date.now() + (opts.timeoutMs ?? 10 * 60 * 1000);
  const sleep = opts.sleep ?? defaultSleep;
  for (;;) {
    const snap = await api.getJob(jobId);
    opts.onUpdate?.(snap);
    if (snap.status === "done") return snap;
    if (snap.status === "failed") {
      throw new Error(snap.error ?? `job ${jobId} failed`);
    }
    if (snap.status === "cancelled") return snap;
    if (Date.now() > deadline) {
      throw new Error(`job ${jobId} timed out while ${snap.status}`);
    }
    await sleep(interval);
  }
}
