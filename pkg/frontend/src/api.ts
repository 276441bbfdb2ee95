/** Thin client over the graph service API with version-monotonic refresh.
 *
 * The server stamps every payload with `graphVersion`. The client keeps the
 * highest version seen and drops stale responses, so an out-of-order poll can
 * never roll the rendered graph backwards. Conditional GETs reuse the ETag.
 */

import { FlowsPayload, GraphPayload, PromisesPayload } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(readonly status: number, readonly code: string, message: string) {
    super(message);
  }
}

async function fail(response: Response): Promise<never> {
  let code = "HttpError";
  let message = `${response.status}`;
  try {
    const body = await response.json();
    code = body.code ?? code;
    message = body.message ?? message;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, code, message);
}

export class ApiClient {
  private etag: string | null = null;
  private lastVersion = 0;

  constructor(
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
    private readonly base = "",
  ) {}

  get version(): number {
    return this.lastVersion;
  }

  /** Fetch the graph; returns null when it is unchanged or stale. */
  async getGraph(): Promise<GraphPayload | null> {
    const headers: Record<string, string> = {};
    if (this.etag !== null) {
      headers["If-None-Match"] = this.etag;
    }
    const response = await this.fetchImpl(`${this.base}/api/graph`, { headers });
    if (response.status === 304) {
      return null;
    }
    if (!response.ok) {
      await fail(response);
    }
    const payload = (await response.json()) as GraphPayload;
    if (payload.graphVersion < this.lastVersion) {
      return null; // stale response from an older poll
    }
    this.etag = response.headers.get("ETag");
    this.lastVersion = payload.graphVersion;
    return payload;
  }

  async getPromises(): Promise<PromisesPayload> {
    const response = await this.fetchImpl(`${this.base}/api/promises`);
    if (!response.ok) {
      await fail(response);
    }
    return (await response.json()) as PromisesPayload;
  }

  async fulfillPromise(promiseId: string, hosts: string[]): Promise<void> {
    const response = await this.fetchImpl(
      `${this.base}/api/promises/${encodeURIComponent(promiseId)}`,
      {
        method: "PUT",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ hosts }),
      },
    );
    if (!response.ok) {
      await fail(response);
    }
  }

  async getFlows(src: string, dst: string): Promise<FlowsPayload> {
    const params = new URLSearchParams({ src, dst });
    const response = await this.fetchImpl(`${this.base}/api/flows?${params}`);
    if (!response.ok) {
      await fail(response);
    }
    return (await response.json()) as FlowsPayload;
  }

  async addMudFile(document: string): Promise<void> {
    const response = await this.fetchImpl(`${this.base}/api/mudfiles`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: document,
    });
    if (!response.ok) {
      await fail(response);
    }
  }

  async deleteMudFile(id: string): Promise<void> {
    const response = await this.fetchImpl(
      `${this.base}/api/mudfiles/${encodeURIComponent(id)}`,
      { method: "DELETE" },
    );
    if (!response.ok) {
      await fail(response);
    }
  }
}
