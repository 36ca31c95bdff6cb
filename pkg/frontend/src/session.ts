/**
 * Typed client for the session service. Fetch is injectable so tests can
 * run without a network. Submissions retry with exponential backoff; a
 * duplicate acknowledgment counts as success (the server is idempotent).
 */

import { NextResponse, VoteAck, VotePayload } from "./protocol.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class SessionClient {
  constructor(
    private readonly baseUrl: string,
    private readonly sessionId: string,
    private readonly fetchImpl: FetchLike = fetch.bind(globalThis),
    private readonly retries = 3,
    private readonly backoffMs = 500,
  ) {}

  async nextTrial(): Promise<NextResponse> {
    const res = await this.fetchImpl(
      `${this.baseUrl}/session/${this.sessionId}/next`);
    if (!res.ok) {
      throw new Error(`next trial failed: HTTP ${res.status}`);
    }
    return (await res.json()) as NextResponse;
  }

  async fetchAsset(path: string): Promise<ArrayBuffer> {
    const res = await this.fetchImpl(`${this.baseUrl}${path}`);
    if (!res.ok) {
      throw new Error(`asset ${path} failed: HTTP ${res.status}`);
    }
    return res.arrayBuffer();
  }

  async submitVote(payload: VotePayload): Promise<VoteAck> {
    let lastError: unknown = null;
    for (let attempt = 0; attempt <= this.retries; attempt++) {
      try {
        const res = await this.fetchImpl(
          `${this.baseUrl}/session/${this.sessionId}/vote`,
          {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(payload),
          });
        if (res.ok) {
          return (await res.json()) as VoteAck;
        }
        if (res.status >= 400 && res.status < 500) {
          throw new Error(`vote rejected: HTTP ${res.status}`);
        }
        lastError = new Error(`vote failed: HTTP ${res.status}`);
      } catch (err) {
        if (err instanceof Error && err.message.startsWith("vote rejected")) {
          throw err;
        }
        lastError = err;
      }
      await delay(this.backoffMs * Math.pow(2, attempt));
    }
    throw lastError instanceof Error ? lastError : new Error(String(lastError));
  }
}

function delay(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
