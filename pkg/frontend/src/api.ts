/** Minimal client for the screening session API. */

import type { ApiMessage, MessagesOut, SessionCreated } from "./types.js";

export type FetchLike = (
  input: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

const STATUS_MESSAGES: Record<number, string> = {
  404: "Unknown session — it may have expired.",
  409: "This session is complete; start a new one to screen again.",
  503: "The screening model is not configured on the server.",
};

export class ScreeningClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch as unknown as FetchLike,
  ) {}

  private async request(path: string, body?: unknown): Promise<unknown> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      const fallback = `Request failed with status ${response.status}.`;
      throw new ApiError(response.status, STATUS_MESSAGES[response.status] ?? fallback);
    }
    return response.json();
  }

  async createSession(): Promise<SessionCreated> {
    return (await this.request("/sessions")) as SessionCreated;
  }

  async sendMessage(sessionId: string, text: string): Promise<ApiMessage[]> {
    const out = (await this.request(
      `/sessions/${encodeURIComponent(sessionId)}/messages`,
      { text },
    )) as MessagesOut;
    return out.messages;
  }
}
