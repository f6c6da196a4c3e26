// Typed access to the session-service HTTP API.  Every request is appended
// to `requestLog` before it is dispatched, so callers (and tests) can audit
// exactly what the UI sent and when.

import type {
  ArtifactsPayload,
  ReplayDoc,
  SessionDetail,
  SessionSummary,
  SpecDoc,
  TurnPayload,
} from "./types.js";

export interface RequestLogEntry {
  method: string;
  path: string;
  status?: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly error: string,
    readonly detail: string,
    readonly attempts?: number,
    readonly lastCompletion?: string,
  ) {
    super(`${error}: ${detail}`);
  }

  get isBusy(): boolean {
    return this.status === 409;
  }
}

export interface ApiResponse<T> {
  value: T;
  /** Raw body text, for lexeme-faithful checksum verification. */
  raw: string;
}

/** The slice of fetch/Response the client needs; tests provide fakes. */
export interface MinimalResponse {
  ok: boolean;
  status: number;
  text(): Promise<string>;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<MinimalResponse>;

export class ApiClient {
  readonly requestLog: RequestLogEntry[] = [];

  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<ApiResponse<T>> {
    const entry: RequestLogEntry = { method, path };
    this.requestLog.push(entry);
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    entry.status = response.status;
    const raw = await response.text();
    if (!response.ok) {
      let parsed: Record<string, unknown> = {};
      try {
        parsed = JSON.parse(raw) as Record<string, unknown>;
      } catch {
        // non-JSON error body; fall through with what we have
      }
      throw new ApiError(
        response.status,
        String(parsed.error ?? `http-${response.status}`),
        String(parsed.detail ?? raw),
        typeof parsed.attempts === "number" ? parsed.attempts : undefined,
        typeof parsed.last_completion === "string" ? parsed.last_completion : undefined,
      );
    }
    return { value: JSON.parse(raw) as T, raw };
  }

  createSession(embodiment: string, scene?: string, seed = 0) {
    return this.request<SessionSummary>("POST", "/sessions", { embodiment, scene, seed });
  }

  listSessions() {
    return this.request<SessionSummary[]>("GET", "/sessions");
  }

  getSession(id: string) {
    return this.request<SessionDetail>("GET", `/sessions/${id}`);
  }

  instruct(id: string, text: string) {
    return this.request<TurnPayload>("POST", `/sessions/${id}/instructions`, { text });
  }

  translateOnly(id: string, text: string) {
    return this.request<ArtifactsPayload>("POST", `/sessions/${id}/translations`, { text });
  }

  executePending(id: string) {
    return this.request<TurnPayload>("POST", `/sessions/${id}/executions`);
  }

  reset(id: string) {
    return this.request<SessionSummary>("POST", `/sessions/${id}/reset`);
  }

  getSpec(id: string) {
    return this.request<{ checksum: string; spec: SpecDoc }>("GET", `/sessions/${id}/spec`);
  }

  getReplay(id: string, turnIndex: number) {
    return this.request<ReplayDoc>("GET", `/sessions/${id}/replay/${turnIndex}`);
  }

  /** ws:// or wss:// address of the session's event stream. */
  streamUrl(id: string): string {
    return this.baseUrl.replace(/^http/, "ws") + `/sessions/${id}/stream`;
  }
}
