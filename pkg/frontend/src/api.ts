/** Typed client for the generation service's HTTP API. */

import type { Span } from "./spans.js";

export interface HealthInfo {
  status: string;
  model_version: number;
  d_z: number;
}

export interface SessionInfo {
  session_id: string;
  span: Span;
}

export interface Candidate {
  z_handle: string;
  target: string[];
  tokens: string[];
}

export interface InterpolationSweep {
  sequences: string[][];
  J: number;
}

export class ApiError extends Error {
  status: number;

  constructor(status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
    this.status = status;
  }
}

export type FetchFn = typeof globalThis.fetch;

/** What the store needs from a client; lets tests substitute a fake. */
export interface ServiceClient {
  health(): Promise<HealthInfo>;
  createSession(window: string[], span: Span, seed?: number): Promise<SessionInfo>;
  generate(sessionId: string, seed: number): Promise<Candidate>;
  interpolate(sessionId: string, z1: string, z2: string, J: number): Promise<InterpolationSweep>;
  vary(sessionId: string, z: string, delta: number, seed: number): Promise<Candidate>;
}

export class Client implements ServiceClient {
  private baseUrl: string;
  private fetchFn: FetchFn;

  constructor(baseUrl: string, fetchFn?: FetchFn) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchFn = fetchFn ?? globalThis.fetch.bind(globalThis);
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    let resp: Response;
    try {
      resp = await this.fetchFn(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError(0, `service unreachable: ${String(err)}`);
    }
    let payload: unknown = null;
    const text = await resp.text();
    if (text.length > 0) {
      try {
        payload = JSON.parse(text);
      } catch {
        payload = text;
      }
    }
    if (!resp.ok) {
      const detail =
        payload !== null && typeof payload === "object" && "detail" in payload
          ? stringifyDetail((payload as { detail: unknown }).detail)
          : resp.statusText || `request failed with status ${resp.status}`;
      throw new ApiError(resp.status, detail);
    }
    return payload as T;
  }

  health(): Promise<HealthInfo> {
    return this.request<HealthInfo>("GET", "/health");
  }

  createSession(window: string[], span: Span, seed = 0): Promise<SessionInfo> {
    return this.request<SessionInfo>("POST", "/session", { window, span, seed });
  }

  generate(sessionId: string, seed: number): Promise<Candidate> {
    return this.request<Candidate>("POST", "/generate", { session_id: sessionId, seed });
  }

  interpolate(sessionId: string, z1: string, z2: string, J: number): Promise<InterpolationSweep> {
    return this.request<InterpolationSweep>("POST", "/interpolate", {
      session_id: sessionId,
      z1,
      z2,
      J,
    });
  }

  vary(sessionId: string, z: string, delta: number, seed: number): Promise<Candidate> {
    return this.request<Candidate>("POST", "/vary", { session_id: sessionId, z, delta, seed });
  }
}

function stringifyDetail(detail: unknown): string {
  if (typeof detail === "string") {
    return detail;
  }
  // Validation errors arrive as a list of {loc, msg, type} records.
  if (Array.isArray(detail)) {
    const parts = detail.map((item) => {
      if (item !== null && typeof item === "object" && "msg" in item) {
        const loc = "loc" in item && Array.isArray(item.loc) ? item.loc.join(".") : "";
        const msg = String((item as { msg: unknown }).msg);
        return loc ? `${loc}: ${msg}` : msg;
      }
      return JSON.stringify(item);
    });
    return parts.join("; ");
  }
  return JSON.stringify(detail);
}
