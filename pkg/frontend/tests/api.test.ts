import { describe, expect, it } from "vitest";

import { ApiError, Client } from "../src/api.js";
import type { FetchFn } from "../src/api.js";

interface Recorded {
  url: string;
  method: string;
  body: unknown;
}

function stubFetch(
  status: number,
  payload: unknown,
  log: Recorded[] = [],
): FetchFn {
  return async (input, init) => {
    log.push({
      url: String(input),
      method: init?.method ?? "GET",
      body: typeof init?.body === "string" ? JSON.parse(init.body) : undefined,
    });
    return new Response(JSON.stringify(payload), {
      status,
      headers: { "content-type": "application/json" },
    });
  };
}

describe("Client", () => {
  it("fetches health from the base URL", async () => {
    const log: Recorded[] = [];
    const client = new Client(
      "http://svc:9999/",
      stubFetch(200, { status: "ok", model_version: 1, d_z: 16 }, log),
    );
    const health = await client.health();
    expect(health.d_z).toBe(16);
    expect(log[0]).toMatchObject({ url: "http://svc:9999/health", method: "GET" });
  });

  it("posts the window, span, and seed when opening a session", async () => {
    const log: Recorded[] = [];
    const window = new Array(128).fill("R");
    const client = new Client(
      "http://svc",
      stubFetch(200, { session_id: "a".repeat(16), span: { start: 32, length: 32 } }, log),
    );
    const info = await client.createSession(window, { start: 32, length: 32 });
    expect(info.session_id).toHaveLength(16);
    expect(log[0]?.url).toBe("http://svc/session");
    expect(log[0]?.body).toEqual({ window, span: { start: 32, length: 32 }, seed: 0 });
  });

  it("posts generate, interpolate, and vary payloads", async () => {
    const log: Recorded[] = [];
    const client = new Client(
      "http://svc",
      stubFetch(200, { z_handle: "h", target: [], tokens: [], sequences: [], J: 8 }, log),
    );
    await client.generate("sid", 7);
    await client.interpolate("sid", "h1", "h2", 8);
    await client.vary("sid", "h1", 0.5, 3);
    expect(log.map((r) => r.url)).toEqual([
      "http://svc/generate",
      "http://svc/interpolate",
      "http://svc/vary",
    ]);
    expect(log[0]?.body).toEqual({ session_id: "sid", seed: 7 });
    expect(log[1]?.body).toEqual({ session_id: "sid", z1: "h1", z2: "h2", J: 8 });
    expect(log[2]?.body).toEqual({ session_id: "sid", z: "h1", delta: 0.5, seed: 3 });
  });

  it("maps error bodies with a string detail", async () => {
    const client = new Client("http://svc", stubFetch(404, { detail: "unknown session" }));
    const err = await client.generate("sid", 1).catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(404);
    expect((err as ApiError).message).toBe("unknown session");
  });

  it("flattens validation-style detail lists", async () => {
    const detail = [
      { loc: ["body", "seed"], msg: "field required", type: "missing" },
      { loc: ["body", "J"], msg: "too small", type: "range" },
    ];
    const client = new Client("http://svc", stubFetch(400, { detail }));
    const err = await client.interpolate("sid", "a", "b", 0).catch((e: unknown) => e);
    expect((err as ApiError).status).toBe(400);
    expect((err as ApiError).message).toBe("body.seed: field required; body.J: too small");
  });

  it("handles non-JSON error bodies", async () => {
    const fetchFn: FetchFn = async () =>
      new Response("boom", { status: 500, statusText: "Internal Server Error" });
    const client = new Client("http://svc", fetchFn);
    const err = await client.health().catch((e: unknown) => e);
    expect((err as ApiError).status).toBe(500);
  });

  it("reports unreachable services as status 0", async () => {
    const fetchFn: FetchFn = async () => {
      throw new TypeError("fetch failed");
    };
    const client = new Client("http://svc", fetchFn);
    const err = await client.health().catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(0);
    expect((err as ApiError).message).toMatch(/unreachable/);
  });
});
