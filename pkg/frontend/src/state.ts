/** UI state store: session lifecycle, anchors, sweep cache, stale-response discard. */

import { ApiError } from "./api.js";
import type { ServiceClient } from "./api.js";
import type { Candidate, InterpolationSweep } from "./api.js";
import { validateSpan, WINDOW_LEN } from "./spans.js";
import type { Span } from "./spans.js";

export interface Anchor {
  handle: string;
  tokens: string[];
}

interface SweepCache {
  J: number;
  z1: string;
  z2: string;
  sequences: string[][];
}

export const MAX_ANCHORS = 2;
export const SWEEP_J = 8;

export type Listener = () => void;

export class Store {
  private client: ServiceClient;
  private listeners: Listener[] = [];

  /** Bumped on span changes; in-flight responses from older spans are dropped. */
  private generation = 0;

  window: string[];
  span: Span | null = null;
  sessionId: string | null = null;
  anchors: Anchor[] = [];
  candidate: Candidate | null = null;
  sweep: SweepCache | null = null;
  alphaIndex = 0;
  sweepView = false;
  delta = 0.5;
  busy = false;
  error: string | null = null;
  private seedCounter: number;

  constructor(client: ServiceClient, window: string[], firstSeed = 1) {
    if (window.length !== WINDOW_LEN) {
      throw new Error(`window must have ${WINDOW_LEN} tokens, got ${window.length}`);
    }
    this.client = client;
    this.window = window.slice();
    this.seedCounter = firstSeed;
  }

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((f) => f !== fn);
    };
  }

  private notify(): void {
    for (const fn of this.listeners) {
      fn();
    }
  }

  private nextSeed(): number {
    return this.seedCounter++;
  }

  lastAnchor(): Anchor | null {
    return this.anchors.length > 0 ? this.anchors[this.anchors.length - 1] ?? null : null;
  }

  /** Tokens for the active render: sweep frame, else candidate, else last anchor, else base window. */
  currentTokens(): string[] {
    if (this.sweepView && this.sweep !== null) {
      const seq = this.sweep.sequences[this.alphaIndex];
      if (seq !== undefined) {
        return seq;
      }
    }
    if (this.candidate !== null) {
      return this.candidate.tokens;
    }
    const anchor = this.lastAnchor();
    if (anchor !== null) {
      return anchor.tokens;
    }
    return this.window;
  }

  /** Replace the context window; everything session-scoped is discarded. */
  setWindow(tokens: string[]): boolean {
    if (tokens.length !== WINDOW_LEN) {
      this.error = `window must have ${WINDOW_LEN} tokens, got ${tokens.length}`;
      this.notify();
      return false;
    }
    this.generation += 1;
    this.window = tokens.slice();
    this.span = null;
    this.sessionId = null;
    this.anchors = [];
    this.candidate = null;
    this.sweep = null;
    this.sweepView = false;
    this.alphaIndex = 0;
    this.busy = false;
    this.error = null;
    this.notify();
    return true;
  }

  /**
   * Validate and adopt a new target span. Opens a fresh service session and
   * clears everything derived from the previous one.
   */
  async selectSpan(span: Span): Promise<boolean> {
    const problem = validateSpan(span);
    if (problem !== null) {
      this.error = problem;
      this.notify();
      return false;
    }
    if (this.busy) {
      return false;
    }
    this.generation += 1;
    const gen = this.generation;
    this.busy = true;
    this.error = null;
    this.notify();
    try {
      const info = await this.client.createSession(this.window, span);
      if (gen !== this.generation) {
        return false;
      }
      this.span = info.span;
      this.sessionId = info.session_id;
      this.anchors = [];
      this.candidate = null;
      this.sweep = null;
      this.sweepView = false;
      this.alphaIndex = 0;
      return true;
    } catch (err) {
      if (gen === this.generation) {
        this.error = describe(err);
      }
      return false;
    } finally {
      if (gen === this.generation) {
        this.busy = false;
      }
      this.notify();
    }
  }

  /** Sample a fresh candidate for the current span. */
  async generate(seed?: number): Promise<boolean> {
    if (this.busy || this.sessionId === null) {
      return false;
    }
    const gen = this.generation;
    this.busy = true;
    this.error = null;
    this.notify();
    try {
      const cand = await this.client.generate(this.sessionId, seed ?? this.nextSeed());
      if (gen !== this.generation) {
        return false;
      }
      this.candidate = cand;
      this.sweepView = false;
      return true;
    } catch (err) {
      if (gen === this.generation) {
        this.error = describe(err);
      }
      return false;
    } finally {
      if (gen === this.generation) {
        this.busy = false;
      }
      this.notify();
    }
  }

  /** Pin the current candidate as an anchor (up to two; a third replaces the last). */
  pinCandidate(): boolean {
    if (this.candidate === null) {
      return false;
    }
    const anchor: Anchor = { handle: this.candidate.z_handle, tokens: this.candidate.tokens };
    if (this.anchors.length < MAX_ANCHORS) {
      this.anchors.push(anchor);
    } else {
      this.anchors[this.anchors.length - 1] = anchor;
    }
    this.candidate = null;
    this.sweep = null;
    this.sweepView = false;
    this.notify();
    return true;
  }

  /**
   * Ensure the interpolation sweep between the two anchors is cached.
   *
   * Fetches at most once per anchor pair; moving the slider afterwards is
   * purely local.
   */
  async ensureSweep(): Promise<boolean> {
    if (this.anchors.length !== MAX_ANCHORS || this.sessionId === null) {
      return false;
    }
    const [a, b] = this.anchors;
    if (a === undefined || b === undefined) {
      return false;
    }
    if (this.sweep !== null && this.sweep.z1 === a.handle && this.sweep.z2 === b.handle) {
      this.sweepView = true;
      this.notify();
      return true;
    }
    if (this.busy) {
      return false;
    }
    const gen = this.generation;
    this.busy = true;
    this.error = null;
    this.notify();
    try {
      const result: InterpolationSweep = await this.client.interpolate(
        this.sessionId,
        a.handle,
        b.handle,
        SWEEP_J,
      );
      if (gen !== this.generation) {
        return false;
      }
      this.sweep = { J: result.J, z1: a.handle, z2: b.handle, sequences: result.sequences };
      this.alphaIndex = 0;
      this.sweepView = true;
      return true;
    } catch (err) {
      if (gen === this.generation) {
        this.error = describe(err);
      }
      return false;
    } finally {
      if (gen === this.generation) {
        this.busy = false;
      }
      this.notify();
    }
  }

  /** Move the sweep slider; no network traffic. */
  setAlpha(index: number): void {
    if (this.sweep === null) {
      return;
    }
    const clamped = Math.min(Math.max(0, Math.round(index)), this.sweep.J);
    this.alphaIndex = clamped;
    this.sweepView = true;
    this.notify();
  }

  setDelta(delta: number): void {
    this.delta = Math.max(0, delta);
    this.notify();
  }

  /** Resample around the last anchor at the current spread. */
  async vary(seed?: number): Promise<boolean> {
    const anchor = this.lastAnchor();
    if (this.busy || this.sessionId === null || anchor === null) {
      return false;
    }
    const gen = this.generation;
    this.busy = true;
    this.error = null;
    this.notify();
    try {
      const cand = await this.client.vary(
        this.sessionId,
        anchor.handle,
        this.delta,
        seed ?? this.nextSeed(),
      );
      if (gen !== this.generation) {
        return false;
      }
      this.candidate = cand;
      this.sweepView = false;
      return true;
    } catch (err) {
      if (gen === this.generation) {
        this.error = describe(err);
      }
      return false;
    } finally {
      if (gen === this.generation) {
        this.busy = false;
      }
      this.notify();
    }
  }

  /** Promote the current candidate to replace the last anchor. */
  keepCandidate(): boolean {
    if (this.candidate === null || this.anchors.length === 0) {
      return false;
    }
    this.anchors[this.anchors.length - 1] = {
      handle: this.candidate.z_handle,
      tokens: this.candidate.tokens,
    };
    this.candidate = null;
    this.sweep = null;
    this.sweepView = false;
    this.notify();
    return true;
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return err.status > 0 ? `service error ${err.status}: ${err.message}` : err.message;
  }
  return String(err);
}
