/** Token vocabulary helpers and a built-in demo window. */

import { WINDOW_LEN } from "./spans.js";
import { PITCH_MAX, PITCH_MIN } from "./roll.js";

/** True for tokens the service accepts in a context window. */
export function isDataToken(tok: string): boolean {
  if (tok === "R" || tok === "__") {
    return true;
  }
  if (!/^\d+$/.test(tok)) {
    return false;
  }
  const pitch = Number(tok);
  return pitch >= PITCH_MIN && pitch <= PITCH_MAX;
}

export function validateWindowTokens(tokens: string[]): string | null {
  if (tokens.length !== WINDOW_LEN) {
    return `window must have ${WINDOW_LEN} tokens, got ${tokens.length}`;
  }
  for (let i = 0; i < tokens.length; i++) {
    const tok = tokens[i];
    if (tok === undefined || !isDataToken(tok)) {
      return `token ${i} is not valid: "${tok}"`;
    }
  }
  return null;
}

export function parseWindowText(text: string): string[] {
  return text.split(/\s+/).filter((t) => t.length > 0);
}

/** Eight bars of melody for first-run exploration: held quarter and half notes. */
export function demoWindow(): string[] {
  const bars: number[][] = [
    [60, 62, 64, 65],
    [67, 65, 64, 62],
    [60, 64, 67, 72],
    [71, 67, 64, 60],
    [62, 65, 69, 65],
    [64, 67, 71, 67],
    [72, 71, 69, 67],
    [65, 64, 62, 60],
  ];
  const tokens: string[] = [];
  for (const bar of bars) {
    for (const pitch of bar) {
      tokens.push(String(pitch), "__", "__", "__");
    }
  }
  if (tokens.length !== WINDOW_LEN) {
    throw new Error("demo window has the wrong length");
  }
  return tokens;
}
