/** SVG piano roll for 128-step monophonic token windows. */

import { BAR, WINDOW_LEN, spanStop } from "./spans.js";
import type { Span } from "./spans.js";

export const PITCH_MIN = 55;
export const PITCH_MAX = 84;

export interface Note {
  pitch: number;
  start: number;
  dur: number;
}

/**
 * Collapse tokens into notes. A pitch token opens a note, "__" extends the
 * open note (or rest), "R" closes it. Unknown tokens are treated as rests.
 */
export function tokensToNotes(tokens: string[]): Note[] {
  const notes: Note[] = [];
  let open: Note | null = null;
  tokens.forEach((tok, i) => {
    if (tok === "__") {
      if (open !== null) {
        open.dur += 1;
      }
      return;
    }
    if (open !== null) {
      notes.push(open);
      open = null;
    }
    const pitch = Number(tok);
    if (Number.isInteger(pitch) && pitch >= PITCH_MIN && pitch <= PITCH_MAX) {
      open = { pitch, start: i, dur: 1 };
    }
  });
  if (open !== null) {
    notes.push(open);
  }
  return notes;
}

const SVG_NS = "http://www.w3.org/2000/svg";

export interface RollOptions {
  stepWidth?: number;
  rowHeight?: number;
}

/** Build an SVG element showing the window, with the target span highlighted. */
export function renderRoll(
  doc: Document,
  tokens: string[],
  span: Span | null,
  opts: RollOptions = {},
): SVGSVGElement {
  const sw = opts.stepWidth ?? 9;
  const rh = opts.rowHeight ?? 10;
  const nRows = PITCH_MAX - PITCH_MIN + 1;
  const width = WINDOW_LEN * sw;
  const height = nRows * rh;

  const svg = doc.createElementNS(SVG_NS, "svg") as SVGSVGElement;
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "roll");
  svg.setAttribute("preserveAspectRatio", "none");

  const rect = (x: number, y: number, w: number, h: number, cls: string) => {
    const r = doc.createElementNS(SVG_NS, "rect");
    r.setAttribute("x", String(x));
    r.setAttribute("y", String(y));
    r.setAttribute("width", String(w));
    r.setAttribute("height", String(h));
    r.setAttribute("class", cls);
    svg.appendChild(r);
    return r;
  };

  rect(0, 0, width, height, "roll-bg");
  if (span !== null) {
    rect(span.start * sw, 0, span.length * sw, height, "roll-target");
  }

  // Row stripes on alternating pitches, bar lines every BAR steps.
  for (let row = 0; row < nRows; row += 2) {
    rect(0, row * rh, width, rh, "roll-stripe");
  }
  for (let step = BAR; step < WINDOW_LEN; step += BAR) {
    const line = doc.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(step * sw));
    line.setAttribute("x2", String(step * sw));
    line.setAttribute("y1", "0");
    line.setAttribute("y2", String(height));
    line.setAttribute("class", "roll-barline");
    svg.appendChild(line);
  }

  const stop = span !== null ? spanStop(span) : -1;
  for (const note of tokensToNotes(tokens)) {
    const row = PITCH_MAX - note.pitch;
    const inTarget = span !== null && note.start >= span.start && note.start < stop;
    rect(
      note.start * sw,
      row * rh + 1,
      note.dur * sw - 1,
      rh - 2,
      inTarget ? "roll-note roll-note-target" : "roll-note",
    );
  }
  return svg;
}
