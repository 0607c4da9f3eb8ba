/** Window geometry shared with the generation service. */

export const WINDOW_LEN = 128;
export const BAR = 16;
export const N_BARS = WINDOW_LEN / BAR;
export const SPAN_LENGTHS = [16, 32, 48, 64] as const;

export interface Span {
  start: number;
  length: number;
}

export function spanStop(span: Span): number {
  return span.start + span.length;
}

/** Convert a bar selection (0-based first bar, bar count) to token units. */
export function spanFromBars(firstBar: number, nBars: number): Span {
  return { start: firstBar * BAR, length: nBars * BAR };
}

/**
 * Validate a span against the service's canonical rules.
 *
 * Returns an error message, or null when the span is acceptable.
 */
export function validateSpan(span: Span): string | null {
  if (!Number.isInteger(span.start) || !Number.isInteger(span.length)) {
    return "span start and length must be integers";
  }
  if (!SPAN_LENGTHS.includes(span.length as (typeof SPAN_LENGTHS)[number])) {
    return `span length must be one of ${SPAN_LENGTHS.join(", ")} tokens`;
  }
  if (span.start < 0 || span.start % BAR !== 0) {
    return `span must start on a bar boundary (multiple of ${BAR})`;
  }
  if (spanStop(span) > WINDOW_LEN) {
    return `span must end by token ${WINDOW_LEN}`;
  }
  return null;
}

/** Validate a bar-unit selection, reporting in bar units. */
export function validateBarSelection(firstBar: number, nBars: number): string | null {
  if (!Number.isInteger(firstBar) || !Number.isInteger(nBars)) {
    return "bar numbers must be integers";
  }
  if (firstBar < 0 || firstBar >= N_BARS) {
    return `first bar must be between 0 and ${N_BARS - 1}`;
  }
  if (nBars < 1 || nBars > 4) {
    return "selection must cover 1 to 4 bars";
  }
  if (firstBar + nBars > N_BARS) {
    return `selection runs past bar ${N_BARS - 1}`;
  }
  return validateSpan(spanFromBars(firstBar, nBars));
}
