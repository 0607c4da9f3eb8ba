/** Minimal WebAudio playback for token windows: 120 BPM, one oscillator per note. */

import { tokensToNotes } from "./roll.js";

export const STEP_SECONDS = 0.125;

function midiToHz(pitch: number): number {
  return 440 * Math.pow(2, (pitch - 69) / 12);
}

export class Player {
  private ctx: AudioContext | null = null;
  private scheduled: OscillatorNode[] = [];

  available(): boolean {
    return typeof globalThis.AudioContext === "function";
  }

  private context(): AudioContext | null {
    if (!this.available()) {
      return null;
    }
    if (this.ctx === null) {
      this.ctx = new AudioContext();
    }
    return this.ctx;
  }

  stop(): void {
    for (const osc of this.scheduled) {
      try {
        osc.stop();
      } catch {
        // Already stopped.
      }
    }
    this.scheduled = [];
  }

  play(tokens: string[]): void {
    const ctx = this.context();
    if (ctx === null) {
      return;
    }
    this.stop();
    void ctx.resume();
    const t0 = ctx.currentTime + 0.05;
    for (const note of tokensToNotes(tokens)) {
      const osc = ctx.createOscillator();
      const gain = ctx.createGain();
      osc.type = "triangle";
      osc.frequency.value = midiToHz(note.pitch);
      const start = t0 + note.start * STEP_SECONDS;
      const stop = start + note.dur * STEP_SECONDS;
      gain.gain.setValueAtTime(0.0, start);
      gain.gain.linearRampToValueAtTime(0.25, start + 0.01);
      gain.gain.setValueAtTime(0.25, stop - 0.02);
      gain.gain.linearRampToValueAtTime(0.0, stop);
      osc.connect(gain).connect(ctx.destination);
      osc.start(start);
      osc.stop(stop);
      this.scheduled.push(osc);
    }
  }
}
