import type { HopFramePayload } from "./types";

// Plays hypothetical-outcome frames on a fixed cadence derived from the
// server's frame_rate. Scheduling compensates for timer drift: frame k
// is aimed at start + k * interval rather than "last tick + interval",
// so late wakeups do not accumulate.
export class HopPlayer {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private frameIndex = 0;
  private lastFrameAt: number | null = null;
  readonly intervals: number[] = [];

  constructor(
    private readonly frames: HopFramePayload[],
    frameRate: number,
    private readonly onFrame: (frame: HopFramePayload, index: number) => void,
  ) {
    if (frameRate <= 0 || frames.length === 0) {
      throw new Error("need frames and a positive frame rate");
    }
    this.intervalMs = 1000 / frameRate;
  }

  readonly intervalMs: number;

  get playing(): boolean {
    return this.timer !== null;
  }

  start(): void {
    if (this.timer !== null) {
      return;
    }
    const t0 = performance.now();
    const tick = () => {
      const now = performance.now();
      if (this.lastFrameAt !== null) {
        this.intervals.push(now - this.lastFrameAt);
      }
      this.lastFrameAt = now;
      const i = this.frameIndex;
      this.frameIndex += 1;
      this.onFrame(this.frames[i % this.frames.length], i);
      if (this.timer === null) {
        return; // stopped from inside onFrame
      }
      const target = t0 + this.frameIndex * this.intervalMs;
      this.timer = setTimeout(tick, Math.max(0, target - performance.now()));
    };
    this.timer = setTimeout(tick, 0);
  }

  stop(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.lastFrameAt = null;
  }
}
