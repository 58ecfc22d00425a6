import { describe, expect, it } from "vitest";

import { HopPlayer } from "../src/hop";
import type { HopFramePayload } from "../src/types";

import whatif from "./fixtures/whatif.json";

const FRAME_RATE = 2.5; // server value carried in every payload
const TARGET_MS = 1000 / FRAME_RATE;

describe("HopPlayer cadence", () => {
  it("measures 50 inter-frame intervals of 400ms within 10%", async () => {
    const frames = whatif.subgroups[0].hop.frames as HopFramePayload[];
    expect(whatif.frame_rate).toBe(FRAME_RATE);

    let fired = 0;
    let player!: HopPlayer;
    await new Promise<void>((resolve) => {
      player = new HopPlayer(frames, FRAME_RATE, () => {
        fired += 1;
        if (fired === 51) {
          player.stop();
          resolve();
        }
      });
      player.start();
    });

    expect(player.intervalMs).toBe(TARGET_MS);
    const intervals = player.intervals;
    expect(intervals.length).toBe(50);

    const mean = intervals.reduce((a, b) => a + b, 0) / intervals.length;
    expect(mean).toBeGreaterThanOrEqual(TARGET_MS * 0.9);
    expect(mean).toBeLessThanOrEqual(TARGET_MS * 1.1);

    // drift compensation keeps individual ticks honest too; tolerate a
    // few scheduler hiccups out of 50
    const inBand = intervals.filter(
      (d) => d >= TARGET_MS * 0.9 && d <= TARGET_MS * 1.1,
    );
    expect(inBand.length).toBeGreaterThanOrEqual(45);
  }, 30_000);

  it("cycles frames and supports pause/resume", async () => {
    const frames = whatif.subgroups[0].hop.frames as HopFramePayload[];
    const indices: number[] = [];
    let player!: HopPlayer;
    await new Promise<void>((resolve) => {
      player = new HopPlayer(frames.slice(0, 3), 50, (frame, i) => {
        expect(frame).toBe(frames[i % 3]);
        indices.push(i);
        if (indices.length === 7) {
          player.stop();
          resolve();
        }
      });
      player.start();
    });
    expect(indices).toEqual([0, 1, 2, 3, 4, 5, 6]);
    expect(player.playing).toBe(false);

    player.start();
    expect(player.playing).toBe(true);
    await new Promise((r) => setTimeout(r, 50));
    player.stop();
    expect(indices.length).toBeGreaterThan(7);
  });

  it("rejects empty frame lists and bad rates", () => {
    expect(() => new HopPlayer([], 2.5, () => {})).toThrow();
    expect(
      () => new HopPlayer([{ count: 1, proportion: 0.1 }], 0, () => {}),
    ).toThrow();
  });
});
