import { describe, expect, it } from "vitest";

import { RingBuffer } from "../src/ringbuffer.js";

const tick = (time_s: number) => ({ time_s });

describe("telemetry ring buffer", () => {
  it("holds exactly its capacity under sustained input", () => {
    const ring = new RingBuffer<{ time_s: number }>(1200);
    // 60 s of 20 Hz telemetry = exactly 1200 ticks
    for (let k = 0; k < 1200; k++) ring.push(tick(k * 0.05));
    expect(ring.length).toBe(1200);
    // keep going: the bound must hold
    for (let k = 1200; k < 5000; k++) ring.push(tick(k * 0.05));
    expect(ring.length).toBe(1200);
    const arr = ring.toArray();
    expect(arr.length).toBe(1200);
    expect(arr[arr.length - 1].time_s).toBeCloseTo(4999 * 0.05);
    expect(arr[0].time_s).toBeCloseTo((5000 - 1200) * 0.05);
  });

  it("keeps timestamps monotone within the buffer", () => {
    const ring = new RingBuffer<{ time_s: number }>(100);
    for (let k = 0; k < 250; k++) ring.push(tick(k * 0.05));
    const times = ring.toArray().map((t) => t.time_s);
    for (let i = 1; i < times.length; i++) {
      expect(times[i]).toBeGreaterThan(times[i - 1]);
    }
  });

  it("resyncs on a time jump backwards (harness restart)", () => {
    const ring = new RingBuffer<{ time_s: number }>(100);
    for (let k = 0; k < 50; k++) ring.push(tick(10 + k * 0.05));
    ring.push(tick(0.0));  // new run started
    expect(ring.length).toBe(1);
    expect(ring.last()?.time_s).toBe(0.0);
  });

  it("decimation never drops the most recent tick", () => {
    const ring = new RingBuffer<{ time_s: number }>(1200);
    for (let k = 0; k < 1200; k++) ring.push(tick(k));
    for (const maxPoints of [7, 100, 299, 1199, 1200, 5000]) {
      const out = ring.decimate(maxPoints);
      expect(out[out.length - 1].time_s).toBe(1199);
      expect(out.length).toBeLessThanOrEqual(Math.max(maxPoints + 1, 1200));
    }
  });

  it("rejects a non-positive capacity", () => {
    expect(() => new RingBuffer(0)).toThrow();
  });
});
