import { describe, expect, it } from "vitest";

import {
  isAck, isErrorMsg, isTelemetry, parseInbound, validateCommand,
} from "../src/schema.js";
import { telemetryFixture } from "./mock_harness.js";

describe("inbound parsing", () => {
  it("accepts a well-formed telemetry object", () => {
    const t = telemetryFixture(1.0);
    expect(isTelemetry(t)).toBe(true);
    expect(parseInbound(JSON.stringify(t))?.type).toBe("telemetry");
  });

  it("accepts telemetry with a gps block", () => {
    const t = telemetryFixture(2.0, {
      gps: { lat_deg: -6.89, lon_deg: 107.61, alt_m: 820, speed_mps: 18,
             course_deg: 12 },
    });
    expect(isTelemetry(t)).toBe(true);
  });

  it("rejects telemetry with missing or non-finite fields", () => {
    const t = telemetryFixture(1.0) as unknown as Record<string, unknown>;
    delete (t.truth as Record<string, unknown>).down_m;
    expect(isTelemetry(t)).toBe(false);
    const t2 = telemetryFixture(1.0) as unknown as { time_s: unknown };
    t2.time_s = "soon";
    expect(isTelemetry(t2)).toBe(false);
  });

  it("rejects garbage without throwing", () => {
    expect(parseInbound("}{ not json")).toBeNull();
    expect(parseInbound('{"type":"wat"}')).toBeNull();
    expect(parseInbound('42')).toBeNull();
  });

  it("recognizes acks and errors", () => {
    expect(isAck({ type: "ack", command: "pause", applied: {} })).toBe(true);
    expect(isAck({ type: "ack", command: "pause" })).toBe(false);
    expect(isErrorMsg({ type: "error", command: null, reason: "nope" }))
      .toBe(true);
  });
});

describe("outbound command validation", () => {
  it("passes a good set_gains", () => {
    expect(validateCommand({ type: "set_gains", loop: "ROLL", kp: 350,
                             ki: 40, kd: 25, integrator_limit: 150 }))
      .toBeNull();
  });

  it("rejects non-finite gains and negative limits", () => {
    expect(validateCommand({ type: "set_gains", loop: "ROLL", kp: NaN,
                             ki: 0, kd: 0, integrator_limit: 1 }))
      .toMatch(/finite/);
    expect(validateCommand({ type: "set_gains", loop: "ROLL", kp: 1,
                             ki: 0, kd: 0, integrator_limit: -2 }))
      .toMatch(/integrator_limit/);
  });

  it("validates mission waypoints", () => {
    expect(validateCommand({ type: "upload_mission", waypoints: [] }))
      .toMatch(/at least one/);
    expect(validateCommand({
      type: "upload_mission",
      waypoints: [{ lat_deg: -6.88, lon_deg: 107.61, alt_m: 820,
                    kind: "FLYOVER" }],
    })).toBeNull();
    expect(validateCommand({
      type: "upload_mission",
      waypoints: [{ lat_deg: -6.88, lon_deg: 107.61, alt_m: 820,
                    kind: "LOITER" }],   // loiter needs a radius
    })).toMatch(/waypoint 0/);
    expect(validateCommand({
      type: "upload_mission",
      waypoints: [{ lat_deg: -6.88, lon_deg: 107.61, alt_m: 820,
                    kind: "LOITER", loiter_radius_m: 65 }],
    })).toBeNull();
  });

  it("validates fault kinds and time scale", () => {
    expect(validateCommand({ type: "inject_fault", kind: "GPS_DROPOUT",
                             duration_s: 3 })).toBeNull();
    expect(validateCommand({
      type: "inject_fault",
      kind: "EARTHQUAKE" as unknown as "GPS_DROPOUT",
    })).toMatch(/unknown fault/);
    expect(validateCommand({ type: "set_time_scale", value: -1 }))
      .toMatch(/>= 0/);
    expect(validateCommand({ type: "pause" })).toBeNull();
  });
});
