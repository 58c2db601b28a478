import { describe, expect, it, vi } from "vitest";

import { CommandOutcome, GcsClient, LinkState } from "../src/client.js";
import { Telemetry } from "../src/schema.js";
import { Store } from "../src/store.js";
import { FakeSocket, MockHarness, telemetryFixture } from "./mock_harness.js";

function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

function makeClient(harness: MockHarness, reconnectMs = 5) {
  const telemetry: Telemetry[] = [];
  const outcomes: CommandOutcome[] = [];
  const links: LinkState[] = [];
  const errors: string[] = [];
  const client = new GcsClient({
    onTelemetry: (t) => telemetry.push(t),
    onOutcome: (o) => outcomes.push(o),
    onLinkState: (s) => links.push(s),
    onServerError: (r) => errors.push(r),
  }, () => harness.connect(), reconnectMs);
  return { client, telemetry, outcomes, links, errors };
}

describe("command round trip against the mock harness", () => {
  it("set_gains, upload_mission, inject_fault each acknowledged", async () => {
    const harness = new MockHarness();
    const { client, outcomes } = makeClient(harness);
    client.connect("ws://mock");
    await flush();
    expect(client.linkState).toBe("connected");

    client.send({ type: "set_gains", loop: "ROLL", kp: 300, ki: 30, kd: 20,
                  integrator_limit: 120 });
    client.send({ type: "upload_mission", crosstrack: true, waypoints: [
      { lat_deg: -6.88, lon_deg: 107.61, alt_m: 820, kind: "FLYOVER" },
      { lat_deg: -6.87, lon_deg: 107.62, alt_m: 840, kind: "LOITER",
        loiter_radius_m: 65, loiter_duration_s: 25 },
    ] });
    client.send({ type: "inject_fault", kind: "POWER_BROWNOUT",
                  reset_delay_s: 2 });
    await flush();

    const acked = outcomes.filter((o) => o.state === "acknowledged");
    expect(acked.map((o) => o.command.type)).toEqual(
      ["set_gains", "upload_mission", "inject_fault"]);
    // the ack echoes the applied values
    const gains = acked[0];
    expect(gains.detail).toMatchObject({ loop: "ROLL", kp: 300 });
    // every command reached the harness in schema form
    expect(harness.received.map((c) => c.type)).toEqual(
      ["set_gains", "upload_mission", "inject_fault"]);
  });

  it("mission upload is all-or-nothing against the echoed count", async () => {
    const harness = new MockHarness();
    harness.misreportMissionCount = 1;
    const { client, outcomes } = makeClient(harness);
    client.connect("ws://mock");
    await flush();
    client.send({ type: "upload_mission", waypoints: [
      { lat_deg: -6.88, lon_deg: 107.61, alt_m: 820, kind: "FLYOVER" },
      { lat_deg: -6.87, lon_deg: 107.62, alt_m: 840, kind: "FLYOVER" },
    ] });
    await flush();
    const last = outcomes[outcomes.length - 1];
    expect(last.state).toBe("rejected");
    expect(last.reason).toMatch(/1 of 2/);
  });

  it("locally invalid commands never reach the wire", async () => {
    const harness = new MockHarness();
    const { client, outcomes } = makeClient(harness);
    client.connect("ws://mock");
    await flush();
    const state = client.send({ type: "set_gains", loop: "ROLL", kp: NaN,
                                ki: 0, kd: 0, integrator_limit: 1 });
    expect(state).toBe("rejected");
    expect(harness.received.length).toBe(0);
    expect(outcomes[0].state).toBe("rejected");
  });

  it("harness rejections surface with the reason string", async () => {
    const harness = new MockHarness();
    harness.accept = false;
    const { client, outcomes, errors } = makeClient(harness);
    client.connect("ws://mock");
    await flush();
    client.send({ type: "pause" });
    await flush();
    expect(outcomes[outcomes.length - 1].state).toBe("rejected");
    expect(outcomes[outcomes.length - 1].reason).toMatch(/rejected/);
    expect(errors.length).toBe(1);
  });
});

describe("telemetry streaming and reconnect", () => {
  it("streams telemetry into the handler", async () => {
    const harness = new MockHarness();
    const { client, telemetry } = makeClient(harness);
    client.connect("ws://mock");
    await flush();
    for (let k = 0; k < 5; k++) harness.broadcast(telemetryFixture(k * 0.05));
    expect(telemetry.length).toBe(5);
    expect(telemetry[4].time_s).toBeCloseTo(0.2);
  });

  it("ignores malformed frames without dying", async () => {
    const harness = new MockHarness();
    const { client, telemetry } = makeClient(harness);
    client.connect("ws://mock");
    await flush();
    harness.sockets[0].onmessage?.({ data: "}{ garbage" });
    harness.broadcast(telemetryFixture(1.0));
    expect(telemetry.length).toBe(1);
  });

  it("reconnects after the harness drops and resumes streaming", async () => {
    vi.useFakeTimers();
    try {
      const harness = new MockHarness();
      const { client, telemetry, links } = makeClient(harness, 10);
      client.connect("ws://mock");
      await vi.runOnlyPendingTimersAsync();
      harness.broadcast(telemetryFixture(1.0));
      expect(telemetry.length).toBe(1);

      harness.sockets[0].dropFromServer();   // harness restarted
      expect(client.linkState).toBe("disconnected");
      expect(links).toContain("disconnected");

      await vi.advanceTimersByTimeAsync(20); // reconnect timer fires
      expect(harness.sockets.length).toBe(2);
      expect(client.linkState).toBe("connected");

      // state resyncs from the next telemetry object on the new socket
      harness.broadcast(telemetryFixture(0.1));
      expect(telemetry.length).toBe(2);
      expect(telemetry[1].time_s).toBeCloseTo(0.1);
    } finally {
      vi.useRealTimers();
    }
  });

  it("pending commands are rejected when the link drops", async () => {
    const harness = new MockHarness();
    const silent = {
      receive: () => { /* never answers */ },
    } as unknown as MockHarness;
    silent.sockets = [];
    (silent as unknown as { connect: () => FakeSocket }).connect = () => {
      const sock = new FakeSocket(silent);
      silent.sockets.push(sock);
      queueMicrotask(() => sock.onopen?.());
      return sock;
    };
    const { client, outcomes } = makeClient(silent);
    client.connect("ws://mock");
    await flush();
    client.send({ type: "pause" });
    silent.sockets[0].dropFromServer();
    const last = outcomes[outcomes.length - 1];
    expect(last.state).toBe("rejected");
    expect(last.reason).toMatch(/link lost/);
    void harness;
  });
});

describe("store integration", () => {
  it("ring buffer bound holds through the store", () => {
    const store = new Store(1200);
    for (let k = 0; k < 3000; k++) {
      store.ingestTelemetry(telemetryFixture(k * 0.05));
    }
    expect(store.state.history.length).toBe(1200);
    expect(store.state.latest?.time_s).toBeCloseTo(2999 * 0.05);
  });

  it("gain echo from telemetry updates non-pending forms", () => {
    const store = new Store();
    store.ingestTelemetry(telemetryFixture(1.0, {
      gains: { ROLL: { kp: 111, ki: 2, kd: 3, integrator_limit: 44 },
               PITCH: { kp: 700, ki: 150, kd: 30, integrator_limit: 250 },
               HEADING: { kp: 120, ki: 0, kd: 0, integrator_limit: 0 },
               SPEED: { kp: 40, ki: 18, kd: 0, integrator_limit: 480 } },
    }));
    expect(store.state.gains.ROLL.values.kp).toBe(111);
  });

  it("command outcomes drive the apply-state badges", () => {
    const store = new Store();
    const cmd = { type: "set_gains", loop: "ROLL", kp: 1, ki: 0, kd: 0,
                  integrator_limit: 1 } as const;
    store.applyOutcome({ command: cmd, state: "pending" });
    expect(store.state.gains.ROLL.applyState).toBe("pending");
    store.applyOutcome({ command: cmd, state: "acknowledged",
                         detail: { kp: 1 } });
    expect(store.state.gains.ROLL.applyState).toBe("acknowledged");
    store.applyOutcome({ command: cmd, state: "rejected", reason: "nope" });
    expect(store.state.gains.ROLL.applyState).toBe("rejected");
    expect(store.state.events.some((e) => e.level === "error")).toBe(true);
  });

  it("link state drives the banner, never a blank screen", () => {
    const store = new Store();
    store.setLink("connecting");
    expect(store.state.banner).toMatch(/connecting/);
    store.setLink("connected");
    expect(store.state.banner).toBeNull();
    store.setLink("disconnected");
    expect(store.state.banner).toMatch(/reconnecting/);
  });
});
