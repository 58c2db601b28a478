// Single store every UI update flows through. Views subscribe and redraw
// from snapshots; nothing else holds mutable state. Closing the browser
// loses only this object: the simulation never depends on it.

import { CommandOutcome, LinkState } from "./client.js";
import { GainSet, LoopName, LOOPS, MissionWaypoint, Telemetry } from "./schema.js";
import { RingBuffer } from "./ringbuffer.js";

export interface GainFormState {
  values: GainSet;
  applyState: "idle" | "pending" | "acknowledged" | "rejected";
  reason?: string;
}

export interface EventLogEntry {
  wall: number;         // Date.now()
  text: string;
  level: "info" | "error";
}

export interface GcsState {
  link: LinkState;
  latest: Telemetry | null;
  history: RingBuffer<Telemetry>;
  gains: Record<LoopName, GainFormState>;
  mission: MissionWaypoint[];
  missionUploadState: "idle" | "pending" | "acknowledged" | "rejected";
  events: EventLogEntry[];
  banner: string | null;   // connection problems etc., never a blank screen
}

const DEFAULT_GAINS: Record<LoopName, GainSet> = {
  ROLL: { kp: 350, ki: 40, kd: 25, integrator_limit: 150 },
  PITCH: { kp: 700, ki: 150, kd: 30, integrator_limit: 250 },
  HEADING: { kp: 120, ki: 0, kd: 0, integrator_limit: 0 },
  SPEED: { kp: 40, ki: 18, kd: 0, integrator_limit: 480 },
};

const MAX_EVENTS = 200;

export class Store {
  readonly state: GcsState;
  private listeners: Array<() => void> = [];

  constructor(historyCapacity = 1200) {
    const gains = {} as Record<LoopName, GainFormState>;
    for (const loop of LOOPS) {
      gains[loop] = { values: { ...DEFAULT_GAINS[loop] }, applyState: "idle" };
    }
    this.state = {
      link: "disconnected",
      latest: null,
      history: new RingBuffer<Telemetry>(historyCapacity),
      gains,
      mission: [],
      missionUploadState: "idle",
      events: [],
      banner: null,
    };
  }

  subscribe(fn: () => void): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }

  private emit(): void {
    for (const fn of this.listeners) fn();
  }

  log(text: string, level: "info" | "error" = "info"): void {
    this.state.events.push({ wall: Date.now(), text, level });
    if (this.state.events.length > MAX_EVENTS) {
      this.state.events.splice(0, this.state.events.length - MAX_EVENTS);
    }
    this.emit();
  }

  setLink(link: LinkState): void {
    this.state.link = link;
    this.state.banner = link === "connected"
      ? null
      : link === "connecting" ? "connecting to harness..."
      : "link down - reconnecting";
    this.emit();
  }

  ingestTelemetry(t: Telemetry): void {
    this.state.latest = t;
    this.state.history.push(t);
    // fold the harness's gain echo back into any non-editing forms
    if (t.gains) {
      for (const loop of LOOPS) {
        const echo = t.gains[loop];
        const form = this.state.gains[loop];
        if (echo && form.applyState !== "pending") {
          form.values = { ...echo };
        }
      }
    }
    this.emit();
  }

  applyOutcome(outcome: CommandOutcome): void {
    const { command, state, reason } = outcome;
    if (command.type === "set_gains") {
      const form = this.state.gains[command.loop];
      form.applyState = state === "pending" ? "pending"
        : state === "acknowledged" ? "acknowledged" : "rejected";
      form.reason = reason;
      if (state !== "pending") {
        this.log(`set_gains ${command.loop}: ${state}` +
          (reason ? ` (${reason})` : ""), state === "rejected" ? "error" : "info");
      }
    } else if (command.type === "upload_mission") {
      this.state.missionUploadState = state === "pending" ? "pending"
        : state === "acknowledged" ? "acknowledged" : "rejected";
      if (state !== "pending") {
        this.log(`mission upload (${command.waypoints.length} wp): ${state}` +
          (reason ? ` (${reason})` : ""), state === "rejected" ? "error" : "info");
      }
    } else if (state !== "pending") {
      this.log(`${command.type}: ${state}` + (reason ? ` (${reason})` : ""),
               state === "rejected" ? "error" : "info");
    }
    this.emit();
  }

  serverError(reason: string): void {
    this.log(`harness: ${reason}`, "error");
  }
}
