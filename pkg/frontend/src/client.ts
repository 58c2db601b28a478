// WebSocket session to the harness: auto-reconnect, link-state surface,
// schema-gated outbound commands, FIFO ack matching per command type.
//
// The socket is injected through a factory so the whole client is testable
// against an in-process mock harness; in the browser the factory defaults
// to `new WebSocket(url)`.

import { Command, Inbound, parseInbound, validateCommand } from "./schema.js";

export type LinkState = "connecting" | "connected" | "disconnected";

export interface SocketLike {
  onopen: ((ev?: unknown) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  send(data: string): void;
  close(): void;
}

export type SocketFactory = (url: string) => SocketLike;

export type ApplyState = "pending" | "acknowledged" | "rejected";

export interface CommandOutcome {
  command: Command;
  state: ApplyState;
  detail?: Record<string, unknown>;
  reason?: string;
}

export interface ClientEvents {
  onTelemetry?: (msg: Inbound & { type: "telemetry" }) => void;
  onLinkState?: (state: LinkState) => void;
  onOutcome?: (outcome: CommandOutcome) => void;
  onServerError?: (reason: string) => void;
}

const defaultFactory: SocketFactory = (url) =>
  new WebSocket(url) as unknown as SocketLike;

export class GcsClient {
  private url = "";
  private socket: SocketLike | null = null;
  private factory: SocketFactory;
  private events: ClientEvents;
  private pending: Command[] = [];
  private closed = false;
  private reconnectDelayMs: number;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;
  linkState: LinkState = "disconnected";

  constructor(events: ClientEvents = {}, factory?: SocketFactory,
              reconnectDelayMs = 1000) {
    this.events = events;
    this.factory = factory ?? defaultFactory;
    this.reconnectDelayMs = reconnectDelayMs;
  }

  connect(url: string): void {
    this.url = url;
    this.closed = false;
    this.open();
  }

  private setLink(state: LinkState): void {
    this.linkState = state;
    this.events.onLinkState?.(state);
  }

  private open(): void {
    this.setLink("connecting");
    let sock: SocketLike;
    try {
      sock = this.factory(this.url);
    } catch {
      this.scheduleReconnect();
      return;
    }
    this.socket = sock;
    sock.onopen = () => this.setLink("connected");
    sock.onmessage = (ev) => this.handleRaw(String(ev.data));
    sock.onerror = () => { /* onclose always follows */ };
    sock.onclose = () => {
      this.socket = null;
      // anything unanswered will never be acked by this session
      this.failPending("link lost before acknowledgement");
      this.scheduleReconnect();
    };
  }

  private scheduleReconnect(): void {
    this.setLink("disconnected");
    if (this.closed || this.reconnectTimer !== null) return;
    this.reconnectTimer = setTimeout(() => {
      this.reconnectTimer = null;
      if (!this.closed) this.open();
    }, this.reconnectDelayMs);
  }

  private failPending(reason: string): void {
    for (const command of this.pending.splice(0)) {
      this.events.onOutcome?.({ command, state: "rejected", reason });
    }
  }

  close(): void {
    this.closed = true;
    if (this.reconnectTimer !== null) {
      clearTimeout(this.reconnectTimer);
      this.reconnectTimer = null;
    }
    this.socket?.close();
    this.socket = null;
    this.setLink("disconnected");
  }

  /** Validate and send; invalid commands are rejected locally and never
      reach the wire. Returns the immediate outcome state. */
  send(command: Command): ApplyState {
    const problem = validateCommand(command);
    if (problem !== null) {
      this.events.onOutcome?.({ command, state: "rejected", reason: problem });
      return "rejected";
    }
    if (this.linkState !== "connected" || this.socket === null) {
      this.events.onOutcome?.({ command, state: "rejected",
                                reason: "not connected" });
      return "rejected";
    }
    this.pending.push(command);
    // surface "pending" before the send: a synchronous transport may
    // deliver the acknowledgement inside send() itself
    this.events.onOutcome?.({ command, state: "pending" });
    this.socket.send(JSON.stringify(command));
    return "pending";
  }

  private handleRaw(raw: string): void {
    const msg = parseInbound(raw);
    if (msg === null) return;  // not ours / malformed: ignore
    if (msg.type === "telemetry") {
      this.events.onTelemetry?.(msg);
      return;
    }
    if (msg.type === "ack") {
      const idx = this.pending.findIndex((c) => c.type === msg.command);
      if (idx >= 0) {
        const [command] = this.pending.splice(idx, 1);
        let state: ApplyState = "acknowledged";
        let reason: string | undefined;
        if (command.type === "upload_mission") {
          // all-or-nothing: the echo must confirm every waypoint landed
          const applied = Number(msg.applied["count"]);
          if (applied !== command.waypoints.length) {
            state = "rejected";
            reason = `harness applied ${applied} of ` +
              `${command.waypoints.length} waypoints`;
          }
        }
        this.events.onOutcome?.({ command, state, detail: msg.applied, reason });
      }
      return;
    }
    // error object
    const idx = msg.command === null ? -1 :
      this.pending.findIndex((c) => c.type === msg.command);
    if (idx >= 0) {
      const [command] = this.pending.splice(idx, 1);
      this.events.onOutcome?.({ command, state: "rejected",
                                reason: msg.reason });
    }
    this.events.onServerError?.(msg.reason);
  }
}
