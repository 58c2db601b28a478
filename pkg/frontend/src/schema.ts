// Telemetry/command JSON schema (v1) shared with the harness WebSocket
// service. Runtime guards double as the outbound-command validator: only
// objects that pass these checks are ever sent.

export const SCHEMA_VERSION = 1;

export interface Telemetry {
  type: "telemetry";
  v: number;
  time_s: number;
  truth: { north_m: number; east_m: number; down_m: number;
           roll_deg: number; pitch_deg: number; yaw_deg: number };
  estimate: { roll_deg: number; pitch_deg: number; heading_deg: number };
  objectives: { roll_cmd_deg: number; pitch_cmd_deg: number;
                heading_cmd_deg: number; speed_cmd_mps: number };
  servo: { aileron_us: number; elevator_us: number;
           rudder_us: number; throttle_us: number };
  gps: { lat_deg: number; lon_deg: number; alt_m: number;
         speed_mps: number; course_deg: number } | null;
  status: { mode: number; current_wp: number; crosstrack_m: number;
            fault_flags: number };
  gains?: Record<string, GainSet>;
}

export interface GainSet {
  kp: number;
  ki: number;
  kd: number;
  integrator_limit: number;
}

export interface Ack {
  type: "ack";
  v?: number;
  command: string;
  applied: Record<string, unknown>;
}

export interface ErrorMsg {
  type: "error";
  v?: number;
  command: string | null;
  reason: string;
}

export type Inbound = Telemetry | Ack | ErrorMsg;

export const LOOPS = ["ROLL", "PITCH", "HEADING", "SPEED"] as const;
export type LoopName = (typeof LOOPS)[number];

export interface SetGainsCommand {
  type: "set_gains";
  loop: LoopName;
  kp: number;
  ki: number;
  kd: number;
  integrator_limit: number;
}

export interface MissionWaypoint {
  lat_deg: number;
  lon_deg: number;
  alt_m: number;
  kind: "FLYOVER" | "LOITER";
  capture_radius_m?: number;
  loiter_radius_m?: number;
  loiter_duration_s?: number;
}

export interface UploadMissionCommand {
  type: "upload_mission";
  cruise_speed_mps?: number;
  crosstrack?: boolean;
  waypoints: MissionWaypoint[];
}

export type FaultKind =
  "POWER_BROWNOUT" | "GPS_DROPOUT" | "SERVO_STUCK" | "GYRO_BIAS_JUMP" | "LINK_NOISE";

export interface InjectFaultCommand {
  type: "inject_fault";
  kind: FaultKind;
  at_time_s?: number;
  reset_delay_s?: number;
  duration_s?: number;
  channel?: string;
  value_us?: number;
  bias_jump_rps?: number;
  byte_error_rate?: number;
}

export interface PauseCommand { type: "pause" }
export interface ResumeCommand { type: "resume" }
export interface SetTimeScaleCommand { type: "set_time_scale"; value: number }

export type Command =
  SetGainsCommand | UploadMissionCommand | InjectFaultCommand |
  PauseCommand | ResumeCommand | SetTimeScaleCommand;

// ---- guards -----------------------------------------------------------------

const num = (x: unknown): x is number =>
  typeof x === "number" && Number.isFinite(x);

function hasNums(obj: unknown, keys: string[]): boolean {
  if (typeof obj !== "object" || obj === null) return false;
  const rec = obj as Record<string, unknown>;
  return keys.every((k) => num(rec[k]));
}

export function isTelemetry(msg: unknown): msg is Telemetry {
  if (typeof msg !== "object" || msg === null) return false;
  const m = msg as Record<string, unknown>;
  return m.type === "telemetry"
    && num(m.time_s)
    && hasNums(m.truth, ["north_m", "east_m", "down_m",
                         "roll_deg", "pitch_deg", "yaw_deg"])
    && hasNums(m.estimate, ["roll_deg", "pitch_deg", "heading_deg"])
    && hasNums(m.objectives, ["roll_cmd_deg", "pitch_cmd_deg",
                              "heading_cmd_deg", "speed_cmd_mps"])
    && hasNums(m.servo, ["aileron_us", "elevator_us", "rudder_us",
                         "throttle_us"])
    && (m.gps === null || hasNums(m.gps, ["lat_deg", "lon_deg", "alt_m",
                                          "speed_mps", "course_deg"]))
    && hasNums(m.status, ["mode", "current_wp", "crosstrack_m",
                          "fault_flags"]);
}

export function isAck(msg: unknown): msg is Ack {
  if (typeof msg !== "object" || msg === null) return false;
  const m = msg as Record<string, unknown>;
  return m.type === "ack" && typeof m.command === "string"
    && typeof m.applied === "object" && m.applied !== null;
}

export function isErrorMsg(msg: unknown): msg is ErrorMsg {
  if (typeof msg !== "object" || msg === null) return false;
  const m = msg as Record<string, unknown>;
  return m.type === "error" && typeof m.reason === "string";
}

export function parseInbound(raw: string): Inbound | null {
  let msg: unknown;
  try {
    msg = JSON.parse(raw);
  } catch {
    return null;
  }
  if (isTelemetry(msg) || isAck(msg) || isErrorMsg(msg)) return msg;
  return null;
}

export function isWaypoint(w: unknown): w is MissionWaypoint {
  if (!hasNums(w, ["lat_deg", "lon_deg", "alt_m"])) return false;
  const rec = w as Record<string, unknown>;
  if (rec.kind !== "FLYOVER" && rec.kind !== "LOITER") return false;
  if (rec.kind === "LOITER" &&
      !(num(rec.loiter_radius_m) && (rec.loiter_radius_m as number) > 0)) {
    return false;
  }
  return true;
}

/** Outbound-command gate: returns null when valid, else the reason. */
export function validateCommand(cmd: Command): string | null {
  switch (cmd.type) {
    case "set_gains": {
      if (!LOOPS.includes(cmd.loop)) return `unknown loop ${cmd.loop}`;
      if (![cmd.kp, cmd.ki, cmd.kd, cmd.integrator_limit].every(num)) {
        return "gains must be finite numbers";
      }
      if (cmd.integrator_limit < 0) return "integrator_limit must be >= 0";
      return null;
    }
    case "upload_mission": {
      if (!Array.isArray(cmd.waypoints) || cmd.waypoints.length === 0) {
        return "mission needs at least one waypoint";
      }
      for (let i = 0; i < cmd.waypoints.length; i++) {
        if (!isWaypoint(cmd.waypoints[i])) return `waypoint ${i} is invalid`;
      }
      if (cmd.cruise_speed_mps !== undefined &&
          !(num(cmd.cruise_speed_mps) && cmd.cruise_speed_mps > 0)) {
        return "cruise_speed_mps must be positive";
      }
      return null;
    }
    case "inject_fault": {
      const kinds = ["POWER_BROWNOUT", "GPS_DROPOUT", "SERVO_STUCK",
                     "GYRO_BIAS_JUMP", "LINK_NOISE"];
      if (!kinds.includes(cmd.kind)) return `unknown fault kind ${cmd.kind}`;
      return null;
    }
    case "pause":
    case "resume":
      return null;
    case "set_time_scale":
      return num(cmd.value) && cmd.value >= 0
        ? null : "time scale must be a number >= 0";
    default:
      return "unknown command type";
  }
}
