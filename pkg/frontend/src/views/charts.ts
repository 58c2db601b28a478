// Strip charts, setpoint vs measurement per control loop, drawn from the
// telemetry ring buffer. Decimation for drawing always keeps the newest
// tick (the RingBuffer guarantees it).

import { RingBuffer } from "../ringbuffer.js";
import { Telemetry } from "../schema.js";

export interface LoopTrace {
  label: string;
  setpoint: (t: Telemetry) => number;
  measurement: (t: Telemetry) => number;
  unit: string;
}

export const LOOP_TRACES: LoopTrace[] = [
  { label: "roll", unit: "deg",
    setpoint: (t) => t.objectives.roll_cmd_deg,
    measurement: (t) => t.estimate.roll_deg },
  { label: "pitch", unit: "deg",
    setpoint: (t) => t.objectives.pitch_cmd_deg,
    measurement: (t) => t.estimate.pitch_deg },
  { label: "heading", unit: "deg",
    setpoint: (t) => t.objectives.heading_cmd_deg,
    measurement: (t) => t.estimate.heading_deg },
  { label: "speed", unit: "m/s",
    setpoint: (t) => t.objectives.speed_cmd_mps,
    measurement: (t) => t.gps ? t.gps.speed_mps : NaN },
];

export function drawStripChart(ctx: CanvasRenderingContext2D,
                               w: number, h: number,
                               history: RingBuffer<Telemetry>,
                               trace: LoopTrace, maxPoints = 300): void {
  ctx.fillStyle = "#10141c";
  ctx.fillRect(0, 0, w, h);
  const data = history.decimate(maxPoints);
  ctx.fillStyle = "#9ab";
  ctx.font = "10px monospace";
  ctx.fillText(trace.label, 6, 12);
  if (data.length < 2) return;

  const sp = data.map(trace.setpoint);
  const ms = data.map(trace.measurement);
  const finite = sp.concat(ms).filter(Number.isFinite);
  if (finite.length === 0) return;
  let lo = Math.min(...finite), hi = Math.max(...finite);
  if (hi - lo < 1e-6) { lo -= 1; hi += 1; }
  const margin = 0.1 * (hi - lo);
  lo -= margin; hi += margin;

  const t0 = data[0].time_s, t1 = data[data.length - 1].time_s;
  const px = (t: number, v: number): [number, number] =>
    [(t - t0) / (t1 - t0 + 1e-9) * w, h - (v - lo) / (hi - lo) * h];

  const plot = (vals: number[], style: string, dash: number[]) => {
    ctx.strokeStyle = style;
    ctx.setLineDash(dash);
    ctx.beginPath();
    let started = false;
    data.forEach((t, i) => {
      if (!Number.isFinite(vals[i])) return;
      const [x, y] = px(t.time_s, vals[i]);
      if (!started) { ctx.moveTo(x, y); started = true; } else ctx.lineTo(x, y);
    });
    ctx.stroke();
    ctx.setLineDash([]);
  };
  plot(sp, "#ff7a3c", [5, 3]);   // setpoint dashed orange
  plot(ms, "#5aa7e0", []);       // measurement solid blue

  const last = ms[ms.length - 1];
  ctx.fillStyle = "#ccc";
  ctx.textAlign = "right";
  ctx.fillText(Number.isFinite(last)
    ? `${last.toFixed(1)} ${trace.unit}` : "-", w - 6, 12);
  ctx.textAlign = "left";
}
