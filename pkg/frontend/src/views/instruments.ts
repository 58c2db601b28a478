// Canvas flight instruments: artificial horizon, heading rose, servo bars.
// Pure draw functions over (ctx, state) so fixtures.html can render them
// from static data.

export function drawAttitudeIndicator(ctx: CanvasRenderingContext2D,
                                      w: number, h: number,
                                      rollDeg: number, pitchDeg: number): void {
  const cx = w / 2, cy = h / 2;
  const r = Math.min(w, h) / 2 - 4;
  const pitchScale = r / 45;  // 45 deg of pitch from center to rim

  ctx.save();
  ctx.beginPath();
  ctx.arc(cx, cy, r, 0, 2 * Math.PI);
  ctx.clip();

  ctx.translate(cx, cy);
  ctx.rotate(-rollDeg * Math.PI / 180);
  const horizon = pitchDeg * pitchScale;

  ctx.fillStyle = "#3b6ea5";   // sky
  ctx.fillRect(-2 * r, -2 * r, 4 * r, 2 * r + horizon);
  ctx.fillStyle = "#7a5a33";   // ground
  ctx.fillRect(-2 * r, horizon, 4 * r, 2 * r);
  ctx.strokeStyle = "#ffffff";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(-r, horizon);
  ctx.lineTo(r, horizon);
  ctx.stroke();

  ctx.lineWidth = 1;
  ctx.fillStyle = "#ffffff";
  ctx.font = "9px monospace";
  for (const step of [-30, -20, -10, 10, 20, 30]) {
    const y = horizon + step * pitchScale;
    const half = step % 20 === 0 ? 24 : 14;
    ctx.beginPath();
    ctx.moveTo(-half, y);
    ctx.lineTo(half, y);
    ctx.stroke();
    if (step % 20 === 0) ctx.fillText(String(-step), half + 3, y + 3);
  }
  ctx.restore();

  // fixed aircraft symbol
  ctx.strokeStyle = "#ffd24a";
  ctx.lineWidth = 3;
  ctx.beginPath();
  ctx.moveTo(cx - 30, cy);
  ctx.lineTo(cx - 8, cy);
  ctx.moveTo(cx + 8, cy);
  ctx.lineTo(cx + 30, cy);
  ctx.moveTo(cx, cy - 2);
  ctx.arc(cx, cy, 2, 0, 2 * Math.PI);
  ctx.stroke();

  ctx.strokeStyle = "#888";
  ctx.beginPath();
  ctx.arc(cx, cy, r, 0, 2 * Math.PI);
  ctx.stroke();
}

export function drawHeadingRose(ctx: CanvasRenderingContext2D,
                                w: number, h: number,
                                headingDeg: number,
                                headingCmdDeg: number | null): void {
  const cx = w / 2, cy = h / 2;
  const r = Math.min(w, h) / 2 - 4;
  ctx.fillStyle = "#10141c";
  ctx.fillRect(0, 0, w, h);
  ctx.save();
  ctx.translate(cx, cy);
  ctx.rotate(-headingDeg * Math.PI / 180);
  ctx.strokeStyle = "#aaa";
  ctx.fillStyle = "#ccc";
  ctx.font = "10px monospace";
  ctx.textAlign = "center";
  for (let deg = 0; deg < 360; deg += 10) {
    const a = deg * Math.PI / 180;
    const len = deg % 30 === 0 ? 10 : 5;
    ctx.beginPath();
    ctx.moveTo(r * Math.sin(a), -r * Math.cos(a));
    ctx.lineTo((r - len) * Math.sin(a), -(r - len) * Math.cos(a));
    ctx.stroke();
    if (deg % 90 === 0) {
      const label = ["N", "E", "S", "W"][deg / 90];
      ctx.save();
      ctx.translate((r - 20) * Math.sin(a), -(r - 20) * Math.cos(a));
      ctx.rotate(a);
      ctx.fillText(label, 0, 4);
      ctx.restore();
    }
  }
  // commanded-heading bug
  if (headingCmdDeg !== null) {
    const a = headingCmdDeg * Math.PI / 180;
    ctx.fillStyle = "#ff7a3c";
    ctx.beginPath();
    ctx.moveTo((r - 2) * Math.sin(a), -(r - 2) * Math.cos(a));
    ctx.lineTo((r - 12) * Math.sin(a + 0.06), -(r - 12) * Math.cos(a + 0.06));
    ctx.lineTo((r - 12) * Math.sin(a - 0.06), -(r - 12) * Math.cos(a - 0.06));
    ctx.fill();
  }
  ctx.restore();

  // lubber line
  ctx.strokeStyle = "#ffd24a";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(cx, cy - r);
  ctx.lineTo(cx, cy - r + 14);
  ctx.stroke();
}

export interface ServoSet {
  aileron_us: number;
  elevator_us: number;
  rudder_us: number;
  throttle_us: number;
}

export function drawServoBars(ctx: CanvasRenderingContext2D,
                              w: number, h: number, servo: ServoSet): void {
  const channels: Array<[string, number]> = [
    ["AIL", servo.aileron_us], ["ELE", servo.elevator_us],
    ["RUD", servo.rudder_us], ["THR", servo.throttle_us]];
  ctx.fillStyle = "#10141c";
  ctx.fillRect(0, 0, w, h);
  ctx.font = "10px monospace";
  const rowH = h / channels.length;
  channels.forEach(([name, us], i) => {
    const y = i * rowH + rowH / 2;
    const frac = (us - 1000) / 1000;
    ctx.fillStyle = "#ccc";
    ctx.textAlign = "left";
    ctx.fillText(name, 4, y + 3);
    ctx.strokeStyle = "#555";
    ctx.strokeRect(36, y - 6, w - 96, 12);
    ctx.fillStyle = name === "THR" ? "#57c46a" : "#5aa7e0";
    ctx.fillRect(36, y - 6, (w - 96) * frac, 12);
    if (name !== "THR") {  // center notch for surfaces
      ctx.strokeStyle = "#ffd24a";
      ctx.beginPath();
      ctx.moveTo(36 + (w - 96) / 2, y - 8);
      ctx.lineTo(36 + (w - 96) / 2, y + 8);
      ctx.stroke();
    }
    ctx.fillStyle = "#ccc";
    ctx.textAlign = "right";
    ctx.fillText(`${us} us`, w - 6, y + 3);
  });
}
