// 2-D mission map in local NED meters: legs, flown track, aircraft glyph,
// crosstrack readout. The projection is a plain local grid (origin lat/lon
// shown as text elsewhere); no tile services.

import { MissionWaypoint, Telemetry } from "../schema.js";

const R_EARTH = 6371000.0;

export interface MapFrame {
  originLat: number;
  originLon: number;
}

export function waypointToNed(wp: MissionWaypoint, frame: MapFrame):
    { north: number; east: number } {
  const rad = Math.PI / 180;
  return {
    north: (wp.lat_deg - frame.originLat) * rad * R_EARTH,
    east: (wp.lon_deg - frame.originLon) * rad * R_EARTH *
      Math.cos(frame.originLat * rad),
  };
}

export function drawMap(ctx: CanvasRenderingContext2D, w: number, h: number,
                        mission: MissionWaypoint[], frame: MapFrame,
                        track: Telemetry[], latest: Telemetry | null): void {
  ctx.fillStyle = "#0c1117";
  ctx.fillRect(0, 0, w, h);

  const pts = mission.map((wp) => waypointToNed(wp, frame));
  const xs: number[] = pts.map((p) => p.east);
  const ys: number[] = pts.map((p) => p.north);
  for (const t of track) {
    xs.push(t.truth.east_m);
    ys.push(t.truth.north_m);
  }
  if (latest) {
    xs.push(latest.truth.east_m);
    ys.push(latest.truth.north_m);
  }
  if (xs.length === 0) {
    ctx.fillStyle = "#777";
    ctx.font = "12px monospace";
    ctx.fillText("no mission / no telemetry", 12, 20);
    return;
  }
  const pad = 150;
  const eLo = Math.min(...xs) - pad, eHi = Math.max(...xs) + pad;
  const nLo = Math.min(...ys) - pad, nHi = Math.max(...ys) + pad;
  const scale = Math.min(w / (eHi - eLo), h / (nHi - nLo));
  const px = (east: number, north: number): [number, number] =>
    [(east - eLo) * scale, h - (north - nLo) * scale];

  // grid every 500 m
  ctx.strokeStyle = "#1c2633";
  ctx.lineWidth = 1;
  for (let e = Math.ceil(eLo / 500) * 500; e <= eHi; e += 500) {
    const [x0] = px(e, 0);
    ctx.beginPath(); ctx.moveTo(x0, 0); ctx.lineTo(x0, h); ctx.stroke();
  }
  for (let n = Math.ceil(nLo / 500) * 500; n <= nHi; n += 500) {
    const [, y0] = px(0, n);
    ctx.beginPath(); ctx.moveTo(0, y0); ctx.lineTo(w, y0); ctx.stroke();
  }

  // mission legs
  ctx.strokeStyle = "#4a7d4a";
  ctx.lineWidth = 2;
  ctx.setLineDash([6, 4]);
  ctx.beginPath();
  pts.forEach((p, i) => {
    const [x, y] = px(p.east, p.north);
    if (i === 0) ctx.moveTo(x, y); else ctx.lineTo(x, y);
  });
  ctx.stroke();
  ctx.setLineDash([]);

  // waypoints (loiter radius where present)
  pts.forEach((p, i) => {
    const wp = mission[i];
    const [x, y] = px(p.east, p.north);
    ctx.strokeStyle = wp.kind === "LOITER" ? "#d0a23c" : "#6bd06b";
    ctx.beginPath();
    ctx.arc(x, y, 5, 0, 2 * Math.PI);
    ctx.stroke();
    if (wp.kind === "LOITER" && wp.loiter_radius_m) {
      ctx.beginPath();
      ctx.arc(x, y, wp.loiter_radius_m * scale, 0, 2 * Math.PI);
      ctx.setLineDash([3, 3]);
      ctx.stroke();
      ctx.setLineDash([]);
    }
    ctx.fillStyle = "#cfe7cf";
    ctx.font = "11px monospace";
    ctx.fillText(String(i + 1), x + 8, y - 6);
  });

  // flown track
  ctx.strokeStyle = "#5aa7e0";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  track.forEach((t, i) => {
    const [x, y] = px(t.truth.east_m, t.truth.north_m);
    if (i === 0) ctx.moveTo(x, y); else ctx.lineTo(x, y);
  });
  ctx.stroke();

  // aircraft
  if (latest) {
    const [x, y] = px(latest.truth.east_m, latest.truth.north_m);
    const yaw = latest.truth.yaw_deg * Math.PI / 180;
    ctx.save();
    ctx.translate(x, y);
    ctx.rotate(yaw);
    ctx.fillStyle = "#ffd24a";
    ctx.beginPath();
    ctx.moveTo(0, -9);
    ctx.lineTo(6, 7);
    ctx.lineTo(0, 3);
    ctx.lineTo(-6, 7);
    ctx.fill();
    ctx.restore();

    ctx.fillStyle = "#ccc";
    ctx.font = "11px monospace";
    ctx.fillText(`xte ${latest.status.crosstrack_m.toFixed(1)} m   ` +
                 `wp ${latest.status.current_wp + 1}/${mission.length || "-"}   ` +
                 `mode ${["INIT", "NAV", "LOITER", "COMPLETE"][latest.status.mode]}`,
                 10, h - 10);
  }
}
