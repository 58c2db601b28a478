// GCS entry point: one WebSocket, one store, a render loop over the canvas
// instruments, DOM panels for tuning/mission/faults.

import { GcsClient } from "./client.js";
import { Store } from "./store.js";
import { Telemetry } from "./schema.js";
import { drawAttitudeIndicator, drawHeadingRose, drawServoBars }
  from "./views/instruments.js";
import { drawMap } from "./views/map.js";
import { LOOP_TRACES, drawStripChart } from "./views/charts.js";
import { buildEventLog, buildFaultPanel, buildGainPanel, buildMissionEditor }
  from "./views/panels.js";

const params = new URLSearchParams(location.search);
const url = params.get("ws") ?? `ws://${location.hostname || "127.0.0.1"}:8642`;

const store = new Store(1200);
const mapFrame = { originLat: -6.891, originLon: 107.610 };

const client = new GcsClient({
  onTelemetry: (t: Telemetry) => store.ingestTelemetry(t),
  onLinkState: (s) => store.setLink(s),
  onOutcome: (o) => store.applyOutcome(o),
  onServerError: (r) => store.serverError(r),
});

function canvas(id: string): [HTMLCanvasElement, CanvasRenderingContext2D] {
  const el = document.getElementById(id) as HTMLCanvasElement;
  return [el, el.getContext("2d")!];
}

const [attEl, attCtx] = canvas("attitude");
const [hdgEl, hdgCtx] = canvas("heading");
const [srvEl, srvCtx] = canvas("servos");
const [mapEl, mapCtx] = canvas("map");
const chartCtx = LOOP_TRACES.map((_, i) => canvas(`chart${i}`));

const banner = document.getElementById("banner")!;
const originLabel = document.getElementById("origin")!;
originLabel.textContent =
  `origin ${mapFrame.originLat.toFixed(4)}, ${mapFrame.originLon.toFixed(4)} ` +
  `(local grid, meters)  ws: ${url}`;

buildGainPanel(document.getElementById("gains")!, store, client);
buildFaultPanel(document.getElementById("faults")!, client);
buildMissionEditor(document.getElementById("mission")!, store, client);
buildEventLog(document.getElementById("events")!, store);

function render(): void {
  const latest = store.state.latest;
  banner.textContent = store.state.banner ?? "";
  banner.className = store.state.banner ? "banner show" : "banner";

  if (latest) {
    drawAttitudeIndicator(attCtx, attEl.width, attEl.height,
                          latest.estimate.roll_deg, latest.estimate.pitch_deg);
    drawHeadingRose(hdgCtx, hdgEl.width, hdgEl.height,
                    latest.estimate.heading_deg,
                    latest.objectives.heading_cmd_deg);
    drawServoBars(srvCtx, srvEl.width, srvEl.height, latest.servo);
  }
  drawMap(mapCtx, mapEl.width, mapEl.height, store.state.mission, mapFrame,
          store.state.history.decimate(600), latest);
  LOOP_TRACES.forEach((trace, i) => {
    const [el, ctx] = chartCtx[i];
    drawStripChart(ctx, el.width, el.height, store.state.history, trace);
  });
  requestAnimationFrame(render);
}

client.connect(url);
requestAnimationFrame(render);

// surface a clear banner when the URL is simply wrong (connect timeout)
setTimeout(() => {
  if (store.state.link !== "connected" && store.state.latest === null) {
    store.state.banner = `no harness at ${url} - is "hilsim run --serve" up?`;
  }
}, 5000);
