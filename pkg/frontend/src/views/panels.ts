// DOM panels: per-loop gain forms, fault buttons, mission editor, event
// log. Plain DOM, no framework; every command goes through the client's
// schema gate and shows its acknowledgement state.

import { GcsClient } from "../client.js";
import { Store } from "../store.js";
import { FaultKind, LOOPS, LoopName, MissionWaypoint } from "../schema.js";

const GAIN_FIELDS = ["kp", "ki", "kd", "integrator_limit"] as const;

export function buildGainPanel(root: HTMLElement, store: Store,
                               client: GcsClient): () => void {
  root.innerHTML = "";
  const inputs = new Map<string, HTMLInputElement>();
  const badges = new Map<LoopName, HTMLSpanElement>();

  for (const loop of LOOPS) {
    const row = document.createElement("div");
    row.className = "gain-row";
    const name = document.createElement("span");
    name.className = "gain-name";
    name.textContent = loop;
    row.appendChild(name);
    for (const field of GAIN_FIELDS) {
      const input = document.createElement("input");
      input.type = "number";
      input.step = "any";
      input.title = `${loop} ${field}`;
      input.value = String(store.state.gains[loop].values[field]);
      input.addEventListener("input", () => {
        badge.textContent = "edited";
        badge.className = "badge edited";
      });
      inputs.set(`${loop}.${field}`, input);
      row.appendChild(input);
    }
    const apply = document.createElement("button");
    apply.textContent = "apply";
    const badge = document.createElement("span");
    badge.className = "badge idle";
    badge.textContent = "idle";
    badges.set(loop, badge);
    apply.addEventListener("click", () => {
      const read = (f: string) =>
        Number(inputs.get(`${loop}.${f}`)!.value);
      client.send({
        type: "set_gains", loop,
        kp: read("kp"), ki: read("ki"), kd: read("kd"),
        integrator_limit: read("integrator_limit"),
      });
    });
    row.appendChild(apply);
    row.appendChild(badge);
    root.appendChild(row);
  }

  return store.subscribe(() => {
    for (const loop of LOOPS) {
      const form = store.state.gains[loop];
      const badge = badges.get(loop)!;
      if (badge.className === "badge edited" && form.applyState === "idle") {
        continue;  // keep unacknowledged local edits visually distinct
      }
      badge.textContent = form.applyState;
      badge.className = `badge ${form.applyState}`;
      if (form.applyState !== "pending") {
        for (const field of GAIN_FIELDS) {
          const input = inputs.get(`${loop}.${field}`)!;
          if (document.activeElement !== input) {
            input.value = String(form.values[field]);
          }
        }
      }
    }
  });
}

const FAULTS: Array<[FaultKind, string, Record<string, number | string>]> = [
  ["POWER_BROWNOUT", "brownout 2 s", { reset_delay_s: 2.0 }],
  ["GPS_DROPOUT", "GPS out 3 s", { duration_s: 3.0 }],
  ["SERVO_STUCK", "elevator stuck 2 s",
   { channel: "elevator", value_us: 1540, duration_s: 2.0 }],
  ["GYRO_BIAS_JUMP", "gyro bias +0.03", { bias_jump_rps: 0.03 }],
  ["LINK_NOISE", "link noise 5 s",
   { byte_error_rate: 0.002, duration_s: 5.0 }],
];

export function buildFaultPanel(root: HTMLElement, client: GcsClient): void {
  root.innerHTML = "";
  for (const [kind, label, extra] of FAULTS) {
    const button = document.createElement("button");
    button.textContent = label;
    button.className = "fault";
    button.addEventListener("click", () => {
      client.send({ type: "inject_fault", kind, ...extra });
    });
    root.appendChild(button);
  }
  const pause = document.createElement("button");
  pause.textContent = "pause";
  pause.addEventListener("click", () => client.send({ type: "pause" }));
  const resume = document.createElement("button");
  resume.textContent = "resume";
  resume.addEventListener("click", () => client.send({ type: "resume" }));
  root.appendChild(pause);
  root.appendChild(resume);
}

export function buildMissionEditor(root: HTMLElement, store: Store,
                                   client: GcsClient): () => void {
  root.innerHTML = "";
  const table = document.createElement("table");
  table.className = "mission";
  root.appendChild(table);
  const controls = document.createElement("div");
  root.appendChild(controls);

  const addButton = document.createElement("button");
  addButton.textContent = "+ waypoint";
  addButton.addEventListener("click", () => {
    const last = store.state.mission[store.state.mission.length - 1];
    store.state.mission.push(last
      ? { ...last, lat_deg: last.lat_deg + 0.005 }
      : { lat_deg: -6.8775, lon_deg: 107.61, alt_m: 820, kind: "FLYOVER" });
    render();
  });
  const uploadButton = document.createElement("button");
  uploadButton.textContent = "upload mission";
  uploadButton.addEventListener("click", () => {
    client.send({ type: "upload_mission", crosstrack: true,
                  waypoints: store.state.mission.slice() });
  });
  const badge = document.createElement("span");
  badge.className = "badge idle";
  badge.textContent = "idle";
  controls.appendChild(addButton);
  controls.appendChild(uploadButton);
  controls.appendChild(badge);

  function render(): void {
    table.innerHTML =
      "<tr><th>#</th><th>lat</th><th>lon</th><th>alt m</th><th>kind</th>" +
      "<th>r m</th><th>dur s</th><th></th></tr>";
    store.state.mission.forEach((wp, i) => {
      const tr = document.createElement("tr");
      const cell = (value: string | number, key: keyof MissionWaypoint,
                    width = 70) => {
        const td = document.createElement("td");
        const input = document.createElement("input");
        input.value = String(value);
        input.style.width = `${width}px`;
        input.addEventListener("change", () => {
          const v = key === "kind" ? input.value : Number(input.value);
          (wp as unknown as Record<string, unknown>)[key] = v;
        });
        td.appendChild(input);
        tr.appendChild(td);
      };
      const idx = document.createElement("td");
      idx.textContent = String(i + 1);
      tr.appendChild(idx);
      cell(wp.lat_deg, "lat_deg", 80);
      cell(wp.lon_deg, "lon_deg", 80);
      cell(wp.alt_m, "alt_m", 50);
      cell(wp.kind, "kind", 66);
      cell(wp.loiter_radius_m ?? 0, "loiter_radius_m", 40);
      cell(wp.loiter_duration_s ?? 0, "loiter_duration_s", 40);
      const ops = document.createElement("td");
      for (const [sym, delta] of [["^", -1], ["v", +1]] as const) {
        const button = document.createElement("button");
        button.textContent = sym;
        button.addEventListener("click", () => {
          const j = i + delta;
          if (j < 0 || j >= store.state.mission.length) return;
          const m = store.state.mission;
          [m[i], m[j]] = [m[j], m[i]];
          render();
        });
        ops.appendChild(button);
      }
      const del = document.createElement("button");
      del.textContent = "x";
      del.addEventListener("click", () => {
        store.state.mission.splice(i, 1);
        render();
      });
      ops.appendChild(del);
      tr.appendChild(ops);
      table.appendChild(tr);
    });
  }
  render();

  return store.subscribe(() => {
    badge.textContent = store.state.missionUploadState;
    badge.className = `badge ${store.state.missionUploadState}`;
  });
}

export function buildEventLog(root: HTMLElement, store: Store): () => void {
  return store.subscribe(() => {
    const rows = store.state.events.slice(-12).reverse().map((e) => {
      const at = new Date(e.wall).toLocaleTimeString();
      return `<div class="evt ${e.level}">${at} ${e.text}</div>`;
    });
    root.innerHTML = rows.join("");
  });
}
