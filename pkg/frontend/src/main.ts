// Design UI wiring: schema-bound parameter panel, debounced live refresh,
// version-consistent mesh + curve panels, STL/config export.

import { ApiClient } from "./api.js";
import { renderFd, renderPv } from "./charts.js";
import { DebouncedRefresher } from "./debounce.js";
import { bindControls, clampValue, presetValues } from "./schemaPanel.js";
import { UISession } from "./session.js";
import { configBlob, writeBinaryStl } from "./stl.js";
import type { Config } from "./types.js";
import { MeshViewer } from "./viewer.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

async function boot(): Promise<void> {
  const api = new ApiClient("");
  const banner = el<HTMLDivElement>("banner");
  let schema: Record<string, unknown>;
  let presets: Record<string, Config>;
  try {
    schema = await api.schema();
    presets = await api.presets();
  } catch {
    banner.textContent = "design service unreachable - retrying in 3 s";
    banner.style.display = "block";
    setTimeout(boot, 3000);
    return;
  }
  banner.style.display = "none";

  const session = new UISession({ schema: 1, preset: "paper" });
  const viewer = new MeshViewer(el<HTMLCanvasElement>("viewport"));
  const fdCanvas = el<HTMLCanvasElement>("fd");
  const pvCanvas = el<HTMLCanvasElement>("pv");
  const status = el<HTMLSpanElement>("status");
  const exportBtn = el<HTMLButtonElement>("export");
  let lastError = "";

  const refresher = new DebouncedRefresher(async () => {
    const version = session.version;
    const cfg = session.config;
    status.textContent = "computing...";
    try {
      const [mesh, curves] = await Promise.all([api.mesh(cfg), api.curves(cfg)]);
      lastError = "";
      const meshApplied = session.acceptMesh(version, mesh);
      const done = session.acceptCurves(version, curves) || meshApplied;
      const pair = session.displayed;
      if (done && pair && pair.version === version) {
        viewer.setMesh(pair.mesh);
        renderFd(fdCanvas, pair.curves);
        renderPv(pvCanvas, pair.curves);
        const badge = pair.curves.bistable ? "bistable" : "monostable";
        const p = pair.curves.snap_pressure_mbar;
        const e = pair.curves.elongation_pct;
        status.textContent =
          `${badge} | snap ${p === null ? "-" : p.toFixed(1)} mbar | ` +
          `elongation ${e === null ? "-" : e.toFixed(1)} % | ` +
          `V ${pair.mesh.report.signed_volume_mm3.toFixed(0)} mm^3`;
      }
    } catch (err) {
      lastError = String(err);
      status.textContent = lastError;
    }
    exportBtn.disabled = lastError !== "";
  });

  // parameter panel
  const controls = bindControls(schema as never);
  const panel = el<HTMLDivElement>("panel");
  const inputs = new Map<string, HTMLInputElement>();
  for (const desc of controls) {
    const row = document.createElement("label");
    row.className = "control" + (desc.raw ? " raw" : "");
    const unit = desc.unit ? ` (${desc.unit})` : "";
    row.textContent = `${desc.section}.${desc.label}${unit}` +
      (desc.raw ? " [unknown field]" : "");
    const input = document.createElement("input");
    input.type = "number";
    if (desc.min !== undefined) input.min = String(desc.min);
    if (desc.max !== undefined) input.max = String(desc.max);
    input.step = desc.integer ? "1" : "any";
    input.addEventListener("change", () => {
      const v = clampValue(desc, Number(input.value));
      input.value = String(v);
      session.edit((cfg) => {
        const section = ((cfg as never)[desc.section] ??= {} as never);
        (section as Record<string, number>)[desc.field] = v;
      });
      refresher.poke();
    });
    inputs.set(`${desc.section}.${desc.field}`, input);
    row.appendChild(input);
    panel.appendChild(row);
  }

  function loadPreset(name: string): void {
    const doc = presets[name];
    const values = presetValues(doc as never);
    for (const [key, value] of values) {
      const input = inputs.get(key);
      if (input) input.value = String(value);
    }
    session.load({ schema: 1, preset: name });
    refresher.poke();
  }
  el<HTMLSelectElement>("preset").addEventListener("change", (e) => {
    loadPreset((e.target as HTMLSelectElement).value);
  });

  exportBtn.addEventListener("click", () => {
    const pair = session.displayed;
    if (!pair) return;
    const stl = writeBinaryStl(pair.mesh.vertices, pair.mesh.triangles);
    const bytes = new Uint8Array(new ArrayBuffer(stl.length));
    bytes.set(stl);
    download("meta_ori.stl", new Blob([bytes], { type: "model/stl" }));
    download("config.json",
             new Blob([configBlob(session.config)], { type: "application/json" }));
  });

  loadPreset("paper");
}

function download(name: string, blob: Blob): void {
  const a = document.createElement("a");
  a.href = URL.createObjectURL(blob);
  a.download = name;
  a.click();
  URL.revokeObjectURL(a.href);
}

boot();
