// Canvas 2D curve plots: force-displacement and pressure-volume with snap
// event markers and distinct inflation/deflation styling.

import type { CurvesResponse, Samples, SnapEvent } from "./types.js";

type Series = { x: number[]; y: number[]; color: string; label: string; dash?: number[] };

function drawAxes(ctx: CanvasRenderingContext2D, w: number, h: number,
                  xr: [number, number], yr: [number, number],
                  xlab: string, ylab: string) {
  ctx.clearRect(0, 0, w, h);
  ctx.fillStyle = "#1b1b1f";
  ctx.fillRect(0, 0, w, h);
  ctx.strokeStyle = "#555";
  ctx.strokeRect(40.5, 10.5, w - 55, h - 45);
  ctx.fillStyle = "#aaa";
  ctx.font = "11px sans-serif";
  ctx.fillText(xlab, w / 2 - 20, h - 6);
  ctx.save();
  ctx.translate(12, h / 2 + 20);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(ylab, 0, 0);
  ctx.restore();
  // zero line
  if (yr[0] < 0 && yr[1] > 0) {
    const y0 = mapY(0, yr, h);
    ctx.strokeStyle = "#777";
    ctx.beginPath();
    ctx.moveTo(40, y0);
    ctx.lineTo(w - 15, y0);
    ctx.stroke();
  }
}

function mapX(x: number, xr: [number, number], w: number): number {
  return 40 + (x - xr[0]) / (xr[1] - xr[0] || 1) * (w - 55);
}

function mapY(y: number, yr: [number, number], h: number): number {
  return 10 + (1 - (y - yr[0]) / (yr[1] - yr[0] || 1)) * (h - 45);
}

function plot(canvas: HTMLCanvasElement, series: Series[], events: SnapEvent[],
              xlab: string, ylab: string) {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const w = canvas.width, h = canvas.height;
  const xs = series.flatMap((s) => s.x);
  const ys = series.flatMap((s) => s.y);
  if (!xs.length) return;
  const xr: [number, number] = [Math.min(...xs), Math.max(...xs)];
  const yr: [number, number] = [Math.min(...ys), Math.max(...ys)];
  drawAxes(ctx, w, h, xr, yr, xlab, ylab);
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.setLineDash(s.dash ?? []);
    ctx.beginPath();
    s.x.forEach((x, i) => {
      const px = mapX(x, xr, w), py = mapY(s.y[i], yr, h);
      i === 0 ? ctx.moveTo(px, py) : ctx.lineTo(px, py);
    });
    ctx.stroke();
    ctx.setLineDash([]);
  }
  ctx.fillStyle = "#fff";
  for (const ev of events) {
    const px = mapX(ev.x, xr, w), py = mapY(ev.y, yr, h);
    ctx.beginPath();
    if (ev.kind.endsWith("max")) {
      ctx.moveTo(px, py - 5); ctx.lineTo(px - 4, py + 3); ctx.lineTo(px + 4, py + 3);
    } else {
      ctx.moveTo(px, py + 5); ctx.lineTo(px - 4, py - 3); ctx.lineTo(px + 4, py - 3);
    }
    ctx.closePath();
    ctx.fill();
  }
  // legend
  let lx = 48;
  for (const s of series) {
    ctx.fillStyle = s.color;
    ctx.fillText(s.label, lx, 22);
    lx += ctx.measureText(s.label).width + 14;
  }
}

export function renderFd(canvas: HTMLCanvasElement, curves: CurvesResponse): void {
  const fd = (s: Samples) => ({ x: s.d ?? [], y: s.F ?? [] });
  plot(canvas, [
    { ...fd(curves.fd_meta), color: "#5b9bd5", label: "F_meta" },
    { ...fd(curves.fd_ori), color: "#ed9f40", label: "F_ori" },
    { ...fd(curves.fd_combined), color: "#e15759", label: "F_el" },
  ], curves.events.filter((e) => e.kind.startsWith("force")),
    "d (mm)", "F (N)");
}

export function renderPv(canvas: HTMLCanvasElement, curves: CurvesResponse): void {
  plot(canvas, [
    { x: curves.pv.V ?? [], y: curves.pv.P ?? [], color: "#e15759", label: "P(V)" },
  ], curves.events.filter((e) => e.kind.startsWith("pressure")),
    "V (mL)", "P (mbar)");
}
