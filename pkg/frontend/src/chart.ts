// Minimal canvas line chart for learning curves (success rate on [0,1] left
// axis, mean return auto-scaled right axis).

import type { CurvePoint } from "./types.js";

export interface ChartLayout {
  width: number;
  height: number;
  margin: number;
}

export function xScale(points: CurvePoint[], layout: ChartLayout): (step: number) => number {
  const maxStep = Math.max(1, ...points.map((p) => p.step));
  return (step) =>
    layout.margin + (step / maxStep) * (layout.width - 2 * layout.margin);
}

export function yScaleUnit(layout: ChartLayout): (v: number) => number {
  return (v) => layout.height - layout.margin - v * (layout.height - 2 * layout.margin);
}

export function yScaleReturn(points: CurvePoint[], layout: ChartLayout): (v: number) => number {
  const values = points.map((p) => p.meanReturn);
  const lo = Math.min(0, ...values);
  const hi = Math.max(1, ...values);
  return (v) =>
    layout.height - layout.margin - ((v - lo) / (hi - lo)) * (layout.height - 2 * layout.margin);
}

export function drawCurve(canvas: HTMLCanvasElement, points: CurvePoint[]): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const layout: ChartLayout = { width: canvas.width, height: canvas.height, margin: 36 };
  ctx.clearRect(0, 0, layout.width, layout.height);
  ctx.fillStyle = "#f8fafc";
  ctx.fillRect(0, 0, layout.width, layout.height);

  ctx.strokeStyle = "#cbd5e1";
  ctx.strokeRect(layout.margin, layout.margin,
    layout.width - 2 * layout.margin, layout.height - 2 * layout.margin);

  if (points.length === 0) {
    ctx.fillStyle = "#64748b";
    ctx.fillText("no evaluation points yet", layout.margin + 8, layout.height / 2);
    return;
  }
  const fx = xScale(points, layout);
  const fySucc = yScaleUnit(layout);
  const fyRet = yScaleReturn(points, layout);

  const drawLine = (fy: (v: number) => number, pick: (p: CurvePoint) => number, color: string) => {
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    points.forEach((p, i) => {
      const [x, y] = [fx(p.step), fy(pick(p))];
      if (i === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    });
    ctx.stroke();
  };
  drawLine(fyRet, (p) => p.meanReturn, "#94a3b8");
  drawLine(fySucc, (p) => p.successRate, "#dc2626");

  ctx.fillStyle = "#dc2626";
  ctx.fillText("success rate", layout.margin + 6, layout.margin - 8);
  ctx.fillStyle = "#94a3b8";
  ctx.fillText("mean return", layout.margin + 96, layout.margin - 8);
  ctx.fillStyle = "#0f172a";
  const last = points[points.length - 1];
  ctx.fillText(`step ${last.step}  success ${(last.successRate * 100).toFixed(0)}%`,
    layout.margin + 6, layout.height - 10);
}
