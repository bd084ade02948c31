// 2D rollout playback: top and side orthographic views of entity positions,
// a gripper open/close glyph, and a success banner on succeeding frames.

import { colorFor, DESK_SIDE, DESK_TOP, MOVER_SIDE, sideView, topView, Viewport, World } from "./projection.js";
import type { PlaybackFrame } from "./types.js";

export class Player {
  frames: PlaybackFrame[] = [];
  index = 0;
  playing = false;
  private timer: number | null = null;

  constructor(
    private readonly onFrame: (frame: PlaybackFrame, index: number, total: number) => void,
    private readonly fps = 20,
  ) {}

  load(frames: PlaybackFrame[]): void {
    this.pause();
    this.frames = frames;
    this.index = 0;
    if (frames.length > 0) this.emit();
  }

  seek(index: number): void {
    if (this.frames.length === 0) return;
    this.index = Math.max(0, Math.min(this.frames.length - 1, index));
    this.emit();
  }

  play(): void {
    if (this.playing || this.frames.length === 0) return;
    this.playing = true;
    this.timer = setInterval(() => {
      if (this.index >= this.frames.length - 1) {
        this.pause();
        return;
      }
      this.index++;
      this.emit();
    }, 1000 / this.fps) as unknown as number;
  }

  pause(): void {
    this.playing = false;
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  private emit(): void {
    this.onFrame(this.frames[this.index], this.index, this.frames.length);
  }
}

function isMoverFrame(frame: PlaybackFrame): boolean {
  return "trunk" in frame.positions && !("ee" in frame.positions);
}

function drawMarker(
  ctx: CanvasRenderingContext2D,
  x: number,
  y: number,
  name: string,
  gripper: number | undefined,
): void {
  ctx.fillStyle = colorFor(name);
  if (name === "ee") {
    // gripper glyph: two jaws, spread by openness
    const spread = 3 + 6 * (gripper ?? 1);
    ctx.fillRect(x - spread, y - 7, 3, 14);
    ctx.fillRect(x + spread - 3, y - 7, 3, 14);
    ctx.fillRect(x - spread, y - 9, 2 * spread, 3);
  } else if (name === "goal") {
    ctx.strokeStyle = colorFor(name);
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.arc(x, y, 7, 0, 2 * Math.PI);
    ctx.stroke();
  } else {
    ctx.fillRect(x - 6, y - 6, 12, 12);
  }
  ctx.fillStyle = "#334155";
  ctx.font = "10px sans-serif";
  ctx.fillText(name, x + 9, y + 3);
}

function drawView(
  canvas: HTMLCanvasElement,
  frame: PlaybackFrame,
  world: World,
  projector: (world: World, view: Viewport, p: [number, number, number]) => [number, number],
  label: string,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const view: Viewport = { width: canvas.width, height: canvas.height, margin: 16 };
  ctx.clearRect(0, 0, view.width, view.height);
  ctx.fillStyle = "#f8fafc";
  ctx.fillRect(0, 0, view.width, view.height);
  ctx.strokeStyle = "#cbd5e1";
  ctx.strokeRect(view.margin, view.margin, view.width - 2 * view.margin, view.height - 2 * view.margin);
  ctx.fillStyle = "#64748b";
  ctx.font = "11px sans-serif";
  ctx.fillText(label, view.margin + 4, view.margin - 4);

  for (const [name, pos] of Object.entries(frame.positions)) {
    const [x, y] = projector(world, view, pos);
    drawMarker(ctx, x, y, name, frame.gripper);
  }
  if (frame.success) {
    ctx.fillStyle = "#16a34a";
    ctx.font = "bold 13px sans-serif";
    ctx.fillText("SUCCESS", view.width - 84, view.margin + 14);
  }
}

export function renderFrame(
  topCanvas: HTMLCanvasElement,
  sideCanvas: HTMLCanvasElement,
  frame: PlaybackFrame,
): void {
  const mover = isMoverFrame(frame);
  const sideWorld = mover ? MOVER_SIDE : DESK_SIDE;
  drawView(topCanvas, frame, DESK_TOP, topView, "top view (x, y)");
  drawView(sideCanvas, frame, sideWorld, sideView, "side view (x, z)");
}
