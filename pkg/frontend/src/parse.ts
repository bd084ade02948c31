// Pure parsers for the wire formats: curve CSV, rollout JSON-lines, SSE data.

import type { CurvePoint, PlaybackFrame, RunEvent } from "./types.js";

export function parseCurveCsv(text: string): CurvePoint[] {
  const lines = text.trim().split("\n");
  if (lines.length === 0) return [];
  const out: CurvePoint[] = [];
  for (const line of lines.slice(1)) {
    if (!line.trim()) continue;
    const [step, meanReturn, successRate] = line.split(",");
    const point = {
      step: Number(step),
      meanReturn: Number(meanReturn),
      successRate: Number(successRate),
    };
    if (Number.isNaN(point.step) || Number.isNaN(point.successRate)) {
      throw new Error(`malformed curve row: ${line}`);
    }
    out.push(point);
  }
  return out;
}

export function parseRolloutJsonl(text: string): PlaybackFrame[] {
  const frames: PlaybackFrame[] = [];
  for (const line of text.split("\n")) {
    if (!line.trim()) continue;
    frames.push(JSON.parse(line) as PlaybackFrame);
  }
  // frames must arrive ordered by step
  for (let i = 1; i < frames.length; i++) {
    if (frames[i].step < frames[i - 1].step) {
      throw new Error(`rollout frames out of order at index ${i}`);
    }
  }
  return frames;
}

// Incremental server-sent-events decoder usable outside the browser's
// EventSource (and unit-testable): feed chunks, get parsed data events.
export class SseDecoder {
  private buffer = "";

  push(chunk: string): RunEvent[] {
    this.buffer += chunk;
    const events: RunEvent[] = [];
    let sep: number;
    while ((sep = this.buffer.indexOf("\n\n")) >= 0) {
      const block = this.buffer.slice(0, sep);
      this.buffer = this.buffer.slice(sep + 2);
      const dataLines = block
        .split("\n")
        .filter((l) => l.startsWith("data: "))
        .map((l) => l.slice(6));
      if (dataLines.length === 0) continue; // comment/keepalive or end event
      const payload = dataLines.join("\n");
      try {
        events.push(JSON.parse(payload) as RunEvent);
      } catch {
        // tolerate non-JSON payloads (e.g. the end sentinel)
      }
    }
    return events;
  }
}
