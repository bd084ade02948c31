import { describe, expect, it } from "vitest";
import { applyEvent, initialState, withRun } from "../src/state.js";
import type { RunEvent, RunView } from "../src/types.js";

const iteration = (index: number) => ({
  index,
  rounds_used: 1,
  reward_hash: `h${index}`,
  reward_source: `def compute_dense_reward(action):\n    return ${index}.0\n`,
  evaluation: { success_rate: 0.5, mean_return: 10, n_episodes: 20 },
  rollout_files: ["ep00.jsonl"],
  description_draft: "draft",
  feedback: null,
});

const run = (status: string, iters: number): RunView => ({
  run_id: "r1",
  env_id: "stackcube_lite",
  instruction: "stack it",
  mode: "few_shot",
  status,
  iterations: Array.from({ length: iters }, (_, i) => iteration(i)),
});

const ev = (seq: number, extra: Partial<RunEvent>): RunEvent =>
  ({ seq, type: "status", ...extra }) as RunEvent;

describe("detail state reducer", () => {
  it("rendered status always equals the last status event", () => {
    let state = withRun(initialState(), run("training", 0));
    expect(state.status).toBe("training");
    state = applyEvent(state, ev(0, { status: "generating" }));
    expect(state.status).toBe("generating");
    state = applyEvent(state, ev(1, { status: "training", iteration: 0 }));
    expect(state.status).toBe("training");
    state = applyEvent(state, ev(2, { status: "awaiting_feedback", iteration: 0 }));
    expect(state.status).toBe("awaiting_feedback");
  });

  it("ignores replayed events by sequence number", () => {
    let state = withRun(initialState(), run("training", 0));
    state = applyEvent(state, ev(5, { status: "awaiting_feedback", iteration: 0 }));
    const replay = applyEvent(state, ev(3, { status: "failed" }));
    expect(replay.status).toBe("awaiting_feedback");
  });

  it("feedback round trip surfaces the new iteration without reload", () => {
    // run has iter0; user submits feedback; events stream generating ->
    // training(iter1) -> awaiting_feedback(iter1); state demands a refetch
    // and the refetched record shows 2 iterations
    let state = withRun(initialState(), run("awaiting_feedback", 1));
    expect(state.run?.iterations).toHaveLength(1);

    state = applyEvent(state, ev(10, { status: "generating", iteration: 1 }));
    state = applyEvent(state, ev(11, { status: "training", iteration: 1 }));
    expect(state.activeIteration).toBe(1);
    expect(state.liveCurve).toHaveLength(0);

    state = applyEvent(state, { seq: 12, type: "eval", step: 4000, success_rate: 0.2, mean_return: 50 });
    expect(state.liveCurve).toHaveLength(1);

    state = applyEvent(state, ev(13, { status: "awaiting_feedback", iteration: 1 }));
    expect(state.needsRefetch).toBe(true);

    state = withRun(state, run("awaiting_feedback", 2));
    expect(state.run?.iterations).toHaveLength(2);
    expect(state.needsRefetch).toBe(false);
    expect(state.activeIteration).toBe(1);
  });

  it("accumulates monotone eval points into the live curve", () => {
    let state = withRun(initialState(), run("training", 1));
    for (const [seq, step] of [[1, 4000], [2, 8000], [3, 12000]] as const) {
      state = applyEvent(state, { seq, type: "eval", step, success_rate: 0.1 * seq, mean_return: step / 100 });
    }
    expect(state.liveCurve.map((p) => p.step)).toEqual([4000, 8000, 12000]);
    const steps = state.liveCurve.map((p) => p.step);
    expect([...steps].sort((a, b) => a - b)).toEqual(steps);
  });
});
