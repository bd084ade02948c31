// Run-detail view state: everything derives from the record fetched over
// HTTP plus the SSE event stream; the rendered status always equals the
// last status event received.

import type { CurvePoint, RunEvent, RunView } from "./types.js";

export interface DetailState {
  run: RunView | null;
  status: string;
  liveCurve: CurvePoint[]; // eval points streamed for the active iteration
  activeIteration: number;
  lastSeq: number;
  needsRefetch: boolean; // a new iteration completed; record must be re-read
}

export function initialState(): DetailState {
  return {
    run: null,
    status: "unknown",
    liveCurve: [],
    activeIteration: -1,
    lastSeq: -1,
    needsRefetch: false,
  };
}

export function withRun(state: DetailState, run: RunView): DetailState {
  return {
    ...state,
    run,
    status: run.status,
    activeIteration: run.iterations.length > 0
      ? run.iterations[run.iterations.length - 1].index
      : -1,
    needsRefetch: false,
  };
}

export function applyEvent(state: DetailState, event: RunEvent): DetailState {
  if (event.seq <= state.lastSeq) return state; // replayed history
  const next: DetailState = { ...state, lastSeq: event.seq };
  if (event.type === "status" && event.status) {
    next.status = event.status;
    if (
      (event.status === "awaiting_feedback" || event.status === "done") &&
      event.iteration !== undefined &&
      state.run !== null &&
      !state.run.iterations.some((it) => it.index === event.iteration)
    ) {
      next.needsRefetch = true; // new iteration landed; pull the record again
    }
    if (event.status === "training" && event.iteration !== undefined &&
        event.iteration !== state.activeIteration) {
      next.activeIteration = event.iteration;
      next.liveCurve = [];
    }
  } else if (event.type === "eval" && event.step !== undefined) {
    next.liveCurve = [
      ...state.liveCurve,
      {
        step: event.step,
        meanReturn: event.mean_return ?? 0,
        successRate: event.success_rate ?? 0,
      },
    ];
  }
  return next;
}
