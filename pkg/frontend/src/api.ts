// HTTP client for the run service; the console performs no reward math,
// it only reads these endpoints and posts feedback.

import { parseCurveCsv, parseRolloutJsonl } from "./parse.js";
import type { CurvePoint, PlaybackFrame, RunListItem, RunView } from "./types.js";

export function runListUrl(base = ""): string {
  return `${base}/runs`;
}

export function runUrl(runId: string, base = ""): string {
  return `${base}/runs/${encodeURIComponent(runId)}`;
}

export function curveUrl(runId: string, iteration = -1, base = ""): string {
  const suffix = iteration >= 0 ? `?iteration=${iteration}` : "";
  return `${runUrl(runId, base)}/curve${suffix}`;
}

export function rolloutUrl(runId: string, ep: number, iteration = -1, base = ""): string {
  const suffix = iteration >= 0 ? `?iteration=${iteration}` : "";
  return `${runUrl(runId, base)}/rollouts/${ep}${suffix}`;
}

export function eventsUrl(runId: string, base = ""): string {
  return `${runUrl(runId, base)}/events`;
}

export function feedbackUrl(runId: string, base = ""): string {
  return `${runUrl(runId, base)}/feedback`;
}

async function ok(resp: Response): Promise<Response> {
  if (!resp.ok) {
    let detail = `${resp.status}`;
    try {
      const body = await resp.json();
      if (body.detail) detail = `${resp.status}: ${body.detail}`;
    } catch {
      /* non-JSON error body */
    }
    throw new Error(detail);
  }
  return resp;
}

export async function fetchRuns(base = ""): Promise<RunListItem[]> {
  return (await ok(await fetch(runListUrl(base)))).json();
}

export async function fetchRun(runId: string, base = ""): Promise<RunView> {
  return (await ok(await fetch(runUrl(runId, base)))).json();
}

export async function fetchCurve(runId: string, iteration = -1, base = ""): Promise<CurvePoint[]> {
  const resp = await ok(await fetch(curveUrl(runId, iteration, base)));
  return parseCurveCsv(await resp.text());
}

export async function fetchRollout(
  runId: string,
  ep: number,
  iteration = -1,
  base = "",
): Promise<PlaybackFrame[]> {
  const resp = await ok(await fetch(rolloutUrl(runId, ep, iteration, base)));
  return parseRolloutJsonl(await resp.text());
}

export async function postFeedback(
  runId: string,
  description: string,
  improvement: string,
  base = "",
): Promise<{ run_id: string; status: string }> {
  const resp = await ok(
    await fetch(feedbackUrl(runId, base), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ description, improvement }),
    }),
  );
  return resp.json();
}
