// Console entry: run list + run detail (live curve via SSE, rollout playback,
// reward diff across iterations, feedback form).

import { eventsUrl, fetchCurve, fetchRollout, fetchRun, fetchRuns, postFeedback } from "./api.js";
import { drawCurve } from "./chart.js";
import { diffLines, diffStats } from "./diff.js";
import { Player, renderFrame } from "./playback.js";
import { applyEvent, DetailState, initialState, withRun } from "./state.js";
import type { PlaybackFrame, RunEvent, RunView } from "./types.js";

const app = document.getElementById("app") as HTMLElement;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (HTMLElement | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) {
    if (k === "class") node.className = v;
    else node.setAttribute(k, v);
  }
  for (const child of children) {
    node.append(typeof child === "string" ? document.createTextNode(child) : child);
  }
  return node;
}

function statusBadge(status: string): HTMLElement {
  return el("span", { class: `badge badge-${status}` }, [status.replace("_", " ")]);
}

// --- run list ---

async function showRunList(): Promise<void> {
  app.replaceChildren(el("h1", {}, ["Reward runs"]), el("p", { class: "muted" }, ["loading…"]));
  let runs;
  try {
    runs = await fetchRuns();
  } catch (err) {
    app.replaceChildren(el("p", { class: "error" }, [`failed to load runs: ${err}`]));
    return;
  }
  const rows = runs.map((r) =>
    el("tr", { class: "run-row", "data-run": r.run_id }, [
      el("td", {}, [el("a", { href: `#/runs/${r.run_id}` }, [r.run_id])]),
      el("td", {}, [r.env_id]),
      el("td", { class: "instruction" }, [r.instruction]),
      el("td", {}, [r.mode]),
      el("td", {}, [String(r.iterations)]),
      el("td", {}, [statusBadge(r.status)]),
    ]),
  );
  app.replaceChildren(
    el("h1", {}, ["Reward runs"]),
    runs.length === 0
      ? el("p", { class: "muted" }, ["no runs yet — create one with the CLI: t2r run …"])
      : el("table", { class: "run-table" }, [
          el("thead", {}, [el("tr", {}, ["run", "env", "instruction", "mode", "iters", "status"]
            .map((h) => el("th", {}, [h])))]),
          el("tbody", {}, rows),
        ]),
  );
}

// --- run detail ---

class DetailView {
  state: DetailState = initialState();
  source: EventSource | null = null;
  player: Player;
  reconnectDelay = 1000;
  rolloutEp = 0;

  // DOM
  statusEl = el("span");
  iterLabel = el("span", { class: "muted" });
  curveCanvas = el("canvas", { width: "640", height: "240" });
  topCanvas = el("canvas", { width: "320", height: "300" });
  sideCanvas = el("canvas", { width: "320", height: "300" });
  frameLabel = el("span", { class: "muted" }, ["no rollout loaded"]);
  slider = el("input", { type: "range", min: "0", max: "0", value: "0" });
  playBtn = el("button", {}, ["play"]);
  diffBox = el("pre", { class: "diff" });
  diffLabel = el("div", { class: "muted" });
  description = el("textarea", { rows: "3", class: "wide" });
  improvement = el("textarea", { rows: "3", class: "wide" });
  submitBtn = el("button", { class: "primary" }, ["submit feedback"]);
  formMsg = el("div", { class: "muted" });
  banner = el("div", { class: "banner hidden" });

  constructor(readonly runId: string) {
    this.player = new Player((frame, index, total) => {
      renderFrame(this.topCanvas, this.sideCanvas, frame);
      this.frameLabel.textContent = `frame ${index + 1}/${total} — reward ${frame.reward.toFixed(3)}`;
      this.slider.max = String(total - 1);
      this.slider.value = String(index);
    });
  }

  async mount(): Promise<void> {
    app.replaceChildren(
      el("p", {}, [el("a", { href: "#/" }, ["← all runs"])]),
      el("h1", {}, [`Run ${this.runId}`]),
      this.banner,
      el("div", { class: "row" }, [el("strong", {}, ["status: "]), this.statusEl, this.iterLabel]),
      el("h2", {}, ["learning curve"]),
      this.curveCanvas,
      el("h2", {}, ["rollout playback"]),
      el("div", { class: "row" }, [this.playBtn, this.slider, this.frameLabel]),
      el("div", { class: "row" }, [this.topCanvas, this.sideCanvas]),
      el("h2", {}, ["reward code changes"]),
      this.diffLabel,
      this.diffBox,
      el("h2", {}, ["feedback"]),
      el("label", {}, ["what the rollout shows (prefilled from the server draft)"]),
      this.description,
      el("label", {}, ["improvement to request"]),
      this.improvement,
      el("div", { class: "row" }, [this.submitBtn, this.formMsg]),
    );
    this.playBtn.addEventListener("click", () => {
      if (this.player.playing) {
        this.player.pause();
        this.playBtn.textContent = "play";
      } else {
        this.player.play();
        this.playBtn.textContent = "pause";
      }
    });
    this.slider.addEventListener("input", () => {
      this.player.pause();
      this.playBtn.textContent = "play";
      this.player.seek(Number(this.slider.value));
    });
    this.submitBtn.addEventListener("click", () => void this.submit());

    await this.refetch();
    this.subscribe();
  }

  unmount(): void {
    this.source?.close();
    this.player.pause();
  }

  async refetch(): Promise<void> {
    try {
      const run = await fetchRun(this.runId);
      this.state = withRun(this.state, run);
      await this.renderRun(run);
    } catch (err) {
      this.showBanner(`failed to load run: ${err}`, true);
    }
  }

  async renderRun(run: RunView): Promise<void> {
    this.renderStatus();
    const last = run.iterations[run.iterations.length - 1];
    this.iterLabel.textContent = run.iterations.length > 0
      ? ` — ${run.iterations.length} iteration(s), latest success ` +
        `${(((last.evaluation.success_rate ?? 0) * 100)).toFixed(0)}%`
      : " — no completed iterations yet";

    if (run.iterations.length > 0) {
      try {
        drawCurve(this.curveCanvas, await fetchCurve(this.runId));
      } catch {
        /* curve may not exist yet */
      }
      try {
        const frames = await fetchRollout(this.runId, this.rolloutEp);
        this.player.load(frames);
      } catch {
        this.frameLabel.textContent = "no recorded rollout";
      }
      this.renderDiff(run);
      this.description.value = last.description_draft ?? "";
    }
    const awaiting = run.status === "awaiting_feedback";
    this.submitBtn.disabled = !awaiting;
    this.formMsg.textContent = awaiting ? "" : `feedback available once the run awaits it`;
  }

  renderDiff(run: RunView): void {
    const n = run.iterations.length;
    if (n === 0) return;
    if (n === 1) {
      this.diffLabel.textContent = "iteration 0 (initial generation)";
      this.diffBox.textContent = run.iterations[0].reward_source;
      return;
    }
    const prev = run.iterations[n - 2];
    const cur = run.iterations[n - 1];
    const lines = diffLines(prev.reward_source, cur.reward_source);
    const stats = diffStats(lines);
    this.diffLabel.textContent =
      `iter${prev.index} → iter${cur.index}: +${stats.added} −${stats.removed} lines`;
    this.diffBox.replaceChildren(
      ...lines.map((line) =>
        el("div", { class: `diff-${line.op}` },
          [`${line.op === "add" ? "+" : line.op === "del" ? "-" : " "} ${line.text}`]),
      ),
    );
  }

  renderStatus(): void {
    this.statusEl.replaceChildren(statusBadge(this.state.status));
  }

  subscribe(): void {
    this.source?.close();
    const source = new EventSource(eventsUrl(this.runId));
    this.source = source;
    source.onmessage = (msg) => {
      this.reconnectDelay = 1000;
      let event: RunEvent;
      try {
        event = JSON.parse(msg.data);
      } catch {
        return;
      }
      const before = this.state;
      this.state = applyEvent(this.state, event);
      if (this.state.status !== before.status) this.renderStatus();
      if (event.type === "eval" && this.state.liveCurve.length > 0) {
        drawCurve(this.curveCanvas, this.state.liveCurve);
      }
      if (this.state.needsRefetch) {
        // a new iteration just finished: re-read the record; no page reload
        void this.refetch();
      }
    };
    source.addEventListener("end", () => source.close());
    source.onerror = () => {
      source.close();
      if (this.source === source) {
        // reconnect with exponential backoff
        const delay = this.reconnectDelay;
        this.reconnectDelay = Math.min(delay * 2, 15000);
        setTimeout(() => {
          if (this.source === source) this.subscribe();
        }, delay);
      }
    };
  }

  async submit(): Promise<void> {
    const improvement = this.improvement.value.trim();
    if (!improvement) {
      this.formMsg.textContent = "improvement text is required";
      return;
    }
    this.submitBtn.disabled = true;
    this.formMsg.textContent = "submitting…";
    try {
      await postFeedback(this.runId, this.description.value, improvement);
      this.formMsg.textContent = "feedback accepted — generating the next iteration";
      this.improvement.value = "";
    } catch (err) {
      this.formMsg.textContent = `feedback failed (${err})`;
      this.submitBtn.disabled = false;
    }
  }

  showBanner(text: string, isError: boolean): void {
    this.banner.textContent = text;
    this.banner.className = `banner ${isError ? "banner-error" : ""}`;
  }
}

// --- router ---

let active: DetailView | null = null;

async function route(): Promise<void> {
  active?.unmount();
  active = null;
  const hash = window.location.hash;
  const match = hash.match(/^#\/runs\/(.+)$/);
  if (match) {
    active = new DetailView(decodeURIComponent(match[1]));
    await active.mount();
  } else {
    await showRunList();
  }
}

window.addEventListener("hashchange", () => void route());
void route();
