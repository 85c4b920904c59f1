/**
 * DOM wiring for the decision console.
 *
 * Workflow: pick a region, set importance levels (or raw weights behind the
 * advanced toggle), click candidate sites to sketch the current allocation,
 * then run what-if optimizations and compare current vs proposed side by
 * side. All numbers come from the service; the URL always encodes the
 * current view so it can be shared.
 */

import { ApiClient, Job, RegionDescriptor, ScoreReport, ServiceError } from "./api.js";
import {
  COVERAGE_LEVELS,
  ConsoleState,
  EQUITY_LEVELS,
  clampBudget,
  fromQuery,
  jobRequest,
  recordJobResult,
  scoreRequest,
  setLevel,
  setRawWeight,
  toQuery,
  toggleSite,
} from "./state.js";
import {
  renderBanner,
  renderHistoryStrip,
  renderJobStatus,
  renderToast,
  viewCompare,
} from "./render.js";

const api = new ApiClient("");

let state: ConsoleState = fromQuery(window.location.search);
let regions: RegionDescriptor[] = [];
let currentReport: ScoreReport | null = null;
let proposedReport: ScoreReport | null = null;
let jobInFlight = false;

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function syncUrl(): void {
  window.history.replaceState(null, "", `?${toQuery(state)}`);
}

function selectedRegion(): RegionDescriptor | null {
  return regions.find((r) => r.id === state.regionId) ?? null;
}

function levelOptions(ladder: Record<string, number>, setting: { level: string }): string {
  const names: Record<string, string> = {
    less: "Less Important", somewhat: "Somewhat Important",
    important: "Important", very: "Very Important",
  };
  const opts = Object.keys(ladder).map((key) =>
    `<option value="${key}"${setting.level === key ? " selected" : ""}>${names[key]}</option>`);
  opts.push(`<option value="custom"${setting.level === "custom" ? " selected" : ""}>Custom</option>`);
  return opts.join("");
}

function renderControls(): void {
  const region = selectedRegion();
  const regionOpts = regions.map((r) =>
    `<option value="${r.id}"${r.id === state.regionId ? " selected" : ""}>` +
    `${r.name} (${r.m} areas, ${r.n} sites)</option>`).join("");
  $("controls").innerHTML = `
    <label>Region <select id="region"><option value="">choose...</option>${regionOpts}</select></label>
    <label>Coverage importance <select id="cov-level">${levelOptions(COVERAGE_LEVELS, state.coverage)}</select></label>
    <label>Equity importance <select id="eq-level">${levelOptions(EQUITY_LEVELS, state.equity)}</select></label>
    <label class="advanced">&lambda;1 <input id="cov-raw" type="number" step="any" value="${state.coverage.raw}"></label>
    <label class="advanced">&lambda;3 <input id="eq-raw" type="number" step="any" value="${state.equity.raw}"></label>
    <label>k <input id="k" type="number" min="1" max="${region ? region.n : 99}" value="${state.k}"></label>
    <label>target fraction <input id="p" type="number" step="0.01" min="0.01" max="1" value="${state.targetFraction}"></label>
    <label>seed <input id="seed" type="number" value="${state.seed}"></label>
    <button id="toggle-advanced" type="button">advanced</button>
    <button id="score-current" type="button" ${region ? "" : "disabled"}>score current</button>
    <button id="run-whatif" type="button" ${region && !jobInFlight ? "" : "disabled"}>run what-if</button>
  `;
  ($("region") as HTMLSelectElement).onchange = (ev) => {
    state = { ...state, regionId: (ev.target as HTMLSelectElement).value || null, currentSites: [] };
    currentReport = proposedReport = null;
    syncUrl();
    renderAll();
  };
  ($("cov-level") as HTMLSelectElement).onchange = (ev) => {
    const v = (ev.target as HTMLSelectElement).value;
    state = { ...state, coverage: v === "custom" ? setRawWeight(state.coverage.raw) : setLevel(COVERAGE_LEVELS, v) };
    syncUrl(); renderControls();
  };
  ($("eq-level") as HTMLSelectElement).onchange = (ev) => {
    const v = (ev.target as HTMLSelectElement).value;
    state = { ...state, equity: v === "custom" ? setRawWeight(state.equity.raw) : setLevel(EQUITY_LEVELS, v) };
    syncUrl(); renderControls();
  };
  ($("cov-raw") as HTMLInputElement).onchange = (ev) => {
    state = { ...state, coverage: setRawWeight(Number((ev.target as HTMLInputElement).value)) };
    syncUrl(); renderControls();
  };
  ($("eq-raw") as HTMLInputElement).onchange = (ev) => {
    state = { ...state, equity: setRawWeight(Number((ev.target as HTMLInputElement).value)) };
    syncUrl(); renderControls();
  };
  ($("k") as HTMLInputElement).onchange = (ev) => {
    state = { ...state, k: clampBudget(Number((ev.target as HTMLInputElement).value), region ? region.n : 1) };
    syncUrl(); renderControls();
  };
  ($("p") as HTMLInputElement).onchange = (ev) => {
    state = { ...state, targetFraction: Number((ev.target as HTMLInputElement).value) || 0.1 };
    syncUrl();
  };
  ($("seed") as HTMLInputElement).onchange = (ev) => {
    state = { ...state, seed: Math.round(Number((ev.target as HTMLInputElement).value)) || 0 };
    syncUrl();
  };
  $("toggle-advanced").onclick = () => $("controls").classList.toggle("show-advanced");
  $("score-current").onclick = () => { void scoreCurrent(); };
  $("run-whatif").onclick = () => { void runWhatIf(); };
}

function renderResults(): void {
  if (!currentReport) {
    $("results").innerHTML = `<p class="hint">Pick a region, click candidate sites
      on the map to sketch the current allocation, then score it or run a what-if.</p>`;
    return;
  }
  $("results").innerHTML = viewCompare(currentReport, proposedReport);
  for (const el of Array.from(document.querySelectorAll<SVGGElement>(".panes .site"))) {
    el.addEventListener("click", () => {
      const id = el.getAttribute("data-site");
      if (!id) return;
      state = toggleSite(state, id);
      syncUrl();
      void scoreCurrent();
    });
  }
}

function renderHistory(): void {
  $("history").innerHTML = renderHistoryStrip(state.history);
}

function renderAll(): void {
  renderControls();
  renderResults();
  renderHistory();
}

function showBanner(message: string): void {
  $("banner").innerHTML = renderBanner(message);
}

function clearBanner(): void {
  $("banner").innerHTML = "";
}

async function scoreCurrent(): Promise<void> {
  if (!state.regionId) return;
  try {
    currentReport = await api.score(scoreRequest(state, state.currentSites));
    clearBanner();
  } catch (err) {
    if (err instanceof ServiceError && err.status === 0) {
      showBanner("service unreachable; your settings are preserved");
      return; // state untouched
    }
    showBanner(err instanceof Error ? err.message : String(err));
    return;
  }
  renderResults();
}

async function runWhatIf(): Promise<void> {
  if (!state.regionId || jobInFlight) return;
  jobInFlight = true;
  renderControls();
  try {
    const { job_id } = await api.submitJob(jobRequest(state));
    state = { ...state, lastJobId: job_id };
    const job = await api.pollUntilDone(job_id, (j: Job) => {
      $("job-status").innerHTML = renderJobStatus(j);
    }, 1000);
    if (job.state === "failed" || !job.result) {
      showBanner(`optimization failed: ${job.error ?? "unknown error"}`);
      return;
    }
    proposedReport = await api.score(scoreRequest(state, job.result.result.site_ids));
    state = recordJobResult(state, job);
    if (!currentReport) await scoreCurrent();
    clearBanner();
    renderResults();
    renderHistory();
  } catch (err) {
    if (err instanceof ServiceError && err.status === 409) {
      $("banner").innerHTML = renderToast("job queue is full", "retry");
      const btn = document.querySelector<HTMLButtonElement>("#banner [data-action=retry]");
      if (btn) btn.onclick = () => { clearBanner(); void runWhatIf(); };
    } else if (err instanceof ServiceError && err.status === 0) {
      showBanner("service unreachable; your settings are preserved");
    } else {
      showBanner(err instanceof Error ? err.message : String(err));
    }
  } finally {
    jobInFlight = false;
    renderControls();
  }
}

async function boot(): Promise<void> {
  try {
    regions = await api.regions();
  } catch {
    showBanner("service unreachable; your settings are preserved");
  }
  if (!state.regionId && regions.length === 1) state.regionId = regions[0].id;
  renderAll();
  if (state.regionId && state.currentSites.length) void scoreCurrent();
}

void boot();
