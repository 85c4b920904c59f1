/**
 * Pure view builders: report JSON in, HTML/SVG strings out.
 *
 * Single-source-of-truth rule: every numeric score shown here is the
 * payload value rendered verbatim with `show()`; nothing is recomputed
 * client-side. Geometry scaling for the SVG panes is presentation only.
 */

import type { EquityGroup, Job, ScoreReport } from "./api.js";
import type { HistoryEntry } from "./state.js";

/** Render a payload value exactly as received (no rounding, no math). */
export function show(value: number | string | null | undefined): string {
  if (value === null || value === undefined) return "-";
  return String(value);
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

// ------------------------------------------------------------------ map pane

const PANE_W = 360;
const PANE_H = 300;
const PAD = 24;

function extent(values: number[]): [number, number] {
  if (!values.length) return [0, 1];
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  return hi > lo ? [lo, hi] : [lo, lo + 1];
}

export function renderMapPane(report: ScoreReport, title: string): string {
  const areas = report.map.areas;
  const sites = report.map.sites;
  const [x0, x1] = extent([...areas.map((a) => a.x), ...sites.map((s) => s.x)]);
  const [y0, y1] = extent([...areas.map((a) => a.y), ...sites.map((s) => s.y)]);
  const sx = (x: number) => PAD + ((x - x0) / (x1 - x0)) * (PANE_W - 2 * PAD);
  const sy = (y: number) => PANE_H - PAD - ((y - y0) / (y1 - y0)) * (PANE_H - 2 * PAD);
  const maxPop = Math.max(1, ...areas.map((a) => a.population));

  const dots = areas.map((a) => {
    const r = 3 + 9 * Math.sqrt(a.population / maxPop);
    const cls = a.covered ? "area covered" : "area";
    return `<circle class="${cls}" cx="${sx(a.x).toFixed(1)}" cy="${sy(a.y).toFixed(1)}" r="${r.toFixed(1)}">` +
      `<title>${esc(a.id)}: population ${show(a.population)}${a.covered ? " (covered)" : ""}</title></circle>`;
  });
  const marks = sites.map((s) => {
    const cls = s.selected ? "site selected" : "site";
    const x = sx(s.x).toFixed(1);
    const y = sy(s.y).toFixed(1);
    return `<g class="${cls}" data-site="${esc(s.id)}">` +
      `<rect x="${(Number(x) - 5).toFixed(1)}" y="${(Number(y) - 5).toFixed(1)}" width="10" height="10"/>` +
      `<title>${esc(s.id)} (capacity ${show(s.capacity)})</title></g>`;
  });

  return `<figure class="map-pane"><figcaption>${esc(title)}</figcaption>` +
    `<svg viewBox="0 0 ${PANE_W} ${PANE_H}" role="img">${dots.join("")}${marks.join("")}</svg>` +
    `</figure>`;
}

// --------------------------------------------------------------- score table

const SCORE_ROWS: [keyof ScoreReport["scores"], string][] = [
  ["coverage", "Coverage score"],
  ["d_optimality", "D-optimality score"],
  ["equity", "Equity score"],
  ["combined", "Combined objective"],
];

export function renderScoreTable(current: ScoreReport, proposed: ScoreReport | null): string {
  const head = proposed
    ? "<tr><th></th><th>Current scheme</th><th>Proposed scheme</th></tr>"
    : "<tr><th></th><th>Current scheme</th></tr>";
  const rows = SCORE_ROWS.map(([key, label]) => {
    const cur = `<td data-cell="current-${key}">${show(current.scores[key])}</td>`;
    const pro = proposed
      ? `<td data-cell="proposed-${key}">${show(proposed.scores[key])}</td>`
      : "";
    return `<tr><th>${label}</th>${cur}${pro}</tr>`;
  });
  return `<table class="scores">${head}${rows.join("")}</table>`;
}

// -------------------------------------------------------------- equity panel

export function renderEquityPanel(report: ScoreReport, title: string): string {
  const marginal = report.equity_breakdown.marginal;
  const bars = report.equity_breakdown.groups.map((g: EquityGroup) => {
    const width = Math.max(0, Math.min(1, g.conditional)) * 100;
    const label = g.combo.join(" / ");
    return `<div class="equity-row"><span class="equity-label">${esc(label)}</span>` +
      `<span class="equity-bar"><span class="equity-fill" style="width:${width.toFixed(2)}%"></span>` +
      `<span class="equity-marginal" style="left:${(Math.max(0, Math.min(1, marginal)) * 100).toFixed(2)}%"></span></span>` +
      `<span class="equity-value" data-group="${esc(label)}">${show(g.conditional)}</span></div>`;
  });
  return `<section class="equity-panel"><h3>${esc(title)}</h3>` +
    `<p>marginal coverage probability: <b data-cell="marginal">${show(marginal)}</b></p>` +
    bars.join("") + `</section>`;
}

// ---------------------------------------------------------------- comparison

/**
 * The side-by-side view: two map panes (or one while no proposal exists),
 * the score table, and per-scheme equity panels.
 */
export function viewCompare(current: ScoreReport, proposed: ScoreReport | null): string {
  const panes = [renderMapPane(current, "Current allocation")];
  if (proposed) panes.push(renderMapPane(proposed, "Proposed allocation"));
  const equity = [renderEquityPanel(current, "Equity by group (current)")];
  if (proposed) equity.push(renderEquityPanel(proposed, "Equity by group (proposed)"));
  return `<div class="compare${proposed ? "" : " single"}">` +
    `<div class="panes">${panes.join("")}</div>` +
    renderScoreTable(current, proposed) +
    `<div class="equity">${equity.join("")}</div>` +
    `</div>`;
}

// -------------------------------------------------------------------- extras

export function renderTrace(trace: number[], generation: number, best: number | null): string {
  const note = `generation ${generation}` + (best === null ? "" : `, best ${show(best)}`);
  if (!trace.length) {
    return `<div class="trace" data-generation="${generation}">${esc(note)}</div>`;
  }
  const [lo, hi] = extent(trace);
  const w = 320;
  const h = 80;
  const pts = trace.map((v, i) => {
    const x = (i / Math.max(1, trace.length - 1)) * w;
    const y = h - ((v - lo) / (hi - lo)) * (h - 8) - 4;
    return `${x.toFixed(1)},${y.toFixed(1)}`;
  });
  return `<div class="trace" data-generation="${generation}">` +
    `<svg viewBox="0 0 ${w} ${h}"><polyline points="${pts.join(" ")}"/></svg>` +
    `<span>${esc(note)}</span></div>`;
}

export function renderHistoryStrip(history: HistoryEntry[]): string {
  if (!history.length) return `<div class="history empty">no prior runs</div>`;
  const items = history.map((entry, i) =>
    `<li data-run="${i}">seed ${entry.seed}, k=${entry.k}, ` +
    `w=(${show(entry.coverageWeight)}, ${show(entry.equityWeight)}) ` +
    `&rarr; ${esc(entry.siteIds.join(","))} (combined ${show(entry.combined)})</li>`);
  return `<div class="history"><h3>previous runs</h3><ol>${items.join("")}</ol></div>`;
}

export function renderBanner(message: string): string {
  return `<div class="banner error">${esc(message)}</div>`;
}

export function renderToast(message: string, retryLabel = "retry"): string {
  return `<div class="toast">${esc(message)} <button data-action="retry">${esc(retryLabel)}</button></div>`;
}

export function renderJobStatus(job: Job): string {
  return renderTrace(job.result ? job.result.trace : [],
    job.progress.generation, job.progress.best_combined);
}
