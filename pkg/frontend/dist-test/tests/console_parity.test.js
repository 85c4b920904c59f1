/**
 * Console acceptance: every score the comparison view displays string-matches
 * the service JSON it was given, and a fixed-seed what-if run renders the
 * same proposed site set as the command-line optimizer.
 *
 * The fixtures are genuine service and CLI output, regenerated by
 * scripts/make_console_fixtures.py in the repository root.
 */
import assert from "node:assert/strict";
import { test } from "node:test";
import { ApiClient } from "../src/api.js";
import { renderEquityPanel, renderHistoryStrip, renderTrace, viewCompare } from "../src/render.js";
import { initialState, recordJobResult } from "../src/state.js";
import { fixture, jsonResponse, scriptedFetch } from "./util.js";
const SCORE_KEYS = ["coverage", "d_optimality", "equity", "combined"];
function cell(html, name) {
    const match = html.match(new RegExp(`data-cell="${name}">([^<]*)<`));
    assert.ok(match, `missing cell ${name}`);
    return match[1];
}
test("every displayed score string-matches the service JSON", () => {
    const current = fixture("score_current.json");
    const proposed = fixture("score_proposed.json");
    const html = viewCompare(current, proposed);
    for (const key of SCORE_KEYS) {
        const want = current.scores[key] === null ? "-" : String(current.scores[key]);
        assert.equal(cell(html, `current-${key}`), want, `current ${key}`);
        const wantP = proposed.scores[key] === null ? "-" : String(proposed.scores[key]);
        assert.equal(cell(html, `proposed-${key}`), wantP, `proposed ${key}`);
    }
    // equity panel values come through verbatim too
    const equityHtml = renderEquityPanel(current, "x");
    assert.equal(cell(equityHtml, "marginal"), String(current.equity_breakdown.marginal));
    for (const g of current.equity_breakdown.groups) {
        const label = g.combo.join(" / ");
        const m = equityHtml.match(new RegExp(`data-group="${label}">([^<]*)<`));
        assert.ok(m, `missing group ${label}`);
        assert.equal(m[1], String(g.conditional));
    }
});
test("map panes tint covered areas and mark selected sites from the payload", () => {
    const current = fixture("score_current.json");
    const html = viewCompare(current, null);
    assert.ok(html.includes('class="compare single"'), "single-pane mode without a proposal");
    const covered = current.map.areas.filter((a) => a.covered).length;
    assert.equal((html.match(/class="area covered"/g) ?? []).length, covered);
    const selected = current.map.sites.filter((s) => s.selected).map((s) => s.id);
    for (const id of selected) {
        assert.ok(new RegExp(`class="site selected" data-site="${id}"`).test(html), id);
    }
});
test("fixed-seed what-if renders the same proposed sites as the CLI optimizer", async () => {
    const jobDone = fixture("job_done.json");
    const scoreProposed = fixture("score_proposed.json");
    const scoreCurrent = fixture("score_current.json");
    const cliSolve = fixture("cli_solve.json");
    // drive the exact call sequence the console uses for a what-if run
    const { fetchFn } = scriptedFetch([
        [/\/jobs$/, () => jsonResponse({ job_id: jobDone.id, state: "queued" }, 202)],
        [new RegExp(`/jobs/${jobDone.id}$`), () => jsonResponse(jobDone)],
        [/\/score$/, () => jsonResponse(scoreProposed)],
    ]);
    const client = new ApiClient("", fetchFn);
    let state = initialState();
    state.regionId = "demo";
    state.seed = Number(jobDone.config.seed);
    state.k = Number(jobDone.config.k);
    const { job_id } = await client.submitJob({ region_id: "demo", k: state.k, seed: state.seed });
    const job = await client.pollUntilDone(job_id, undefined, 0, async () => undefined);
    assert.equal(job.state, "done");
    const proposedIds = job.result.result.site_ids;
    // same seed, same proposed set as the CLI's optimize report
    assert.equal(Number(jobDone.config.seed), cliSolve.config.seed);
    assert.deepEqual(proposedIds, cliSolve.result.site_ids);
    const proposed = await client.score({ region_id: "demo", site_ids: proposedIds });
    const html = viewCompare(scoreCurrent, proposed);
    for (const id of cliSolve.result.site_ids) {
        assert.ok(new RegExp(`class="site selected" data-site="${id}"`).test(html), `proposed pane must mark ${id}`);
    }
    // and the proposed pane's combined score is the payload string
    assert.equal(cell(html, "proposed-combined"), String(proposed.scores.combined));
    state = recordJobResult(state, job);
    const strip = renderHistoryStrip(state.history);
    assert.ok(strip.includes(cliSolve.result.site_ids.join(",")));
});
test("identical allocations render identical panes", () => {
    const current = fixture("score_current.json");
    const html = viewCompare(current, current);
    const svgs = html.match(/<svg[\s\S]*?<\/svg>/g) ?? [];
    assert.equal(svgs.length, 2);
    assert.equal(svgs[0], svgs[1]);
    for (const key of SCORE_KEYS) {
        assert.equal(cell(html, `current-${key}`), cell(html, `proposed-${key}`));
    }
});
test("trace rendering carries the generation counter and best value", () => {
    const jobDone = fixture("job_done.json");
    const html = renderTrace(jobDone.result.trace, jobDone.progress.generation, jobDone.progress.best_combined);
    assert.ok(html.includes(`data-generation="${jobDone.progress.generation}"`));
    assert.ok(html.includes("polyline"));
    assert.ok(html.includes(String(jobDone.progress.best_combined)));
});
