import assert from "node:assert/strict";
import { test } from "node:test";

import {
  COVERAGE_LEVELS,
  EQUITY_LEVELS,
  HISTORY_LIMIT,
  WEIGHT_MAX,
  WEIGHT_MIN,
  clampBudget,
  clampWeight,
  fromQuery,
  initialState,
  pushHistory,
  setLevel,
  setRawWeight,
  toQuery,
  toggleSite,
} from "../src/state.js";

test("importance ladders carry the recommended magnitudes", () => {
  assert.deepEqual(COVERAGE_LEVELS, { less: 1e-6, somewhat: 1e-4, important: 1e-2, very: 1 });
  assert.deepEqual(EQUITY_LEVELS, { less: 1e-4, somewhat: 1e-2, important: 1, very: 100 });
});

test("weight controls clamp into the recommended window", () => {
  assert.equal(clampWeight(1e-12), WEIGHT_MIN);
  assert.equal(clampWeight(1e9), WEIGHT_MAX);
  assert.equal(clampWeight(0.5), 0.5);
  assert.equal(clampWeight(Number.NaN), WEIGHT_MIN);
  assert.equal(setRawWeight(-3).raw, WEIGHT_MIN);
  assert.equal(setRawWeight(-3).level, "custom");
});

test("budget clamps to 1..n", () => {
  assert.equal(clampBudget(0, 10), 1);
  assert.equal(clampBudget(25, 10), 10);
  assert.equal(clampBudget(4.6, 10), 5);
});

test("setLevel resolves ladder keys and falls back to custom", () => {
  assert.deepEqual(setLevel(EQUITY_LEVELS, "very"), { level: "very", raw: 100 });
  assert.deepEqual(setLevel(EQUITY_LEVELS, "0.25"), { level: "custom", raw: 0.25 });
});

test("toggleSite adds then removes", () => {
  let s = initialState();
  s = toggleSite(s, "s3");
  s = toggleSite(s, "s1");
  assert.deepEqual(s.currentSites, ["s3", "s1"]);
  s = toggleSite(s, "s3");
  assert.deepEqual(s.currentSites, ["s1"]);
});

test("url query round trip reconstructs the shareable state", () => {
  let s = initialState();
  s.regionId = "fulton";
  s.coverage = setLevel(COVERAGE_LEVELS, "very");
  s.equity = setRawWeight(0.125);
  s.k = 6;
  s.targetFraction = 0.2;
  s.seed = 42;
  s = toggleSite(s, "s2");
  s = toggleSite(s, "s7");

  const back = fromQuery(toQuery(s));
  assert.equal(back.regionId, "fulton");
  assert.deepEqual(back.coverage, { level: "very", raw: 1 });
  assert.deepEqual(back.equity, { level: "custom", raw: 0.125 });
  assert.equal(back.k, 6);
  assert.equal(back.targetFraction, 0.2);
  assert.equal(back.seed, 42);
  assert.deepEqual(back.currentSites, ["s2", "s7"]);
});

test("fromQuery tolerates an empty query", () => {
  const s = fromQuery("");
  assert.equal(s.regionId, null);
  assert.equal(s.k, 3);
});

test("history strip keeps at least five prior runs", () => {
  let s = initialState();
  for (let i = 0; i < 12; i++) {
    s = pushHistory(s, {
      seed: i, coverageWeight: 0.01, equityWeight: 1, k: 3,
      siteIds: [`s${i}`], combined: i,
    });
  }
  assert.ok(HISTORY_LIMIT >= 5);
  assert.equal(s.history.length, HISTORY_LIMIT);
  assert.equal(s.history[0].seed, 11); // newest first
});
