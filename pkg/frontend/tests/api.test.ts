import assert from "node:assert/strict";
import { test } from "node:test";

import { ApiClient, Job, ServiceError } from "../src/api.js";
import { fixture, jsonResponse, scriptedFetch } from "./util.js";

test("regions hits GET /regions", async () => {
  const { fetchFn, calls } = scriptedFetch([[/\/regions$/, () => jsonResponse(fixture("regions.json"))]]);
  const client = new ApiClient("", fetchFn);
  const regions = await client.regions();
  assert.equal(regions.length, 1);
  assert.equal(regions[0].id, "demo");
  assert.equal(calls[0].init, undefined);
});

test("score posts the request body to /score", async () => {
  const { fetchFn, calls } = scriptedFetch([[/\/score$/, () => jsonResponse(fixture("score_current.json"))]]);
  const client = new ApiClient("", fetchFn);
  const report = await client.score({ region_id: "demo", site_ids: ["s00"], lambda1: 0.01 });
  assert.equal(report.kind, "score");
  const body = JSON.parse(String(calls[0].init?.body));
  assert.deepEqual(body.site_ids, ["s00"]);
  assert.equal(body.lambda1, 0.01);
  assert.equal(calls[0].init?.method, "POST");
});

test("submit then pollUntilDone walks the job through to done", async () => {
  const done = fixture<Job>("job_done.json");
  const running: Job = { ...done, state: "running", result: null,
    progress: { generation: 3, best_combined: 0.1 } };
  const { fetchFn } = scriptedFetch([
    [/\/jobs$/, () => jsonResponse({ job_id: done.id, state: "queued" }, 202)],
    [new RegExp(`/jobs/${done.id}$`), () => jsonResponse(running)],
    [new RegExp(`/jobs/${done.id}$`), () => jsonResponse(done)],
  ]);
  const client = new ApiClient("", fetchFn);
  const { job_id } = await client.submitJob({ region_id: "demo", k: 3, seed: 7 });
  const seen: string[] = [];
  const job = await client.pollUntilDone(job_id, (j) => seen.push(j.state), 0,
    async () => { /* no real waiting in tests */ });
  assert.deepEqual(seen, ["running", "done"]);
  assert.equal(job.state, "done");
  assert.ok(job.result);
});

test("HTTP errors surface as ServiceError with the payload detail", async () => {
  const { fetchFn } = scriptedFetch([
    [/\/jobs$/, () => jsonResponse({ detail: "job queue full" }, 409)],
  ]);
  const client = new ApiClient("", fetchFn);
  await assert.rejects(
    () => client.submitJob({ region_id: "demo", k: 1 }),
    (err: unknown) => err instanceof ServiceError && err.status === 409
      && err.message === "job queue full",
  );
});

test("network failures surface as status 0 (service unreachable)", async () => {
  const client = new ApiClient("", async () => { throw new Error("ECONNREFUSED"); });
  await assert.rejects(
    () => client.regions(),
    (err: unknown) => err instanceof ServiceError && err.status === 0,
  );
});
