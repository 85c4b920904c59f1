#!/usr/bin/env python3
"""Regenerate the web console's test fixtures from the real service.

The console's parity tests assert that every number it displays
string-matches service JSON, and that a fixed-seed what-if run renders the
same proposed site set as the CLI optimizer. Those fixtures must therefore
be genuine service/CLI output; this script produces them deterministically.
"""

import json
import tempfile
import time
from pathlib import Path

from fastapi.testclient import TestClient

from testalloc.cli import main as cli_main
from testalloc.ingest import SynthParams, save_region, save_sites, synth_region
from testalloc.service import create_app

SEED = 42
JOB_CONFIG = {"k": 3, "seed": 7, "population": 30, "generations": 25,
              "lambda1": 1e-2, "lambda3": 1.0}


def run(out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    work = Path(tempfile.mkdtemp(prefix="console-fixtures-"))

    region, sites = synth_region(SynthParams(m=18, seed=SEED, segregation=0.6, n_sites=9))
    sub = work / "demo"
    sub.mkdir(exist_ok=True)
    save_region(region, sub / "areas.csv", sub / "strata.csv")
    save_sites(sites, sub / "sites.csv")

    client = TestClient(create_app(data_dir=work))

    regions = client.get("/regions").json()
    (out_dir / "regions.json").write_text(json.dumps(regions, indent=2))

    current_ids = [s.id for s in sites[:3]]
    score_current = client.post("/score", json={
        "region_id": "demo", "site_ids": current_ids,
        "lambda1": 1e-2, "lambda3": 1.0}).json()
    (out_dir / "score_current.json").write_text(json.dumps(score_current, indent=2))

    job_id = client.post("/jobs", json={"region_id": "demo", **JOB_CONFIG}).json()["job_id"]
    for _ in range(600):
        job = client.get(f"/jobs/{job_id}").json()
        if job["state"] in ("done", "failed"):
            break
        time.sleep(0.02)
    assert job["state"] == "done", job
    (out_dir / "job_done.json").write_text(json.dumps(job, indent=2))

    proposed_ids = job["result"]["result"]["site_ids"]
    score_proposed = client.post("/score", json={
        "region_id": "demo", "site_ids": proposed_ids,
        "lambda1": 1e-2, "lambda3": 1.0}).json()
    (out_dir / "score_proposed.json").write_text(json.dumps(score_proposed, indent=2))

    alloc = work / "alloc.txt"
    alloc.write_text("\n".join(current_ids) + "\n")
    solve_out = work / "cli_solve.json"
    code = cli_main([
        "optimize", "--areas", str(sub / "areas.csv"), "--strata", str(sub / "strata.csv"),
        "--sites", str(sub / "sites.csv"), "--k", str(JOB_CONFIG["k"]),
        "--seed", str(JOB_CONFIG["seed"]), "--population", str(JOB_CONFIG["population"]),
        "--generations", str(JOB_CONFIG["generations"]), "--lambda1", "0.01",
        "--lambda3", "1.0", "--out", str(solve_out)])
    assert code == 0
    (out_dir / "cli_solve.json").write_text(solve_out.read_text())

    print(f"fixtures written to {out_dir}")
    print("current sites:", current_ids)
    print("proposed sites:", proposed_ids)


if __name__ == "__main__":
    run(Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures")
