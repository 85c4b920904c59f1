"""HTTP service: region catalog, synchronous scoring, async optimize jobs.

Endpoints (JSON over HTTP/1.1, no auth; this is a deployment-local tool):

    GET  /regions      -> region catalog
    POST /score        -> score report (same numbers as the CLI `score`)
    POST /jobs         -> submit an optimize job, returns a job id
    GET  /jobs/{id}    -> job state, progress, and the solve report when done

Optimize runs can take minutes at county scale, so jobs are asynchronous:
submit, then poll for the generation counter and best-so-far trace. The
waiting queue is bounded (409 when full); at most ``workers`` jobs run at
once, each owning its solver state exclusively. The region catalog is
read-only after startup. Nothing persists across restarts.
"""

from __future__ import annotations

import argparse
import logging
import queue
import secrets
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from fastapi import Body, FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles

from .cli import ConfigError, RunConfig, assemble_instance
from .coverage import covered_indicators
from .domain import Allocation, CandidateSite, Region
from .gp_design import KernelSpec, ThetaGrid
from .ingest import load_problem
from .objective import ProblemInstance, equity_breakdown, evaluate
from .reporting import build_score_report, build_solve_report
from .solver import exhaustive_solve, ga_solve

log = logging.getLogger(__name__)

DEFAULT_QUEUE_SIZE = 8

# Request keys copied verbatim onto RunConfig; everything else is rejected.
_CONFIG_KEYS = (
    "k", "target_fraction", "budget_mode", "lambda1", "lambda2", "lambda3",
    "coverage_importance", "equity_importance", "kernel", "grid", "seed",
    "threads", "exact", "population", "generations", "crossover_rate",
    "mutation_rate", "elitism",
)
_PASSTHROUGH_KEYS = ("region_id", "site_ids", "name", "grid_points")


@dataclass(frozen=True)
class LoadedRegion:
    id: str
    name: str
    region: Region
    sites: tuple[CandidateSite, ...]

    def descriptor(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "m": self.region.m,
            "n": len(self.sites),
            "site_types": sorted({s.site_type for s in self.sites}),
        }


def load_catalog(data_dir: str | Path) -> list[LoadedRegion]:
    """Each subdirectory with areas.csv and sites.csv becomes one region."""
    out: list[LoadedRegion] = []
    root = Path(data_dir)
    for sub in sorted(p for p in root.iterdir() if p.is_dir()):
        areas = sub / "areas.csv"
        sites_path = sub / "sites.csv"
        if not areas.exists() or not sites_path.exists():
            continue
        strata = sub / "strata.csv"
        region, sites = load_problem(areas, strata if strata.exists() else None, sites_path)
        out.append(LoadedRegion(id=sub.name, name=sub.name.replace("_", " "),
                                region=region, sites=tuple(sites)))
    return out


@dataclass
class Job:
    id: str
    region_id: str
    config: dict
    state: str = "queued"
    progress: dict = field(default_factory=lambda: {"generation": 0, "best_combined": None})
    result: dict | None = None
    error: str | None = None

    def snapshot(self) -> dict:
        return {
            "id": self.id,
            "region_id": self.region_id,
            "state": self.state,
            "progress": dict(self.progress),
            "config": self.config,
            "result": self.result,
            "error": self.error,
        }


class JobManager:
    """Bounded waiting queue plus a fixed pool of worker threads.

    State transitions are queued -> running -> done|failed, guarded by one
    lock; each running job owns its instance and solver exclusively.
    """

    def __init__(self, catalog: dict[str, LoadedRegion], workers: int = 1,
                 queue_size: int = DEFAULT_QUEUE_SIZE):
        self._catalog = catalog
        self._jobs: dict[str, Job] = {}
        self._lock = threading.Lock()
        self._queue: queue.Queue[str] = queue.Queue(maxsize=queue_size)
        # workers=0 leaves the queue unserviced (useful to inspect queueing)
        for i in range(max(0, workers)):
            threading.Thread(target=self._worker, name=f"solve-worker-{i}", daemon=True).start()

    def submit(self, region_id: str, config: dict) -> Job:
        job = Job(id=secrets.token_hex(8), region_id=region_id, config=config)
        with self._lock:
            self._jobs[job.id] = job
        try:
            self._queue.put_nowait(job.id)
        except queue.Full:
            with self._lock:
                del self._jobs[job.id]
            raise HTTPException(status_code=409, detail="job queue full") from None
        return job

    def get(self, job_id: str) -> Job:
        with self._lock:
            job = self._jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"unknown job {job_id!r}")
        return job

    def _worker(self) -> None:
        while True:
            job_id = self._queue.get()
            with self._lock:
                job = self._jobs[job_id]
                job.state = "running"
            try:
                result = self._run(job)
                with self._lock:
                    job.result = result
                    job.state = "done"
            except Exception as exc:  # solve failures become job state, not crashes
                log.exception("job %s failed", job_id)
                with self._lock:
                    job.error = str(exc)
                    job.state = "failed"
            finally:
                self._queue.task_done()

    def _run(self, job: Job) -> dict:
        entry = self._catalog[job.region_id]
        instance, echo, cfg = instance_from_payload(entry, job.config)
        echo["exact"] = bool(cfg.exact)

        def on_generation(gen: int, best: float) -> bool:
            with self._lock:
                job.progress = {"generation": gen, "best_combined": best}
            return False

        locals_ = instance.local_designs(seed=cfg.seed, threads=cfg.threads)
        if cfg.exact:
            report = exhaustive_solve(instance, locals_)
        else:
            report = ga_solve(instance, cfg.ga_params(), locals_, on_generation=on_generation)
        with self._lock:
            job.progress = {"generation": len(report.history) - 1,
                            "best_combined": report.combined}
        return build_solve_report(instance, report, echo)


def instance_from_payload(entry: LoadedRegion, payload: dict,
                          k: int | None = None) -> tuple[ProblemInstance, dict, RunConfig]:
    """Build a ProblemInstance from an already-loaded region plus request config."""
    unknown = set(payload) - set(_CONFIG_KEYS) - set(_PASSTHROUGH_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    cfg = RunConfig()
    for key in _CONFIG_KEYS:
        if key in payload and payload[key] is not None:
            setattr(cfg, key, payload[key])
    grid: ThetaGrid | None = None
    if "grid_points" in payload and payload["grid_points"] is not None:
        try:
            grid = ThetaGrid(points=tuple(
                KernelSpec(sigma2=p[0], phi=p[1], tau2=p[2], family=cfg.kernel)
                for p in payload["grid_points"]))
        except (ValueError, TypeError, IndexError) as exc:
            raise ConfigError(f"bad grid_points: {exc}") from exc
    instance, echo = assemble_instance(entry.region, list(entry.sites), cfg,
                                       k=k, grid_override=grid)
    return instance, echo, cfg


def create_app(
    data_dir: str | Path | None = None,
    regions: Sequence[LoadedRegion] = (),
    workers: int = 1,
    queue_size: int = DEFAULT_QUEUE_SIZE,
    cors: bool = False,
    static_dir: str | Path | None = None,
) -> FastAPI:
    catalog: dict[str, LoadedRegion] = {r.id: r for r in regions}
    if data_dir is not None:
        for entry in load_catalog(data_dir):
            catalog[entry.id] = entry

    app = FastAPI(title="testalloc service")
    if cors:
        from fastapi.middleware.cors import CORSMiddleware
        app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                           allow_headers=["*"])
    manager = JobManager(catalog, workers=workers, queue_size=queue_size)
    app.state.catalog = catalog
    app.state.jobs = manager

    def entry_or_404(region_id: str) -> LoadedRegion:
        entry = catalog.get(region_id)
        if entry is None:
            raise HTTPException(status_code=404, detail=f"unknown region {region_id!r}")
        return entry

    @app.get("/regions")
    def list_regions() -> list[dict]:
        return [catalog[rid].descriptor() for rid in sorted(catalog)]

    @app.post("/score")
    def score(payload: dict = Body(...)) -> dict:
        region_id = payload.get("region_id")
        if not isinstance(region_id, str):
            raise HTTPException(status_code=422, detail="region_id is required")
        entry = entry_or_404(region_id)
        site_ids = payload.get("site_ids")
        if not isinstance(site_ids, list) or not all(isinstance(s, str) for s in site_ids):
            raise HTTPException(status_code=422, detail="site_ids must be a list of strings")
        try:
            instance, echo, cfg = instance_from_payload(
                entry, payload, k=payload.get("k", len(site_ids)))
            allocation = _allocation_from_ids(instance, site_ids)
            locals_ = instance.local_designs(seed=cfg.seed, threads=cfg.threads)
            triple, combined = evaluate(instance, allocation, locals_)
            breakdown = equity_breakdown(instance, allocation)
            e = covered_indicators(instance.stack, allocation)
        except (ConfigError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return build_score_report(instance, allocation, triple, combined, breakdown, e, echo)

    @app.post("/jobs", status_code=202)
    def submit_job(payload: dict = Body(...)) -> dict:
        region_id = payload.get("region_id")
        if not isinstance(region_id, str):
            raise HTTPException(status_code=422, detail="region_id is required")
        entry = entry_or_404(region_id)
        config = {k: v for k, v in payload.items() if k != "region_id"}
        try:
            # Validate before queueing so bad configs fail fast with 422.
            instance_from_payload(entry, config)
        except (ConfigError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        job = manager.submit(region_id, config)
        return {"job_id": job.id, "state": job.state}

    @app.get("/jobs/{job_id}")
    def poll_job(job_id: str) -> dict:
        return manager.get(job_id).snapshot()

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="console")

    return app


def _allocation_from_ids(instance: ProblemInstance, site_ids: list[str]) -> Allocation:
    index_of = {s.id: i for i, s in enumerate(instance.sites)}
    seen: set[str] = set()
    indices = []
    for sid in site_ids:
        if sid not in index_of:
            raise ConfigError(f"unknown site id {sid!r}")
        if sid in seen:
            raise ConfigError(f"duplicate site id {sid!r}")
        seen.add(sid)
        indices.append(index_of[sid])
    return Allocation.of(indices, budget=instance.budget)


def console_main() -> None:
    parser = argparse.ArgumentParser(prog="testalloc-service")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--data-dir", required=True,
                        help="directory of region subdirs (areas.csv, strata.csv, sites.csv)")
    parser.add_argument("--workers", type=int, default=1,
                        help="max concurrently running optimize jobs")
    parser.add_argument("--queue-size", type=int, default=DEFAULT_QUEUE_SIZE)
    parser.add_argument("--cors", action="store_true")
    parser.add_argument("--static", default=None,
                        help="directory of built console assets to serve at /")
    args = parser.parse_args()

    import uvicorn

    app = create_app(data_dir=args.data_dir, workers=args.workers,
                     queue_size=args.queue_size, cors=args.cors, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port)


if __name__ == "__main__":
    console_main()
