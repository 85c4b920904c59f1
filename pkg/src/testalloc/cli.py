"""Command-line front door: score allocations, optimize, compare, make fixtures.

Exit codes: 0 success, 2 usage or config error, 3 runtime solve failure.

Configuration comes from defaults, then an optional flat ``key = value``
config file, then command-line flags (highest precedence). Every config key
has a flag of the same name.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import signal
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .domain import Allocation, Weights
from .ga_core import GaParams
from .gp_design import KernelSpec, ThetaGrid, default_theta_grid
from .ingest import SynthParams, load_problem, save_region, save_sites, synth_region
from .objective import ProblemInstance, equity_breakdown, evaluate
from .coverage import covered_indicators
from .reporting import (
    build_compare_report,
    build_score_report,
    build_solve_report,
    render_compare_table,
    render_score_summary,
    write_json,
)
from .solver import compare_schemes, exhaustive_solve, ga_solve

# Recommended weight magnitudes per importance level, one ladder per criterion.
COVERAGE_IMPORTANCE = {"less": 1e-6, "somewhat": 1e-4, "important": 1e-2, "very": 1e0}
EQUITY_IMPORTANCE = {"less": 1e-4, "somewhat": 1e-2, "important": 1e0, "very": 1e2}


class ConfigError(Exception):
    pass


class SolveError(Exception):
    pass


def normalize_importance(label: str) -> str:
    """Map 'Very Important', 'very_important', 'very' ... onto the level key."""
    key = label.strip().lower().replace("_", " ").replace("-", " ")
    if key.endswith("important"):
        key = key[: -len("important")].strip()
        if key == "":
            key = "important"
    if key not in COVERAGE_IMPORTANCE:
        raise ConfigError(
            f"unknown importance level {label!r}; expected one of "
            "less/somewhat/important/very (optionally suffixed 'important')")
    return key


@dataclass
class RunConfig:
    areas: str | None = None
    strata: str | None = None
    sites: str | None = None
    ownership: str = "all"
    k: int | None = None
    target_fraction: float = 0.1
    budget_mode: str = "exact"
    lambda1: float | None = None
    lambda2: float | None = None
    lambda3: float | None = None
    coverage_importance: str | None = None
    equity_importance: str | None = None
    kernel: str = "exponential"
    grid_file: str | None = None
    grid: str | None = None
    seed: int = 0
    threads: int = 1
    exact: bool = False
    out: str | None = None
    population: int = 60
    generations: int = 200
    crossover_rate: float = 0.8
    mutation_rate: float = 0.1
    elitism: int = 2
    synth: bool = False
    synth_m: int = 25
    synth_segregation: float = 0.0
    synth_n_sites: int | None = None
    synth_pop_min: int = 500
    synth_pop_max: int = 2000
    synth_cell_km: float = 2.0
    synth_site_capacity: float = 1120.0

    def resolved_weights(self) -> Weights:
        l1 = self.lambda1
        if l1 is None:
            l1 = COVERAGE_IMPORTANCE[normalize_importance(self.coverage_importance)] \
                if self.coverage_importance else 1e-2
        l3 = self.lambda3
        if l3 is None:
            l3 = EQUITY_IMPORTANCE[normalize_importance(self.equity_importance)] \
                if self.equity_importance else 1.0
        l2 = self.lambda2 if self.lambda2 is not None else 0.0
        try:
            return Weights(lambda1=l1, lambda2=l2, lambda3=l3)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def ga_params(self) -> GaParams:
        return GaParams(population_size=self.population, generations=self.generations,
                        crossover_rate=self.crossover_rate, mutation_rate=self.mutation_rate,
                        elitism=self.elitism, seed=self.seed)


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(RunConfig)}
_BOOL_KEYS = {"exact", "synth"}


def _coerce(key: str, value: str):
    if key in _BOOL_KEYS:
        if str(value).strip().lower() in ("1", "true", "yes", "on"):
            return True
        if str(value).strip().lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"config key {key!r} expects a boolean, got {value!r}")
    target = str(_FIELD_TYPES.get(key, "str"))
    if "int" in target and "float" not in target:
        try:
            return int(value)
        except ValueError:
            raise ConfigError(f"config key {key!r} expects an integer, got {value!r}") from None
    if "float" in target:
        try:
            return float(value)
        except ValueError:
            raise ConfigError(f"config key {key!r} expects a number, got {value!r}") from None
    return value


def parse_config_file(path: str) -> dict:
    """Flat ``key = value`` document. `#` comments, blank lines, quoted strings."""
    out: dict = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().lower().replace("-", "_")
        value = value.strip()
        if len(value) >= 2 and value[0] == value[-1] and value[0] in "'\"":
            value = value[1:-1]
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        out[key] = _coerce(key, value)
    return out


def merge_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        for key, value in parse_config_file(args.config).items():
            setattr(cfg, key, value)
    for key in _FIELD_TYPES:
        if hasattr(args, key) and getattr(args, key) is not None:
            setattr(cfg, key, getattr(args, key))
    return cfg


def _load_grid(cfg: RunConfig, region) -> ThetaGrid | None:
    source = cfg.grid_file or cfg.grid
    if source is None:
        return None
    if source == "default":
        return default_theta_grid(region, family=cfg.kernel)
    try:
        doc = json.loads(Path(source).read_text(encoding="utf-8"))
        family = doc.get("family", cfg.kernel)
        points = tuple(KernelSpec(sigma2=p[0], phi=p[1], tau2=p[2], family=family)
                       for p in doc["points"])
        return ThetaGrid(points=points)
    except (OSError, KeyError, ValueError, TypeError, IndexError) as exc:
        raise ConfigError(f"cannot load theta grid from {source}: {exc}") from exc


def assemble_instance(region, sites, cfg: RunConfig, k: int | None = None,
                      grid_override: ThetaGrid | None = None) -> tuple[ProblemInstance, dict]:
    """Assemble a ProblemInstance from loaded data plus a RunConfig.

    Shared by the CLI (after loading files) and the HTTP service (after
    looking up a preloaded region), so both interfaces resolve weights,
    grids, and budgets identically.
    """
    weights = cfg.resolved_weights()
    for warning in weights.range_warnings():
        print(f"warning: {warning}", file=sys.stderr)
    if not sites:
        raise ConfigError("no candidate sites available after filtering")

    grid = grid_override if grid_override is not None else _load_grid(cfg, region)
    if weights.lambda2 > 0 and grid is None:
        raise ConfigError("grid required: lambda2 > 0 needs a theta grid "
                          "(--grid-file FILE or grid = default)")

    budget = k if k is not None else cfg.k
    if budget is None:
        raise ConfigError("k (number of sites to operate) is required")
    if not (0 <= budget <= len(sites)):
        raise ConfigError(f"k={budget} out of range for {len(sites)} candidate sites")

    try:
        instance = ProblemInstance.build(
            region=region, sites=sites, weights=weights, budget=budget,
            target_fraction=cfg.target_fraction, grid=grid, budget_mode=cfg.budget_mode)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    echo = {
        "seed": cfg.seed,
        "ownership": cfg.ownership,
        "kernel": cfg.kernel,
        "ga": {"population_size": cfg.population, "generations": cfg.generations,
               "crossover_rate": cfg.crossover_rate, "mutation_rate": cfg.mutation_rate,
               "elitism": cfg.elitism},
    }
    if cfg.coverage_importance:
        echo["coverage_importance"] = normalize_importance(cfg.coverage_importance)
    if cfg.equity_importance:
        echo["equity_importance"] = normalize_importance(cfg.equity_importance)
    return instance, echo


def build_instance(cfg: RunConfig, k: int | None = None) -> tuple[ProblemInstance, dict]:
    """Load (or synthesize) the problem data and assemble the instance."""
    if cfg.synth:
        params = SynthParams(
            m=cfg.synth_m, segregation=cfg.synth_segregation,
            n_sites=cfg.synth_n_sites,
            population_range=(cfg.synth_pop_min, cfg.synth_pop_max),
            cell_km=cfg.synth_cell_km, site_capacity=cfg.synth_site_capacity,
            seed=cfg.seed)
        region, sites = synth_region(params)
    else:
        if not cfg.areas or not cfg.sites:
            raise ConfigError("either --synth or both --areas and --sites are required")
        region, sites = load_problem(cfg.areas, cfg.strata, cfg.sites, ownership=cfg.ownership)
    return assemble_instance(region, sites, cfg, k=k)


def read_allocation_ids(path: str) -> list[str]:
    """Site ids, one per line (commas also accepted); '#' comments skipped."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read allocation file {path}: {exc}") from exc
    ids: list[str] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        ids.extend(tok.strip() for tok in line.split(",") if tok.strip())
    return ids


def allocation_from_ids(instance: ProblemInstance, ids: Sequence[str],
                        budget: int | None = None) -> Allocation:
    index_of = {s.id: i for i, s in enumerate(instance.sites)}
    seen: set[str] = set()
    indices = []
    for sid in ids:
        if sid not in index_of:
            raise ConfigError(f"unknown site id {sid!r}")
        if sid in seen:
            raise ConfigError(f"duplicate site id {sid!r}")
        seen.add(sid)
        indices.append(index_of[sid])
    return Allocation.of(indices, budget=instance.budget if budget is None else budget)


def cmd_score(args: argparse.Namespace) -> int:
    cfg = merge_config(args)
    ids = read_allocation_ids(args.allocation)
    if cfg.k is None:
        cfg.k = len(ids)
    instance, echo = build_instance(cfg)
    allocation = allocation_from_ids(instance, ids)
    try:
        triple, combined = evaluate(instance, allocation,
                                    instance.local_designs(seed=cfg.seed, threads=cfg.threads))
        breakdown = equity_breakdown(instance, allocation)
        e = covered_indicators(instance.stack, allocation)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    report = build_score_report(instance, allocation, triple, combined, breakdown, e, echo)
    out = cfg.out or "report.json"
    write_json(out, report)
    print(render_score_summary(report))
    print(f"report written to {out}")
    return 0


def cmd_optimize(args: argparse.Namespace) -> int:
    cfg = merge_config(args)
    instance, echo = build_instance(cfg)
    echo["exact"] = bool(cfg.exact)

    interrupted = {"flag": False}

    def on_sigint(signum, frame):
        interrupted["flag"] = True

    previous = signal.signal(signal.SIGINT, on_sigint)
    try:
        locals_ = instance.local_designs(seed=cfg.seed, threads=cfg.threads)
        if cfg.exact:
            report = exhaustive_solve(instance, locals_)
        else:
            report = ga_solve(instance, cfg.ga_params(), locals_,
                              on_generation=lambda gen, best: interrupted["flag"])
    except ValueError as exc:
        raise SolveError(str(exc)) from exc
    finally:
        signal.signal(signal.SIGINT, previous)

    doc = build_solve_report(instance, report, echo)
    out = cfg.out or "solve_report.json"
    write_json(out, doc)
    print(render_score_summary({"scores": doc["result"]["scores"],
                                "allocation": {"site_ids": doc["result"]["site_ids"]}}))
    print(f"report written to {out}")
    if report.interrupted:
        print("solve interrupted; partial report written", file=sys.stderr)
        return 3
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    cfg = merge_config(args)
    named_ids = {Path(p).stem: read_allocation_ids(p) for p in args.allocations}
    if cfg.k is None:
        cfg.k = max((len(v) for v in named_ids.values()), default=0)
    instance, echo = build_instance(cfg)

    allocations: dict[str, Allocation] = {}
    error_rows: list[dict] = []
    for name, ids in named_ids.items():
        try:
            allocations[name] = allocation_from_ids(instance, ids)
        except ConfigError as exc:
            error_rows.append({"name": name, "feasible": False, "coverage": None,
                               "d_optimality": None, "equity": None, "combined": None,
                               "error": str(exc)})

    locals_ = instance.local_designs(seed=cfg.seed, threads=cfg.threads)
    rows = compare_schemes(instance, allocations, locals_)
    if args.optimize:
        try:
            solved = ga_solve(instance, cfg.ga_params(), locals_)
        except ValueError as exc:
            raise SolveError(str(exc)) from exc
        rows.append({"name": "proposed", "feasible": True,
                     "coverage": solved.best_scores.coverage,
                     "d_optimality": solved.best_scores.d_optimality,
                     "equity": solved.best_scores.equity, "combined": solved.combined})
    rows.extend(error_rows)

    print(render_compare_table(rows))
    if cfg.out:
        write_json(cfg.out, build_compare_report(rows))
        print(f"report written to {cfg.out}")
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    cfg = merge_config(args)
    params = SynthParams(
        m=cfg.synth_m, segregation=cfg.synth_segregation, n_sites=cfg.synth_n_sites,
        population_range=(cfg.synth_pop_min, cfg.synth_pop_max),
        cell_km=cfg.synth_cell_km, site_capacity=cfg.synth_site_capacity, seed=cfg.seed)
    region, sites = synth_region(params)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_region(region, out_dir / "areas.csv", out_dir / "strata.csv")
    save_sites(sites, out_dir / "sites.csv")
    print(f"wrote {out_dir}/areas.csv, strata.csv, sites.csv "
          f"(m={region.m}, n={len(sites)}, seed={cfg.seed})")
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--areas", help="areas csv: area_id,lon,lat,population")
    p.add_argument("--strata", help="strata csv: area_id,axis,level,count[,combo]")
    p.add_argument("--sites", help="sites csv: site_id,lon,lat,capacity,site_type,ownership")
    p.add_argument("--ownership", choices=["public", "private", "unknown", "all"])
    p.add_argument("--k", type=int, help="number of sites to operate")
    p.add_argument("--target-fraction", dest="target_fraction", type=float,
                   help="share of an area's population a site must serve (default 0.1)")
    p.add_argument("--budget-mode", dest="budget_mode", choices=["exact", "at_most"])
    p.add_argument("--lambda1", type=float, help="coverage weight")
    p.add_argument("--lambda2", type=float, help="design-uncertainty weight")
    p.add_argument("--lambda3", type=float, help="equity weight")
    p.add_argument("--coverage-importance", dest="coverage_importance",
                   help="less|somewhat|important|very (sets lambda1)")
    p.add_argument("--equity-importance", dest="equity_importance",
                   help="less|somewhat|important|very (sets lambda3)")
    p.add_argument("--kernel", choices=["exponential", "squared_exponential"])
    p.add_argument("--grid-file", dest="grid_file",
                   help="theta grid json: {\"points\": [[sigma2, phi, tau2], ...]}")
    p.add_argument("--grid", help="'default' for the region-scaled product grid")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--out", help="report output path")
    p.add_argument("--population", type=int, help="GA population size")
    p.add_argument("--generations", type=int, help="GA generations")
    p.add_argument("--crossover-rate", dest="crossover_rate", type=float)
    p.add_argument("--mutation-rate", dest="mutation_rate", type=float)
    p.add_argument("--elitism", type=int)
    p.add_argument("--synth", action="store_true", default=None,
                   help="use a synthetic region instead of input files")
    p.add_argument("--synth-m", dest="synth_m", type=int)
    p.add_argument("--synth-segregation", dest="synth_segregation", type=float)
    p.add_argument("--synth-n-sites", dest="synth_n_sites", type=int)
    p.add_argument("--synth-pop-min", dest="synth_pop_min", type=int)
    p.add_argument("--synth-pop-max", dest="synth_pop_max", type=int)
    p.add_argument("--synth-cell-km", dest="synth_cell_km", type=float)
    p.add_argument("--synth-site-capacity", dest="synth_site_capacity", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="testalloc",
        description="Allocate test centers balancing coverage, design uncertainty, and equity.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_score = sub.add_parser("score", help="score an existing allocation")
    _add_common(p_score)
    p_score.add_argument("allocation", help="file listing selected site ids")
    p_score.set_defaults(func=cmd_score)

    p_opt = sub.add_parser("optimize", help="search for the best allocation")
    _add_common(p_opt)
    p_opt.add_argument("--exact", action="store_true", default=None,
                       help="exhaustive enumeration (guarded) instead of the GA")
    p_opt.set_defaults(func=cmd_optimize)

    p_cmp = sub.add_parser("compare", help="score several allocations side by side")
    _add_common(p_cmp)
    p_cmp.add_argument("allocations", nargs="+", help="allocation files, one per scheme")
    p_cmp.add_argument("--optimize", action="store_true",
                       help="also run the optimizer and append a 'proposed' row")
    p_cmp.set_defaults(func=cmd_compare)

    p_syn = sub.add_parser("synth", help="write synthetic region fixture files")
    _add_common(p_syn)
    p_syn.add_argument("out_dir", help="directory for areas.csv/strata.csv/sites.csv")
    p_syn.set_defaults(func=cmd_synth)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SolveError as exc:
        print(f"solve failed: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        # Data-level errors from ingest/validation are configuration problems.
        print(f"error: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
