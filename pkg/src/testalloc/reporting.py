"""Report documents shared by the CLI, the HTTP service, and the console.

Reports are JSON objects with a stable key order and ``"schema": 1``; the
human-readable tables are fixed-width renderings of the same data, so every
interface prints identical numbers for identical inputs.
"""

from __future__ import annotations

import json
from datetime import datetime, timezone
from typing import Mapping, Sequence

import numpy as np

from .domain import Allocation, CandidateSite, Region, ScoreTriple
from .equity import EquityBreakdown, marginal_coverage
from .objective import ProblemInstance
from .solver import SolveReport

SCHEMA_VERSION = 1


def now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _num(x):
    """JSON-safe number: plain float/int, None passed through, inf as string."""
    if x is None:
        return None
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    if x != x or x in (float("inf"), float("-inf")):
        return repr(x)
    return x


def region_summary(region: Region, sites: Sequence[CandidateSite]) -> dict:
    return {
        "m": region.m,
        "n": len(sites),
        "total_population": region.total_population(),
        "site_types": sorted({s.site_type for s in sites}),
        "stratum_axes": [{"name": name, "levels": list(levels)}
                         for name, levels in region.stratum_axes],
    }


def scores_dict(triple: ScoreTriple, combined: float) -> dict:
    return {
        "coverage": triple.coverage,
        "d_optimality": _num(triple.d_optimality),
        "equity": _num(triple.equity),
        "combined": _num(combined),
    }


def weights_dict(instance: ProblemInstance) -> dict:
    return {
        "lambda1": _num(instance.weights.lambda1),
        "lambda2": _num(instance.weights.lambda2),
        "lambda3": _num(instance.weights.lambda3),
    }


def config_echo(instance: ProblemInstance, extra: Mapping | None = None) -> dict:
    doc = {
        "k": instance.budget,
        "budget_mode": instance.budget_mode,
        "target_fraction": _num(instance.target_fraction),
        "weights": weights_dict(instance),
    }
    if instance.grid is not None:
        doc["grid"] = [{"sigma2": _num(p.sigma2), "phi": _num(p.phi),
                        "tau2": _num(p.tau2), "family": p.family}
                       for p in instance.grid.points]
    if extra:
        doc.update({k: extra[k] for k in extra})
    return doc


def equity_breakdown_dict(region: Region, breakdown: EquityBreakdown,
                          e: np.ndarray) -> dict:
    return {
        "marginal": _num(marginal_coverage(region, e)),
        "total": _num(breakdown.total),
        "groups": [
            {
                "combo": list(combo),
                "conditional": _num(cond),
                "squared_deviation": _num(dev),
            }
            for combo, (cond, dev) in breakdown.per_stratum.items()
        ],
    }


def map_dict(region: Region, sites: Sequence[CandidateSite],
             e: np.ndarray, allocation: Allocation) -> dict:
    """Geometry for map panes: centroids, candidate sites, coverage tint."""
    return {
        "areas": [
            {"id": a.id, "x": _num(a.centroid[0]), "y": _num(a.centroid[1]),
             "population": a.population, "covered": int(e[j])}
            for j, a in enumerate(region.areas)
        ],
        "sites": [
            {"id": s.id, "x": _num(s.location[0]), "y": _num(s.location[1]),
             "site_type": s.site_type, "capacity": _num(s.capacity),
             "selected": int(i in allocation.selected)}
            for i, s in enumerate(sites)
        ],
    }


def build_score_report(
    instance: ProblemInstance,
    allocation: Allocation,
    triple: ScoreTriple,
    combined: float,
    breakdown: EquityBreakdown,
    e: np.ndarray,
    extra_config: Mapping | None = None,
) -> dict:
    site_ids = [instance.sites[i].id for i in allocation.indices]
    return {
        "schema": SCHEMA_VERSION,
        "kind": "score",
        "created": now_iso(),
        "region": region_summary(instance.region, instance.sites),
        "config": config_echo(instance, extra_config),
        "allocation": {"site_ids": site_ids, "site_indices": list(allocation.indices)},
        "scores": scores_dict(triple, combined),
        "equity_breakdown": equity_breakdown_dict(instance.region, breakdown, e),
        "map": map_dict(instance.region, instance.sites, e, allocation),
    }


def build_solve_report(
    instance: ProblemInstance,
    report: SolveReport,
    extra_config: Mapping | None = None,
) -> dict:
    site_ids = [instance.sites[i].id for i in report.best.indices]
    return {
        "schema": SCHEMA_VERSION,
        "kind": "solve",
        "created": now_iso(),
        "region": region_summary(instance.region, instance.sites),
        "config": config_echo(instance, extra_config),
        "result": {
            "site_ids": site_ids,
            "site_indices": list(report.best.indices),
            "scores": scores_dict(report.best_scores, report.combined),
        },
        "trace": [_num(v) for v in report.history],
        "evaluations": report.evaluations,
        "interrupted": report.interrupted,
    }


def build_compare_report(rows: Sequence[Mapping]) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "kind": "compare",
        "created": now_iso(),
        "rows": [
            {
                "name": r["name"],
                "feasible": r["feasible"],
                "coverage": _num(r["coverage"]),
                "d_optimality": _num(r["d_optimality"]),
                "equity": _num(r["equity"]),
                "combined": _num(r["combined"]),
            }
            for r in rows
        ],
    }


def _fmt(x, width: int) -> str:
    if x is None:
        return "-".rjust(width)
    if isinstance(x, str):
        return x.rjust(width)
    if isinstance(x, (int, np.integer)):
        return str(int(x)).rjust(width)
    return f"{float(x):.6g}".rjust(width)


def render_compare_table(rows: Sequence[Mapping]) -> str:
    """Fixed-width scheme table: one row per scheme, the three scores plus combined."""
    name_w = max([len("scheme")] + [len(str(r["name"])) for r in rows])
    header = (f"{'scheme'.ljust(name_w)}  {'coverage'.rjust(10)}  "
              f"{'d_optimality'.rjust(14)}  {'equity'.rjust(10)}  {'combined'.rjust(12)}")
    lines = [header, "-" * len(header)]
    for r in rows:
        flag = "" if r.get("feasible", True) else "  [infeasible]"
        lines.append(
            f"{str(r['name']).ljust(name_w)}  {_fmt(r['coverage'], 10)}  "
            f"{_fmt(r['d_optimality'], 14)}  {_fmt(r['equity'], 10)}  "
            f"{_fmt(r['combined'], 12)}{flag}")
    return "\n".join(lines)


def render_score_summary(report: Mapping) -> str:
    s = report["scores"]
    lines = [
        f"selected sites: {', '.join(report['allocation']['site_ids']) or '(none)'}",
        f"coverage     f1 = {_fmt(s['coverage'], 0).strip()}",
        f"d_optimality f2 = {_fmt(s['d_optimality'], 0).strip()}",
        f"equity       f3 = {_fmt(s['equity'], 0).strip()}",
        f"combined        = {_fmt(s['combined'], 0).strip()}",
    ]
    return "\n".join(lines)


def write_json(path: str, doc: Mapping) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
