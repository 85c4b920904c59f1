"""Loading, saving, and synthesizing regions and candidate-site listings.

File formats are plain comma-delimited text (UTF-8, LF or CRLF, `#` comment
lines skipped, header required):

    areas:  area_id,lon,lat,population
    strata: area_id,axis,level,count[,combo]
    sites:  site_id,lon,lat,capacity,site_type,ownership

Strata rows are long-format per-axis marginals; when the optional ``combo``
column carries a full joint label ("levelA|levelB", one level per axis in
axis order), those joint counts take precedence for that area. Marginal-only
areas get joint counts assembled by treating the axes as independent and
rounding by largest remainder so counts still sum exactly to the population.

Coordinates are projected to planar kilometers (equirectangular about the
region's mean latitude) so all downstream distance math is Euclidean.
"""

from __future__ import annotations

import csv
import itertools
import logging
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .domain import Area, CandidateSite, Region, StratumKey, require_valid

log = logging.getLogger(__name__)

EARTH_RADIUS_KM = 6371.0088
DEFAULT_CAPACITY = 1120.0
OWNERSHIPS = ("public", "private", "unknown")
COMBO_SEPARATOR = "|"


@dataclass(frozen=True)
class Projection:
    """Equirectangular projection about a reference point, in kilometers."""

    lon0: float
    lat0: float

    def to_xy(self, lon: float, lat: float) -> tuple[float, float]:
        x = EARTH_RADIUS_KM * math.cos(math.radians(self.lat0)) * math.radians(lon - self.lon0)
        y = EARTH_RADIUS_KM * math.radians(lat - self.lat0)
        return (x, y)

    def to_lonlat(self, x: float, y: float) -> tuple[float, float]:
        lon = self.lon0 + math.degrees(x / (EARTH_RADIUS_KM * math.cos(math.radians(self.lat0))))
        lat = self.lat0 + math.degrees(y / EARTH_RADIUS_KM)
        return (lon, lat)


@dataclass(frozen=True)
class SiteRecord:
    """One raw row of a sites file, before ownership filtering."""

    id: str
    lon: float
    lat: float
    capacity: float
    site_type: int
    ownership: str


class ParseError(ValueError):
    def __init__(self, path: str | Path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = str(path)
        self.line = line


def _read_rows(path: str | Path) -> tuple[dict[str, int], list[tuple[int, list[str]]]]:
    """Header map and (line_number, cells) rows, comments and blanks skipped."""
    header: dict[str, int] | None = None
    rows: list[tuple[int, list[str]]] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cells = next(csv.reader([line]))
            cells = [c.strip() for c in cells]
            if header is None:
                header = {name.lower(): i for i, name in enumerate(cells)}
                continue
            rows.append((lineno, cells))
    if header is None:
        raise ParseError(path, 0, "empty file: header row required")
    return header, rows


def _cell(cells: list[str], header: dict[str, int], name: str) -> str | None:
    idx = header.get(name)
    if idx is None or idx >= len(cells):
        return None
    value = cells[idx]
    return value if value != "" else None


def _require(path, lineno, cells, header, name: str) -> str:
    v = _cell(cells, header, name)
    if v is None:
        raise ParseError(path, lineno, f"missing required column {name!r}")
    return v


def _parse_float(path, lineno, name, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ParseError(path, lineno, f"{name} must be a number, got {value!r}") from None


def _parse_count(path, lineno, name, value: str) -> int:
    try:
        n = int(value)
    except ValueError:
        raise ParseError(path, lineno, f"{name} must be an integer, got {value!r}") from None
    if n < 0:
        raise ParseError(path, lineno, f"{name} must be nonnegative, got {n}")
    return n


def largest_remainder(quotas: Sequence[Fraction], total: int) -> list[int]:
    """Round exact quotas to integers that sum to ``total``.

    Floors first, then hands the remaining units to the largest fractional
    parts (ties toward the earlier quota). Quotas must sum to ``total``.
    """
    base = [int(q) for q in quotas]
    fracs = [q - b for q, b in zip(quotas, base)]
    leftover = total - sum(base)
    if leftover < 0 or leftover > len(quotas):
        raise ValueError("quotas do not sum to the requested total")
    order = sorted(range(len(quotas)), key=lambda i: (-fracs[i], i))
    for i in order[:leftover]:
        base[i] += 1
    return base


def _assemble_strata(
    path: str | Path,
    rows: list[tuple[int, list[str]]],
    header: dict[str, int],
    populations: dict[str, int],
) -> tuple[tuple[tuple[str, tuple[str, ...]], ...], dict[str, dict[StratumKey, int]]]:
    axes_order: list[str] = []
    levels: dict[str, list[str]] = {}
    marginal: dict[str, dict[str, dict[str, int]]] = {}  # area -> axis -> level -> count
    joint: dict[str, dict[StratumKey, int]] = {}
    combo_arity: int | None = None

    for lineno, cells in rows:
        area_id = _require(path, lineno, cells, header, "area_id")
        if area_id not in populations:
            raise ParseError(path, lineno, f"unknown area {area_id!r}")
        count = _parse_count(path, lineno, "count", _require(path, lineno, cells, header, "count"))
        combo = _cell(cells, header, "combo")
        if combo is not None:
            parts = tuple(p.strip() for p in combo.split(COMBO_SEPARATOR))
            if combo_arity is None:
                combo_arity = len(parts)
            elif len(parts) != combo_arity:
                raise ParseError(path, lineno, f"combo {combo!r} has {len(parts)} levels, expected {combo_arity}")
            dest = joint.setdefault(area_id, {})
            dest[parts] = dest.get(parts, 0) + count
            continue
        axis = _require(path, lineno, cells, header, "axis")
        level = _require(path, lineno, cells, header, "level")
        if axis not in levels:
            axes_order.append(axis)
            levels[axis] = []
        if level not in levels[axis]:
            levels[axis].append(level)
        dest2 = marginal.setdefault(area_id, {}).setdefault(axis, {})
        dest2[level] = dest2.get(level, 0) + count

    if combo_arity is not None:
        if not axes_order:
            axes_order = [f"axis{i + 1}" for i in range(combo_arity)]
            levels = {name: [] for name in axes_order}
        elif len(axes_order) != combo_arity:
            raise ParseError(path, 0, f"combo rows have {combo_arity} levels but "
                                      f"{len(axes_order)} axes are declared")
        for combos in joint.values():
            for parts in combos:
                for name, lvl in zip(axes_order, parts):
                    if lvl not in levels[name]:
                        levels[name].append(lvl)

    counts_by_area: dict[str, dict[StratumKey, int]] = {}
    for area_id, pop in populations.items():
        if area_id in joint:
            counts_by_area[area_id] = {k: v for k, v in joint[area_id].items() if v > 0}
            continue
        per_axis = marginal.get(area_id)
        if not per_axis:
            counts_by_area[area_id] = {}
            continue
        for axis in axes_order:
            axis_total = sum(per_axis.get(axis, {}).values())
            if axis_total != pop:
                raise ValueError(
                    f"{path}: area {area_id!r}: {axis!r} counts total {axis_total}, "
                    f"population is {pop}")
        combos = [tuple(c) for c in _product([levels[a] for a in axes_order])]
        if pop == 0:
            counts_by_area[area_id] = {}
            continue
        quotas = []
        for combo in combos:
            prop = Fraction(1)
            for axis, lvl in zip(axes_order, combo):
                prop *= Fraction(per_axis.get(axis, {}).get(lvl, 0), pop)
            quotas.append(pop * prop)
        rounded = largest_remainder(quotas, pop)
        counts_by_area[area_id] = {c: n for c, n in zip(combos, rounded) if n > 0}

    axes = tuple((name, tuple(levels[name])) for name in axes_order)
    return axes, counts_by_area


def _product(level_lists: list[list[str]]) -> Iterable[tuple[str, ...]]:
    return itertools.product(*level_lists)


def load_region(
    areas_path: str | Path,
    strata_path: str | Path | None = None,
    projection: Projection | None = None,
) -> Region:
    """Load and validate a region from an areas file plus optional strata file.

    Centroids are projected to planar kilometers; without an explicit
    projection one is centered on the region's mean coordinates.
    """
    header, rows = _read_rows(areas_path)
    parsed: list[tuple[str, float, float, int]] = []
    for lineno, cells in rows:
        area_id = _require(areas_path, lineno, cells, header, "area_id")
        lon = _parse_float(areas_path, lineno, "lon", _require(areas_path, lineno, cells, header, "lon"))
        lat = _parse_float(areas_path, lineno, "lat", _require(areas_path, lineno, cells, header, "lat"))
        if not (-180.0 <= lon <= 180.0 and -90.0 <= lat <= 90.0):
            raise ParseError(areas_path, lineno, f"coordinates out of range: ({lon}, {lat})")
        pop = _parse_count(areas_path, lineno, "population",
                           _require(areas_path, lineno, cells, header, "population"))
        parsed.append((area_id, lon, lat, pop))
    if not parsed:
        raise ParseError(areas_path, 0, "no areas")

    if projection is None:
        projection = Projection(
            lon0=sum(p[1] for p in parsed) / len(parsed),
            lat0=sum(p[2] for p in parsed) / len(parsed),
        )

    populations = {p[0]: p[3] for p in parsed}
    axes: tuple = ()
    counts: dict[str, dict[StratumKey, int]] = {}
    if strata_path is not None:
        sheader, srows = _read_rows(strata_path)
        axes, counts = _assemble_strata(strata_path, srows, sheader, populations)

    areas = tuple(
        Area(id=aid, centroid=projection.to_xy(lon, lat), population=pop,
             stratum_counts=counts.get(aid, {}))
        for aid, lon, lat, pop in parsed
    )
    return require_valid(Region(areas=areas, stratum_axes=axes))


def load_site_records(path: str | Path, default_capacity: float = DEFAULT_CAPACITY) -> list[SiteRecord]:
    header, rows = _read_rows(path)
    records = []
    for lineno, cells in rows:
        site_id = _require(path, lineno, cells, header, "site_id")
        lon = _parse_float(path, lineno, "lon", _require(path, lineno, cells, header, "lon"))
        lat = _parse_float(path, lineno, "lat", _require(path, lineno, cells, header, "lat"))
        if not (-180.0 <= lon <= 180.0 and -90.0 <= lat <= 90.0):
            raise ParseError(path, lineno, f"coordinates out of range: ({lon}, {lat})")
        cap_cell = _cell(cells, header, "capacity")
        capacity = default_capacity if cap_cell is None else _parse_float(path, lineno, "capacity", cap_cell)
        if not capacity > 0:
            raise ParseError(path, lineno, f"capacity must be positive, got {capacity}")
        type_cell = _cell(cells, header, "site_type")
        site_type = 1 if type_cell is None else _parse_count(path, lineno, "site_type", type_cell)
        if site_type < 1:
            raise ParseError(path, lineno, f"site_type must be >= 1, got {site_type}")
        own_cell = _cell(cells, header, "ownership")
        ownership = "unknown" if own_cell is None else own_cell.lower()
        if ownership not in OWNERSHIPS:
            raise ParseError(path, lineno, f"ownership must be one of {OWNERSHIPS}, got {own_cell!r}")
        records.append(SiteRecord(id=site_id, lon=lon, lat=lat, capacity=capacity,
                                  site_type=site_type, ownership=ownership))
    return records


def load_sites(
    path: str | Path,
    ownership: str = "all",
    projection: Projection | None = None,
    default_capacity: float = DEFAULT_CAPACITY,
) -> list[CandidateSite]:
    """Load candidate sites, keeping only the requested ownership class.

    Pass the region's projection so site coordinates land in the same plane
    as the area centroids (``load_problem`` does this for you); otherwise a
    projection centered on the sites themselves is used.
    """
    if ownership != "all" and ownership not in OWNERSHIPS:
        raise ValueError(f"ownership filter must be 'all' or one of {OWNERSHIPS}")
    records = load_site_records(path, default_capacity=default_capacity)
    kept = [r for r in records if ownership == "all" or r.ownership == ownership]
    dropped = len(records) - len(kept)
    if dropped:
        log.info("ownership filter %r dropped %d of %d site records", ownership, dropped, len(records))
    if not kept:
        log.warning("no sites left after ownership filter %r", ownership)
        return []
    if projection is None:
        projection = Projection(lon0=sum(r.lon for r in kept) / len(kept),
                                lat0=sum(r.lat for r in kept) / len(kept))
    return [
        CandidateSite(id=r.id, location=projection.to_xy(r.lon, r.lat),
                      capacity=r.capacity, site_type=r.site_type)
        for r in kept
    ]


def load_problem(
    areas_path: str | Path,
    strata_path: str | Path | None,
    sites_path: str | Path,
    ownership: str = "all",
) -> tuple[Region, list[CandidateSite]]:
    """Load a region and its candidate sites in one shared projection."""
    header, rows = _read_rows(areas_path)
    lons, lats = [], []
    for lineno, cells in rows:
        lons.append(_parse_float(areas_path, lineno, "lon", _require(areas_path, lineno, cells, header, "lon")))
        lats.append(_parse_float(areas_path, lineno, "lat", _require(areas_path, lineno, cells, header, "lat")))
    if not lons:
        raise ParseError(areas_path, 0, "no areas")
    projection = Projection(lon0=sum(lons) / len(lons), lat0=sum(lats) / len(lats))
    region = load_region(areas_path, strata_path, projection=projection)
    sites = load_sites(sites_path, ownership=ownership, projection=projection)
    return region, sites


def save_region(
    region: Region,
    areas_path: str | Path,
    strata_path: str | Path | None = None,
    origin: tuple[float, float] = (0.0, 0.0),
) -> None:
    """Write a region back to the delimited formats (joint combo rows).

    Planar coordinates are inverse-projected about ``origin`` (lon, lat).
    """
    projection = Projection(lon0=origin[0], lat0=origin[1])
    with open(areas_path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["area_id", "lon", "lat", "population"])
        for a in region.areas:
            lon, lat = projection.to_lonlat(*a.centroid)
            w.writerow([a.id, repr(lon), repr(lat), a.population])
    if strata_path is None:
        return
    with open(strata_path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["area_id", "axis", "level", "count", "combo"])
        for a in region.areas:
            # Marginal rows first: they declare axis names and level order.
            # The joint combo rows that follow take precedence for counts.
            for a_idx, (name, lvls) in enumerate(region.stratum_axes):
                for lvl in lvls:
                    total = sum(c for combo, c in a.stratum_counts.items() if combo[a_idx] == lvl)
                    w.writerow([a.id, name, lvl, total, ""])
            for combo, count in a.stratum_counts.items():
                w.writerow([a.id, "", "", count, COMBO_SEPARATOR.join(combo)])


def save_sites(
    sites: Sequence[CandidateSite],
    path: str | Path,
    origin: tuple[float, float] = (0.0, 0.0),
    ownership: str = "public",
) -> None:
    projection = Projection(lon0=origin[0], lat0=origin[1])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["site_id", "lon", "lat", "capacity", "site_type", "ownership"])
        for s in sites:
            lon, lat = projection.to_lonlat(*s.location)
            w.writerow([s.id, repr(lon), repr(lat), repr(s.capacity), s.site_type, ownership])


@dataclass(frozen=True)
class SynthParams:
    """Seeded synthetic region: a population grid with tunable segregation.

    ``segregation`` 0 gives every area identical stratum proportions (so the
    equity score is exactly zero for any coverage pattern); 1 fully separates
    the strata into spatial bands. Populations are drawn from
    ``population_range`` and snapped down to a multiple of the stratum-combo
    count so proportions stay exact at segregation 0.
    """

    m: int = 25
    grid_cols: int | None = None
    cell_km: float = 2.0
    population_range: tuple[int, int] = (500, 2000)
    segregation: float = 0.0
    stratum_axes: tuple[tuple[str, tuple[str, ...]], ...] = (("group", ("A", "B")),)
    n_sites: int | None = None
    site_capacity: float = DEFAULT_CAPACITY
    seed: int = 0

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if not (0.0 <= self.segregation <= 1.0):
            raise ValueError("segregation must be in [0, 1]")
        lo, hi = self.population_range
        if lo < 0 or hi < lo:
            raise ValueError("population_range must satisfy 0 <= lo <= hi")


def synth_region(params: SynthParams) -> tuple[Region, list[CandidateSite]]:
    """Generate a deterministic synthetic region and candidate-site list.

    Areas sit on a grid; candidate sites are placed at a seeded sample of
    area centroids. Axis levels are segregated into bands along alternating
    coordinates (first axis by x, second by y, and so on).
    """
    rng = random.Random(params.seed)
    cols = params.grid_cols or max(1, math.isqrt(params.m - 1) + 1)
    width = len(str(params.m))
    raw = [((i % cols) * params.cell_km, (i // cols) * params.cell_km)
           for i in range(params.m)]
    # Mean-centered so saving (inverse projection about 0,0) and reloading
    # (projection about the file's mean coordinates) reproduces the region.
    mean_x = sum(c[0] for c in raw) / params.m
    mean_y = sum(c[1] for c in raw) / params.m
    centroids = [(x - mean_x, y - mean_y) for x, y in raw]

    combos = [tuple(c) for c in _product([list(lvls) for _, lvls in params.stratum_axes])]
    n_combos = max(1, len(combos))
    lo, hi = params.population_range

    xs = [c[0] for c in centroids]
    ys = [c[1] for c in centroids]
    spans = [(min(xs), max(xs)), (min(ys), max(ys))]
    seg = Fraction(params.segregation)

    areas = []
    for j, centroid in enumerate(centroids):
        raw = rng.randint(lo, hi)
        pop = max(n_combos, raw - raw % n_combos) if combos else raw
        counts: dict[StratumKey, int] = {}
        if combos and pop > 0:
            axis_props: list[dict[str, Fraction]] = []
            for a_idx, (_, lvls) in enumerate(params.stratum_axes):
                lvl_count = len(lvls)
                lo_s, hi_s = spans[a_idx % 2]
                span = hi_s - lo_s
                coord = centroid[a_idx % 2]
                norm = 0.0 if span == 0 else (coord - lo_s) / span
                home = min(lvl_count - 1, int(norm * lvl_count))
                p_home = Fraction(1, lvl_count) + seg * Fraction(lvl_count - 1, lvl_count)
                p_other = (1 - seg) * Fraction(1, lvl_count)
                axis_props.append({lvl: (p_home if i == home else p_other)
                                   for i, lvl in enumerate(lvls)})
            quotas = []
            for combo in combos:
                prop = Fraction(1)
                for a_idx, lvl in enumerate(combo):
                    prop *= axis_props[a_idx][lvl]
                quotas.append(pop * prop)
            rounded = largest_remainder(quotas, pop)
            counts = {c: n for c, n in zip(combos, rounded) if n > 0}
        areas.append(Area(id=f"a{j:0{width}d}", centroid=centroid, population=pop,
                          stratum_counts=counts))

    region = require_valid(Region(areas=tuple(areas),
                                  stratum_axes=params.stratum_axes if combos else ()))

    n_sites = params.n_sites if params.n_sites is not None else max(1, params.m // 4)
    n_sites = min(n_sites, params.m)
    chosen = sorted(rng.sample(range(params.m), n_sites))
    sites = [
        CandidateSite(id=f"s{rank:0{width}d}", location=centroids[j],
                      capacity=params.site_capacity, site_type=1)
        for rank, j in enumerate(chosen)
    ]
    return region, sites
