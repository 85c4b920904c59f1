"""Equity criterion: access gaps between sociodemographic groups.

Access is equitable when the probability of being covered conditional on
group membership equals the marginal coverage probability. f3 sums, over
all stratum combinations, the squared gap between the two.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import Region, StratumKey, stratum_count_vector


@dataclass(frozen=True)
class EquityBreakdown:
    """Per-stratum (conditional coverage probability, squared deviation) and the f3 total.

    Combinations with zero total population are skipped: they contribute
    nothing and do not appear in ``per_stratum``.
    """

    per_stratum: dict[StratumKey, tuple[float, float]]
    total: float


def marginal_coverage(region: Region, e: np.ndarray) -> float:
    """Population-weighted coverage probability, sum(P_j e_j) / sum(P_j)."""
    pops = np.asarray(region.populations(), dtype=float)
    total = pops.sum()
    if total <= 0:
        raise ValueError("zero total population")
    e = np.asarray(e, dtype=float)
    return float((pops * e).sum() / total)


def equity_score(region: Region, e: np.ndarray) -> EquityBreakdown:
    """f3 = sum over stratum combinations of (conditional - marginal)^2.

    When e is all zeros the marginal and every conditional are 0 and f3 = 0:
    covering no one is "equally bad for everyone". This interacts with the
    coverage term to keep the combined objective away from that degenerate
    optimum.
    """
    marginal = marginal_coverage(region, e)
    e = np.asarray(e, dtype=float)
    per: dict[StratumKey, tuple[float, float]] = {}
    total = 0.0
    for combo in region.stratum_combos():
        counts = np.asarray(stratum_count_vector(region, combo), dtype=float)
        group_pop = counts.sum()
        if group_pop == 0:
            continue
        conditional = float((counts * e).sum() / group_pop)
        dev = (conditional - marginal) ** 2
        per[combo] = (conditional, dev)
        total += dev
    return EquityBreakdown(per_stratum=per, total=total)
