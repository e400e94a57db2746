"""Selection regret and per-group metric aggregation."""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..model import Split
from ..orchestrator import OrchestrationOutcome

GROUPINGS = ("overall", "split", "id_ood")


@dataclass(frozen=True)
class MetricsRow:
    method: str
    group: str
    accepted_rate: float
    feasible_rate: float
    avg_ver_rate: float
    avg_wall_time_s: float
    avg_cost_units: float
    avg_regret: float
    fallback_rate: float
    avg_attempts: float
    n_instances: int
    combined_score: float | None = None

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]


def instance_ids(outcomes: Sequence[OrchestrationOutcome]) -> list[str]:
    return [o.instance_id for o in outcomes]


def compute_regret(
    by_method: Mapping[str, Sequence[OrchestrationOutcome]],
) -> dict[tuple[str, str], float]:
    """regret(i, m) = max_m' v(i, m') - v(i, m) over the compared methods.

    ``v`` is the verified rate of the candidate each method returned
    (0 when it returned none). Every method must cover the same instances.
    """
    if not by_method:
        return {}
    values: dict[str, dict[str, float]] = {}
    for method, outs in by_method.items():
        values[method] = {o.instance_id: o.returned_r_ver for o in outs}
    ref = set(next(iter(values.values())))
    for method, v in values.items():
        if set(v) != ref:
            missing = sorted(ref.symmetric_difference(v))
            raise ValueError(f"method {method} does not cover the same instances: {missing[:5]}")
    regret: dict[tuple[str, str], float] = {}
    for iid in ref:
        best = max(v[iid] for v in values.values())
        for method, v in values.items():
            regret[(iid, method)] = best - v[iid]
    return regret


def _group_members(outcomes: Sequence[OrchestrationOutcome], grouping: Iterable[str]):
    grouping = list(grouping)
    unknown = set(grouping) - set(GROUPINGS)
    if unknown:
        raise ValueError(f"unknown grouping(s): {sorted(unknown)}")
    if "overall" in grouping:
        yield "overall", list(outcomes)
    if "split" in grouping:
        for split in Split:
            members = [o for o in outcomes if o.split == split.value]
            if members:
                yield split.value, members
    if "id_ood" in grouping:
        for name, in_dist in (("ID", True), ("OOD", False)):
            members = [o for o in outcomes if o.split is not None and Split(o.split).in_distribution == in_dist]
            if members:
                yield name, members


def summarize(
    method: str,
    group: str,
    outs: Sequence[OrchestrationOutcome],
    regrets: Mapping[tuple[str, str], float],
    lam: float | None = None,
) -> MetricsRow:
    n = len(outs)
    ver = float(np.mean([o.returned_r_ver for o in outs]))
    wall = float(np.mean([o.total_wall_time_s for o in outs]))
    return MetricsRow(
        method=method,
        group=group,
        accepted_rate=sum(o.resolved for o in outs) / n,
        feasible_rate=sum(o.returned_feasible for o in outs) / n,
        avg_ver_rate=ver,
        avg_wall_time_s=wall,
        avg_cost_units=float(np.mean([o.total_cost_units for o in outs])),
        avg_regret=float(np.mean([regrets[(o.instance_id, method)] for o in outs])),
        fallback_rate=sum(o.n_attempts >= 2 for o in outs) / n,
        avg_attempts=float(np.mean([o.n_attempts for o in outs])),
        n_instances=n,
        combined_score=None if lam is None else ver - lam * wall,
    )


def aggregate_metrics(
    by_method: Mapping[str, Sequence[OrchestrationOutcome]],
    regrets: Mapping[tuple[str, str], float],
    grouping: Iterable[str] = GROUPINGS,
    lam: float | None = None,
) -> list[MetricsRow]:
    grouping = list(grouping)
    rows = []
    for method, outs in by_method.items():
        for group, members in _group_members(outs, grouping):
            rows.append(summarize(method, group, members, regrets, lam))
    return rows


def failure_rows(
    by_method: Mapping[str, Sequence[OrchestrationOutcome]],
    regrets: Mapping[tuple[str, str], float],
    regret_threshold: float = float("inf"),
) -> list[dict[str, object]]:
    """Per-method lines for every instance some method left unresolved or
    where some method's regret exceeds ``regret_threshold``."""
    flagged: set[str] = set()
    for method, outs in by_method.items():
        for o in outs:
            if not o.resolved or regrets[(o.instance_id, method)] > regret_threshold:
                flagged.add(o.instance_id)
    rows = []
    for method, outs in by_method.items():
        for o in outs:
            if o.instance_id not in flagged:
                continue
            rows.append(
                {
                    "instance_id": o.instance_id,
                    "split": o.split,
                    "method": method,
                    "solver": o.final_solver.value if o.resolved else "--",
                    "accepted": "T" if o.resolved else "F",
                    "r_ver": o.final_r_ver if o.resolved else "--",
                    "wall_time_s": o.total_wall_time_s,
                    "cost_units": o.total_cost_units,
                    "regret": regrets[(o.instance_id, method)],
                }
            )
    rows.sort(key=lambda r: (r["instance_id"], list(by_method).index(r["method"])))
    return rows


FAILURE_COLUMNS = [
    "instance_id",
    "split",
    "method",
    "solver",
    "accepted",
    "r_ver",
    "wall_time_s",
    "cost_units",
    "regret",
]
