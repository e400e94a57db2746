"""Instance descriptors and the five routing policies.

Fixed policies commit to one solver with no fallback. The rule router
switches between fast-first and exact-first on descriptor thresholds. The
agent router retrieves the verified-best solver of the nearest training
instance from an oracle-labeled memory.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from .model import Instance
from .solvers import SolverConfig, SolverId, run_solver
from .verifier import AcceptanceCriterion, verify

LOG_FLOOR = -30.0


class RouterKind(str, enum.Enum):
    ALWAYS_FAST = "always-fast"
    ALWAYS_EXACT = "always-exact"
    ALWAYS_DIST = "always-dist"
    RULE = "rule"
    AGENT = "agent"

    @property
    def fixed_solver(self) -> SolverId | None:
        return _FIXED.get(self)


_FIXED = {
    RouterKind.ALWAYS_FAST: SolverId.FAST,
    RouterKind.ALWAYS_EXACT: SolverId.EXACT,
    RouterKind.ALWAYS_DIST: SolverId.DIST,
}


@dataclass(frozen=True)
class Descriptor:
    L: int
    K: int
    load_ratio: float
    gamma_target: float
    budget_mean: float
    budget_min: float
    gain_log_mean: float
    gain_log_std: float
    gain_log_min: float
    gain_log_max: float
    imbalance: float

    def vector(self) -> np.ndarray:
        return np.array([float(v) for v in asdict(self).values()], dtype=np.float64)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Descriptor:
        return cls(**d)


def gini(x: np.ndarray) -> float:
    """Sample Gini: sum_ij |x_i - x_j| / (2 n^2 mean). Zero for a zero vector."""
    x = np.asarray(x, dtype=np.float64)
    mean = x.mean()
    if mean <= 0:
        return 0.0
    diff = np.abs(x[:, None] - x[None, :]).sum()
    return float(diff / (2.0 * x.size**2 * mean))


def extract_descriptor(inst: Instance) -> Descriptor:
    g = inst.gains
    pos = g[g > 0]
    if pos.size:
        logs = np.log10(pos)
        stats = (logs.mean(), logs.std(), logs.min(), logs.max())
    else:
        stats = (LOG_FLOOR, 0.0, LOG_FLOOR, LOG_FLOOR)
    return Descriptor(
        L=inst.L,
        K=inst.K,
        load_ratio=inst.K / inst.L,
        gamma_target=inst.gamma_target,
        budget_mean=float(inst.p_max.mean()),
        budget_min=float(inst.p_max.min()),
        gain_log_mean=float(stats[0]),
        gain_log_std=float(stats[1]),
        gain_log_min=float(stats[2]),
        gain_log_max=float(stats[3]),
        imbalance=gini(g.sum(axis=0)),
    )


@dataclass(frozen=True)
class BudgetPolicy:
    """Sequential-call budget. ``max_attempts=None`` means the full chain."""

    max_attempts: int | None = None
    cost_cap: int | None = None

    def __post_init__(self) -> None:
        if self.max_attempts is not None and self.max_attempts < 1:
            raise ValueError("max_attempts must be at least 1")
        if self.cost_cap is not None and self.cost_cap < 0:
            raise ValueError("cost_cap must be nonnegative")


@dataclass(frozen=True)
class SolverPlan:
    first: SolverId
    fallback: tuple[SolverId, ...] = ()
    budget: BudgetPolicy = field(default_factory=BudgetPolicy)
    criterion: AcceptanceCriterion | None = None

    def __post_init__(self) -> None:
        first = SolverId(self.first)
        fallback = tuple(SolverId(s) for s in self.fallback)
        if first in fallback:
            raise ValueError("first solver must not reappear in the fallback list")
        if len(set(fallback)) != len(fallback):
            raise ValueError("fallback list has duplicates")
        object.__setattr__(self, "first", first)
        object.__setattr__(self, "fallback", fallback)

    @property
    def chain(self) -> tuple[SolverId, ...]:
        return (self.first, *self.fallback)


@dataclass(frozen=True)
class RuleConfig:
    theta_gamma: float
    theta_load: float
    theta_imb: float
    fallback_fast_first: tuple[SolverId, ...] = (SolverId.EXACT, SolverId.DIST)
    fallback_exact_first: tuple[SolverId, ...] = (SolverId.FAST, SolverId.DIST)

    @classmethod
    def from_train(cls, train: Iterable[Instance], quantile: float = 0.6) -> RuleConfig:
        descs = [extract_descriptor(i) for i in train]
        if not descs:
            raise ValueError("rule thresholds need at least one train instance")

        def q(attr: str) -> float:
            return float(np.quantile([getattr(d, attr) for d in descs], quantile))

        return cls(theta_gamma=q("gamma_target"), theta_load=q("load_ratio"), theta_imb=q("imbalance"))

    def to_dict(self) -> dict[str, Any]:
        return {
            "theta_gamma": self.theta_gamma,
            "theta_load": self.theta_load,
            "theta_imb": self.theta_imb,
            "fallback_fast_first": [s.value for s in self.fallback_fast_first],
            "fallback_exact_first": [s.value for s in self.fallback_exact_first],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> RuleConfig:
        d = dict(d)
        for key in ("fallback_fast_first", "fallback_exact_first"):
            if key in d:
                d[key] = tuple(SolverId(s) for s in d[key])
        return cls(**d)


def route_fixed(
    kind: RouterKind,
    criterion: AcceptanceCriterion | None = None,
    budget: BudgetPolicy = BudgetPolicy(),
) -> SolverPlan:
    solver = RouterKind(kind).fixed_solver
    if solver is None:
        raise ValueError(f"{kind} is not a fixed policy")
    return SolverPlan(solver, (), budget, criterion)


def route_rule(
    desc: Descriptor,
    cfg: RuleConfig,
    criterion: AcceptanceCriterion | None = None,
    budget: BudgetPolicy = BudgetPolicy(),
) -> SolverPlan:
    hard = (
        desc.gamma_target > cfg.theta_gamma
        or desc.load_ratio > cfg.theta_load
        or desc.imbalance > cfg.theta_imb
    )
    if hard:
        return SolverPlan(SolverId.EXACT, cfg.fallback_exact_first, budget, criterion)
    return SolverPlan(SolverId.FAST, cfg.fallback_fast_first, budget, criterion)


@dataclass(frozen=True)
class MemoryEntry:
    descriptor: Descriptor
    label: SolverId
    best_rate: float
    instance_id: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "instance_id": self.instance_id,
            "label": self.label.value,
            "best_rate": self.best_rate,
            "descriptor": self.descriptor.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> MemoryEntry:
        return cls(
            descriptor=Descriptor.from_dict(d["descriptor"]),
            label=SolverId(d["label"]),
            best_rate=float(d["best_rate"]),
            instance_id=str(d["instance_id"]),
        )


def label_from_trials(trials: Sequence[tuple[SolverId, bool, bool, float, int]]) -> tuple[SolverId, float]:
    """Pick the verified-best solver from ``(solver, accepted, feasible, r_ver, cost)`` rows.

    Accepted candidates beat feasible ones; within a tier the higher
    verified rate wins, then the lower cost, then the portfolio order.
    """
    for tier in ("accepted", "feasible"):
        pool = [t for t in trials if (t[1] if tier == "accepted" else t[2])]
        if pool:
            best = min(pool, key=lambda t: (-t[3], t[4], SolverId(t[0]).order))
            return SolverId(best[0]), float(best[3])
    # nothing feasible at all: fall back to the strongest by rate
    best = min(trials, key=lambda t: (-t[3], t[4], SolverId(t[0]).order))
    return SolverId(best[0]), float(best[3])


def build_memory(
    train: Sequence[Instance],
    solver_cfg: SolverConfig = SolverConfig(),
    tolerances: dict[str, float] | None = None,
) -> list[MemoryEntry]:
    if not train:
        raise ValueError("memory needs at least one train instance")
    tolerances = tolerances or {}
    memory = []
    for inst in train:
        crit = AcceptanceCriterion.for_instance(inst, **tolerances)
        trials = []
        for solver in SolverId:
            res = run_solver(solver, inst, solver_cfg)
            rep = verify(inst, res.candidate, crit)
            trials.append((solver, rep.accepted, rep.feasible, rep.r_ver, res.cost_units))
        label, rate = label_from_trials(trials)
        memory.append(MemoryEntry(extract_descriptor(inst), label, rate, inst.id))
    return memory


_AGENT_FALLBACK_ORDER = (SolverId.EXACT, SolverId.FAST, SolverId.DIST)


def route_agent(
    desc: Descriptor,
    memory: Sequence[MemoryEntry],
    k: int = 1,
    criterion: AcceptanceCriterion | None = None,
    budget: BudgetPolicy = BudgetPolicy(),
    fallback_order: Sequence[SolverId] = _AGENT_FALLBACK_ORDER,
) -> SolverPlan:
    if not memory:
        raise ValueError("agent routing needs a non-empty memory")
    if not 1 <= k <= len(memory):
        raise ValueError(f"k must lie in [1, {len(memory)}], got {k}")
    feats = np.array([e.descriptor.vector() for e in memory])
    mean = feats.mean(axis=0)
    std = feats.std(axis=0)
    keep = std > 0
    z_mem = (feats[:, keep] - mean[keep]) / std[keep]
    z_q = (desc.vector()[keep] - mean[keep]) / std[keep]
    dist = np.sqrt(((z_mem - z_q) ** 2).sum(axis=1))
    order = sorted(range(len(memory)), key=lambda i: (dist[i], memory[i].instance_id))
    nearest = [memory[i] for i in order[:k]]
    votes = Counter(e.label for e in nearest)
    top = max(votes.values())
    winners = {lab for lab, n in votes.items() if n == top}
    # vote ties go to the closest neighbor holding a winning label
    first = next(e.label for e in nearest if e.label in winners)
    fallback = tuple(s for s in fallback_order if s != first)
    return SolverPlan(first, fallback, budget, criterion)
