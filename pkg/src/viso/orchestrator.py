"""Sequential verify-and-fallback loop over a solver plan.

Solvers in ``[plan.first, *plan.fallback]`` run one at a time. Each
candidate goes straight to the verifier; the first accepted candidate ends
the loop. If the chain or the budget runs out first, the instance is
unresolved.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from .model import Instance, PowerAllocation
from .router import (
    BudgetPolicy,
    MemoryEntry,
    RouterKind,
    RuleConfig,
    SolverPlan,
    extract_descriptor,
    route_agent,
    route_fixed,
    route_rule,
)
from .solvers import SolverConfig, SolverId, SolverResult, run_solver
from .verifier import AcceptanceCriterion, VerificationReport, verify

__all__ = [
    "AttemptRecord",
    "BudgetPolicy",
    "OrchestrationOutcome",
    "orchestrate",
    "replay",
    "run_method",
]

SolverFn = Callable[[SolverId, Instance], SolverResult]
VerifyFn = Callable[[Instance, PowerAllocation, AcceptanceCriterion], VerificationReport]


@dataclass(frozen=True)
class AttemptRecord:
    solver: SolverId
    accepted: bool
    feasible: bool
    r_ver: float
    cost_units: int
    wall_time_s: float
    candidate: PowerAllocation | None = None

    def to_dict(self, audit: bool = False) -> dict[str, Any]:
        d: dict[str, Any] = {
            "solver": self.solver.value,
            "accepted": self.accepted,
            "feasible": self.feasible,
            "r_ver": self.r_ver,
            "cost_units": self.cost_units,
            "wall_time_s": self.wall_time_s,
        }
        if audit and self.candidate is not None:
            d["candidate"] = self.candidate.eta.tolist()
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> AttemptRecord:
        cand = d.get("candidate")
        return cls(
            solver=SolverId(d["solver"]),
            accepted=bool(d["accepted"]),
            feasible=bool(d["feasible"]),
            r_ver=float(d["r_ver"]),
            cost_units=int(d["cost_units"]),
            wall_time_s=float(d["wall_time_s"]),
            candidate=None if cand is None else PowerAllocation(cand),
        )


@dataclass(frozen=True)
class OrchestrationOutcome:
    """Per-instance attempt trace.

    ``final_r_ver`` is the verified rate of the accepted candidate and is 0
    when unresolved. ``returned_*`` describe the candidate the method hands
    back for scoring: the accepted one, or for an unresolved run the
    best-rated verifier-feasible attempt (none if no attempt was feasible).
    """

    instance_id: str
    method: RouterKind
    attempts: tuple[AttemptRecord, ...]
    resolved: bool
    final_solver: SolverId | None
    final_r_ver: float
    total_cost_units: int
    total_wall_time_s: float
    returned_solver: SolverId | None = None
    returned_r_ver: float = 0.0
    split: str | None = None

    @property
    def n_attempts(self) -> int:
        return len(self.attempts)

    @property
    def returned_feasible(self) -> bool:
        return self.returned_solver is not None

    def to_dict(self, audit: bool = False) -> dict[str, Any]:
        return {
            "instance_id": self.instance_id,
            "split": self.split,
            "method": self.method.value,
            "resolved": self.resolved,
            "final_solver": None if self.final_solver is None else self.final_solver.value,
            "final_r_ver": self.final_r_ver,
            "returned_solver": None if self.returned_solver is None else self.returned_solver.value,
            "returned_r_ver": self.returned_r_ver,
            "total_cost_units": self.total_cost_units,
            "total_wall_time_s": self.total_wall_time_s,
            "attempts": [a.to_dict(audit) for a in self.attempts],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> OrchestrationOutcome:
        def sid(v):
            return None if v is None else SolverId(v)

        return cls(
            instance_id=d["instance_id"],
            method=RouterKind(d["method"]),
            attempts=tuple(AttemptRecord.from_dict(a) for a in d["attempts"]),
            resolved=bool(d["resolved"]),
            final_solver=sid(d["final_solver"]),
            final_r_ver=float(d["final_r_ver"]),
            total_cost_units=int(d["total_cost_units"]),
            total_wall_time_s=float(d["total_wall_time_s"]),
            returned_solver=sid(d.get("returned_solver")),
            returned_r_ver=float(d.get("returned_r_ver", 0.0)),
            split=d.get("split"),
        )


def _default_solver(cfg: SolverConfig) -> SolverFn:
    return lambda solver, inst: run_solver(solver, inst, cfg)


def orchestrate(
    inst: Instance,
    plan: SolverPlan,
    solve: SolverFn | None = None,
    check: VerifyFn = verify,
    *,
    method: RouterKind = RouterKind.RULE,
    keep_candidates: bool = False,
) -> OrchestrationOutcome:
    chain = plan.chain
    if not chain:
        raise ValueError("solver plan is empty")
    solve = solve or _default_solver(SolverConfig())
    crit = plan.criterion or AcceptanceCriterion.for_instance(inst)
    limit = plan.budget.max_attempts or len(chain)

    attempts: list[AttemptRecord] = []
    cost = 0
    wall = 0.0
    for solver in chain[:limit]:
        res = solve(solver, inst)
        rep = check(inst, res.candidate, crit)
        cost += res.cost_units
        wall += res.wall_time_s
        attempts.append(
            AttemptRecord(
                solver=solver,
                accepted=rep.accepted,
                feasible=rep.feasible,
                r_ver=rep.r_ver,
                cost_units=res.cost_units,
                wall_time_s=res.wall_time_s,
                candidate=res.candidate if keep_candidates else None,
            )
        )
        if rep.accepted:
            return OrchestrationOutcome(
                instance_id=inst.id,
                method=method,
                attempts=tuple(attempts),
                resolved=True,
                final_solver=solver,
                final_r_ver=rep.r_ver,
                total_cost_units=cost,
                total_wall_time_s=wall,
                returned_solver=solver,
                returned_r_ver=rep.r_ver,
                split=inst.split.value,
            )
        # the finished call is always verified before the cap is checked
        if plan.budget.cost_cap is not None and cost > plan.budget.cost_cap:
            break

    feasible = [a for a in attempts if a.feasible]
    best = max(feasible, key=lambda a: a.r_ver, default=None)
    return OrchestrationOutcome(
        instance_id=inst.id,
        method=method,
        attempts=tuple(attempts),
        resolved=False,
        final_solver=None,
        final_r_ver=0.0,
        total_cost_units=cost,
        total_wall_time_s=wall,
        returned_solver=None if best is None else best.solver,
        returned_r_ver=0.0 if best is None else best.r_ver,
        split=inst.split.value,
    )


@dataclass(frozen=True)
class MethodConfig:
    solver: SolverConfig = field(default_factory=SolverConfig)
    tolerances: dict[str, float] = field(default_factory=dict)
    budget: BudgetPolicy = field(default_factory=BudgetPolicy)
    rule: RuleConfig | None = None
    k: int = 1


def plan_for(
    inst: Instance,
    kind: RouterKind,
    cfg: MethodConfig,
    memory: Sequence[MemoryEntry] | None = None,
) -> SolverPlan:
    crit = AcceptanceCriterion.for_instance(inst, **cfg.tolerances)
    kind = RouterKind(kind)
    if kind.fixed_solver is not None:
        return route_fixed(kind, crit, cfg.budget)
    desc = extract_descriptor(inst)
    if kind is RouterKind.RULE:
        if cfg.rule is None:
            raise ValueError("rule routing needs a RuleConfig")
        return route_rule(desc, cfg.rule, crit, cfg.budget)
    if not memory:
        raise ValueError("agent routing needs a memory")
    return route_agent(desc, memory, cfg.k, crit, cfg.budget)


def run_method(
    instances: Sequence[Instance],
    kind: RouterKind,
    memory: Sequence[MemoryEntry] | None = None,
    cfg: MethodConfig = MethodConfig(),
    *,
    audit: bool = False,
    jobs: int = 1,
) -> list[OrchestrationOutcome]:
    """Orchestrate every instance under one routing method.

    Results come back in input order whatever ``jobs`` is.
    """
    kind = RouterKind(kind)
    if kind is RouterKind.AGENT and not memory:
        raise ValueError("the agent router requires a memory")
    solve = _default_solver(cfg.solver)

    def one(inst: Instance) -> OrchestrationOutcome:
        plan = plan_for(inst, kind, cfg, memory)
        return orchestrate(inst, plan, solve, method=kind, keep_candidates=audit)

    if jobs > 1 and len(instances) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(one, instances))
    return [one(inst) for inst in instances]


def replay(
    inst: Instance,
    outcome: OrchestrationOutcome,
    tolerances: dict[str, float] | None = None,
) -> list[str]:
    """Re-verify every recorded candidate; returns mismatch descriptions.

    Needs an audit-mode outcome (candidates embedded in each attempt).
    """
    crit = AcceptanceCriterion.for_instance(inst, **(tolerances or {}))
    problems = []
    for j, att in enumerate(outcome.attempts):
        if att.candidate is None:
            raise ValueError(f"attempt {j} has no stored candidate; rerun with audit enabled")
        rep = verify(inst, att.candidate, crit)
        for name in ("accepted", "feasible", "r_ver"):
            if getattr(rep, name) != getattr(att, name):
                problems.append(f"attempt {j} ({att.solver.value}) {name}: "
                                f"recorded {getattr(att, name)!r}, replayed {getattr(rep, name)!r}")
    return problems
