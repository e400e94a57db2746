"""End-to-end evaluation: memory, every method, regret and metrics."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from ..model import Instance, Split
from ..orchestrator import MethodConfig, OrchestrationOutcome, run_method
from ..router import MemoryEntry, RouterKind, RuleConfig, build_memory
from .metrics import MetricsRow, aggregate_metrics, compute_regret

ALL_METHODS = tuple(RouterKind)


@dataclass
class Evaluation:
    outcomes: dict[str, list[OrchestrationOutcome]]
    regrets: dict[tuple[str, str], float]
    rows: list[MetricsRow]
    memory: list[MemoryEntry] | None
    rule: RuleConfig | None

    def row(self, method: RouterKind | str, group: str = "overall") -> MetricsRow:
        name = RouterKind(method).value
        return next(r for r in self.rows if r.method == name and r.group == group)


def train_split(instances: Sequence[Instance]) -> list[Instance]:
    return [i for i in instances if i.split is Split.TRAIN]


def evaluate(
    instances: Sequence[Instance],
    methods: Sequence[RouterKind] = ALL_METHODS,
    cfg: MethodConfig = MethodConfig(),
    memory: Sequence[MemoryEntry] | None = None,
    lam: float | None = None,
    jobs: int = 1,
) -> Evaluation:
    """Run ``methods`` on every instance and aggregate.

    Rule thresholds default to train-split quantiles and the agent memory is
    built from the train split when not supplied.
    """
    methods = [RouterKind(m) for m in methods]
    train = train_split(instances)
    if RouterKind.RULE in methods and cfg.rule is None:
        if not train:
            raise ValueError("rule thresholds need a train split or an explicit RuleConfig")
        cfg = replace(cfg, rule=RuleConfig.from_train(train))
    if RouterKind.AGENT in methods and memory is None:
        if not train:
            raise ValueError("agent routing needs a memory or a train split")
        memory = build_memory(train, cfg.solver, cfg.tolerances)
    outcomes = {
        m.value: run_method(instances, m, memory if m is RouterKind.AGENT else None, cfg, jobs=jobs)
        for m in methods
    }
    regrets = compute_regret(outcomes)
    rows = aggregate_metrics(outcomes, regrets, lam=lam)
    return Evaluation(outcomes, regrets, rows, None if memory is None else list(memory), cfg.rule)
