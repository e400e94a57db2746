"""Verified solver orchestration for max-min downlink power control."""

from .model import Instance, PowerAllocation, Split, compute_se, compute_sinr, min_rate, per_ap_load
from .orchestrator import OrchestrationOutcome, orchestrate, run_method
from .router import BudgetPolicy, RouterKind, SolverPlan, build_memory, route_agent, route_rule
from .solvers import SolverConfig, SolverId, oracle_grid_search, run_solver
from .verifier import AcceptanceCriterion, VerificationReport, verify

__all__ = [
    "AcceptanceCriterion",
    "BudgetPolicy",
    "Instance",
    "OrchestrationOutcome",
    "PowerAllocation",
    "RouterKind",
    "SolverConfig",
    "SolverId",
    "SolverPlan",
    "Split",
    "VerificationReport",
    "build_memory",
    "compute_se",
    "compute_sinr",
    "min_rate",
    "oracle_grid_search",
    "orchestrate",
    "per_ap_load",
    "route_agent",
    "route_rule",
    "run_solver",
    "run_method",
    "verify",
]
