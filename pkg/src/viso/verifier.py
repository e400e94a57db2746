"""Independent acceptance checks on returned candidates.

The verifier sees only the instance, the candidate allocation and the
acceptance criterion. Anything a solver reports about its own output is
ignored; feasibility and the verified common rate are recomputed here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .model import Instance, PowerAllocation, compute_se, min_rate, per_ap_load


@dataclass(frozen=True)
class AcceptanceCriterion:
    gamma_target: float
    feas_tol_rel: float = 1e-9
    rate_tol_rel: float = 1e-6

    def __post_init__(self) -> None:
        if not self.gamma_target >= 0:
            raise ValueError("gamma_target must be nonnegative")
        for name in ("feas_tol_rel", "rate_tol_rel"):
            tol = getattr(self, name)
            if not 0 < tol <= 1e-2:
                raise ValueError(f"{name} must lie in (0, 1e-2], got {tol}")

    @classmethod
    def for_instance(cls, inst: Instance, **tols: float) -> AcceptanceCriterion:
        return cls(gamma_target=inst.gamma_target, **tols)


@dataclass(frozen=True)
class VerificationReport:
    feasible: bool
    r_ver: float
    accepted: bool
    margin: float
    violations: list[tuple[int, float]] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "feasible": self.feasible,
            "r_ver": self.r_ver,
            "accepted": self.accepted,
            "margin": self.margin,
            "violations": [[ap, excess] for ap, excess in self.violations],
        }


def _check_shape(inst: Instance, alloc: PowerAllocation) -> None:
    if alloc.eta.shape != inst.gains.shape:
        raise ValueError(
            f"allocation shape {alloc.eta.shape} does not match instance {inst.gains.shape}"
        )


def check_feasible(
    inst: Instance, alloc: PowerAllocation, feas_tol_rel: float = 1e-9
) -> tuple[bool, list[tuple[int, float]]]:
    """Per-AP budget check.

    Returns ``(feasible, violations)`` where each violation is
    ``(ap_index, load - p_max)`` for an AP whose load exceeds its budget
    by more than the relative slack. Negative entries make the candidate
    infeasible without producing an AP violation.
    """
    _check_shape(inst, alloc)
    eta = alloc.eta
    if not np.all(np.isfinite(eta)):
        return False, []
    nonneg = bool(np.all(eta >= 0))
    load = per_ap_load(alloc)
    over = load > inst.p_max * (1.0 + feas_tol_rel)
    violations = [(int(l), float(load[l] - inst.p_max[l])) for l in np.flatnonzero(over)]
    return nonneg and not violations, violations


def verify(inst: Instance, alloc: PowerAllocation, crit: AcceptanceCriterion) -> VerificationReport:
    _check_shape(inst, alloc)
    feasible, violations = check_feasible(inst, alloc, crit.feas_tol_rel)
    eta = alloc.eta
    if np.all(np.isfinite(eta)) and np.all(eta >= 0):
        r_ver = min_rate(compute_se(inst, alloc))
    else:
        # defensive verdict: no rate is defined for a broken candidate
        r_ver = 0.0
    if crit.gamma_target == 0:
        accepted = feasible
    else:
        accepted = feasible and r_ver >= crit.gamma_target * (1.0 - crit.rate_tol_rel)
    return VerificationReport(
        feasible=feasible,
        r_ver=r_ver,
        accepted=accepted,
        margin=r_ver - crit.gamma_target,
        violations=violations,
    )
