"""Trusted solver portfolio plus a brute-force grid oracle.

Three deterministic max-min solvers with different quality/cost profiles:

* ``solve_fast``: greedy worst/best-user power shifting from a
  channel-proportional start.
* ``solve_exact``: bisection on a common SINR target, each probe decided by
  an iterative scale-and-project feasibility routine.
* ``solve_dist``: one-shot per-AP proportional split, no coordination.

``cost_units`` counts elementwise work: every SINR evaluation of an L x K
allocation is charged L*K units, so the counts are comparable across
solvers and independent of wall-clock noise.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass
from math import comb
from typing import Any, Callable

import numpy as np

from . import _kernels
from .model import Instance, PowerAllocation, compute_se, min_rate

# Guard on total enumerated points for the grid oracle.
MAX_GRID_POINTS = 50_000_000


class SolverId(str, enum.Enum):
    FAST = "fast"
    EXACT = "exact"
    DIST = "dist"

    @property
    def order(self) -> int:
        return _SOLVER_ORDER[self]


_SOLVER_ORDER = {SolverId.FAST: 0, SolverId.EXACT: 1, SolverId.DIST: 2}


@dataclass(frozen=True)
class SolverConfig:
    fast_iters: int = 20
    fast_shift_frac: float = 0.1
    exact_bisect_iters: int = 40
    exact_inner_iters: int = 200
    exact_tol_rel: float = 1e-4
    dist_alpha: float = 1.0
    eps: float = 1e-30

    def __post_init__(self) -> None:
        if self.fast_iters < 1 or self.exact_bisect_iters < 1 or self.exact_inner_iters < 1:
            raise ValueError("iteration counts must be positive")
        if not 0 < self.fast_shift_frac < 1:
            raise ValueError("fast_shift_frac must lie in (0, 1)")
        if not self.exact_tol_rel > 0 or not self.dist_alpha > 0:
            raise ValueError("exact_tol_rel and dist_alpha must be positive")

    @classmethod
    def from_dict(cls, d: dict[str, Any] | None) -> SolverConfig:
        return cls(**(d or {}))


@dataclass(frozen=True)
class SolverResult:
    solver: SolverId
    candidate: PowerAllocation
    cost_units: int
    wall_time_s: float
    converged: bool
    self_reported_rate: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "solver": self.solver.value,
            "cost_units": self.cost_units,
            "wall_time_s": self.wall_time_s,
            "converged": self.converged,
            "candidate": self.candidate.eta.tolist(),
        }


def _self_rate(inst: Instance, eta: np.ndarray) -> float:
    return min_rate(compute_se(inst, PowerAllocation(eta)))


def solve_fast(inst: Instance, cfg: SolverConfig = SolverConfig()) -> SolverResult:
    t0 = time.perf_counter()
    eta, evals = _kernels.fast_loop(
        inst.gains, inst.p_max, inst.sigma2, cfg.fast_iters, cfg.fast_shift_frac
    )
    wall = time.perf_counter() - t0
    return SolverResult(
        solver=SolverId.FAST,
        candidate=PowerAllocation(eta),
        cost_units=int(evals) * inst.L * inst.K,
        wall_time_s=wall,
        converged=True,
        self_reported_rate=_self_rate(inst, eta),
    )


def feasibility_inner(
    inst: Instance, target_sinr: float, cfg: SolverConfig = SolverConfig()
) -> tuple[PowerAllocation, bool]:
    """Try to reach a common SINR of ``target_sinr`` within the budgets.

    The returned allocation always respects every per-AP budget; the flag
    says whether the worst user reached the target up to ``exact_tol_rel``.
    """
    eta, ok, _ = _feasibility(inst, target_sinr, cfg)
    return PowerAllocation(eta), ok


def _feasibility(inst: Instance, target_sinr: float, cfg: SolverConfig):
    if target_sinr < 0:
        raise ValueError("target_sinr must be nonnegative")
    eta, ok, evals = _kernels.feasibility_inner(
        inst.gains,
        inst.p_max,
        inst.sigma2,
        float(target_sinr),
        cfg.exact_inner_iters,
        cfg.exact_tol_rel,
        cfg.eps,
    )
    return eta, bool(ok), int(evals)


def sinr_upper_bound(inst: Instance) -> float:
    """Interference-free bound: best user alone with every full budget."""
    coh = (np.sqrt(inst.p_max)[:, None] * inst.gains).sum(axis=0)
    return float((coh**2).max() / inst.sigma2)


def solve_exact(inst: Instance, cfg: SolverConfig = SolverConfig()) -> SolverResult:
    t0 = time.perf_counter()
    lo, hi = 0.0, sinr_upper_bound(inst)
    best = None
    evals = 0
    for _ in range(cfg.exact_bisect_iters):
        mid = 0.5 * (lo + hi)
        eta, ok, n = _feasibility(inst, mid, cfg)
        evals += n
        if ok:
            lo, best = mid, eta
        else:
            hi = mid
    wall = time.perf_counter() - t0
    converged = best is not None
    if best is None:
        best = np.zeros((inst.L, inst.K))
    return SolverResult(
        solver=SolverId.EXACT,
        candidate=PowerAllocation(best),
        cost_units=evals * inst.L * inst.K,
        wall_time_s=wall,
        converged=converged,
        self_reported_rate=_self_rate(inst, best),
    )


def solve_dist(inst: Instance, cfg: SolverConfig = SolverConfig()) -> SolverResult:
    t0 = time.perf_counter()
    w = inst.gains**cfg.dist_alpha
    tot = w.sum(axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        eta = np.where(tot > 0, inst.p_max[:, None] * w / tot, 0.0)
    wall = time.perf_counter() - t0
    return SolverResult(
        solver=SolverId.DIST,
        candidate=PowerAllocation(eta),
        cost_units=inst.L * inst.K,
        wall_time_s=wall,
        converged=True,
        self_reported_rate=_self_rate(inst, eta),
    )


SOLVERS: dict[SolverId, Callable[[Instance, SolverConfig], SolverResult]] = {
    SolverId.FAST: solve_fast,
    SolverId.EXACT: solve_exact,
    SolverId.DIST: solve_dist,
}


def run_solver(solver: SolverId, inst: Instance, cfg: SolverConfig = SolverConfig()) -> SolverResult:
    return SOLVERS[SolverId(solver)](inst, cfg)


def grid_size(n_ap: int, n_ue: int, resolution: int) -> int:
    return comb(resolution + n_ue - 1, n_ue - 1) ** n_ap


def oracle_grid_search(inst: Instance, resolution: int = 64) -> tuple[PowerAllocation, float]:
    """Exhaustive max-min search over budget-saturating simplex grids.

    Each AP splits its full budget over the users in steps of
    ``1/resolution``; every combination across APs is evaluated. Returns
    the best allocation and its min-user SE. Only for tiny instances.
    """
    if inst.L * inst.K > 6:
        raise ValueError(f"oracle limited to L*K <= 6, got {inst.L}x{inst.K}")
    if resolution < 8:
        raise ValueError("resolution must be at least 8")
    n = grid_size(inst.L, inst.K, resolution)
    if n > MAX_GRID_POINTS:
        raise ValueError(f"grid of {n} points exceeds the {MAX_GRID_POINTS} limit")
    eta, _ = _kernels.grid_search(inst.gains, inst.p_max, inst.sigma2, resolution)
    alloc = PowerAllocation(eta)
    return alloc, min_rate(compute_se(inst, alloc))
