from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from viso.model import PowerAllocation, compute_se, min_rate
from viso.verifier import AcceptanceCriterion, check_feasible, verify

from .conftest import make_instance, random_alloc, random_instance

R_THIRD = 0.41503749927884376  # log2(4/3)


class TestCheckFeasible:
    def test_at_budget(self, sym12):
        assert check_feasible(sym12, PowerAllocation([[0.5, 0.5]])) == (True, [])

    def test_over_budget(self, sym12):
        ok, viol = check_feasible(sym12, PowerAllocation([[0.6, 0.5]]))
        assert not ok
        assert len(viol) == 1 and viol[0][0] == 0
        assert viol[0][1] == pytest.approx(0.1)

    def test_zeros(self, rng):
        inst = random_instance(rng)
        assert check_feasible(inst, PowerAllocation.zeros(inst.L, inst.K))[0]

    def test_negative_entry_infeasible(self, sym12):
        ok, viol = check_feasible(sym12, PowerAllocation([[-0.1, 0.5]]))
        assert not ok and viol == []

    def test_shape_mismatch(self, sym12):
        with pytest.raises(ValueError):
            check_feasible(sym12, PowerAllocation([[0.1]]))


class TestVerify:
    def test_accepts_below_target(self, sym12):
        rep = verify(sym12, PowerAllocation([[0.5, 0.5]]), AcceptanceCriterion(0.4))
        assert rep.feasible and rep.accepted
        assert rep.r_ver == pytest.approx(R_THIRD, rel=1e-12)
        assert rep.margin == pytest.approx(R_THIRD - 0.4)

    def test_rejects_above_target(self, sym12):
        rep = verify(sym12, PowerAllocation([[0.5, 0.5]]), AcceptanceCriterion(0.5))
        assert rep.feasible and not rep.accepted

    def test_over_budget_never_accepted(self, sym12):
        rep = verify(sym12, PowerAllocation([[5.0, 5.0]]), AcceptanceCriterion(0.0))
        assert not rep.feasible and not rep.accepted

    def test_zero_target_accepts_feasible(self, sym12):
        assert verify(sym12, PowerAllocation([[0.0, 0.0]]), AcceptanceCriterion(0.0)).accepted

    @pytest.mark.parametrize("bad", [np.nan, np.inf])
    def test_non_finite_rejected_not_raised(self, sym12, bad):
        rep = verify(sym12, PowerAllocation([[bad, 0.5]]), AcceptanceCriterion(0.0))
        assert not rep.feasible and not rep.accepted and rep.r_ver == 0.0

    def test_rate_tolerance(self, sym12):
        alloc = PowerAllocation([[0.5, 0.5]])
        just_above = R_THIRD * (1 + 5e-7)
        assert verify(sym12, alloc, AcceptanceCriterion(just_above)).accepted
        assert not verify(sym12, alloc, AcceptanceCriterion(R_THIRD * 1.01)).accepted

    def test_feasibility_tolerance(self, sym12):
        crit = AcceptanceCriterion(0.0)
        assert verify(sym12, PowerAllocation([[0.5, 0.5 + 5e-10]]), crit).feasible
        assert not verify(sym12, PowerAllocation([[0.5, 0.5 + 1e-8]]), crit).feasible

    def test_report_json(self, sym12):
        d = verify(sym12, PowerAllocation([[0.6, 0.5]]), AcceptanceCriterion(0.1)).to_dict()
        assert set(d) == {"feasible", "r_ver", "accepted", "margin", "violations"}

    @pytest.mark.parametrize("tol", [0.0, 0.02, -1e-9])
    def test_criterion_tolerance_range(self, tol):
        with pytest.raises(ValueError):
            AcceptanceCriterion(0.1, feas_tol_rel=tol)


def test_verify_recomputes_and_is_deterministic(rng):
    for _ in range(200):
        inst = random_instance(rng)
        alloc = random_alloc(rng, inst)
        crit = AcceptanceCriterion(float(rng.uniform(0, 2)))
        a, b = verify(inst, alloc, crit), verify(inst, alloc, crit)
        assert a == b
        assert a.r_ver == min_rate(compute_se(inst, alloc))
        if a.accepted:
            assert a.feasible


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), g1=st.floats(0.0, 3.0), g2=st.floats(0.0, 3.0))
def test_acceptance_monotone_in_target(seed, g1, g2):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng)
    alloc = random_alloc(rng, inst)
    lo, hi = sorted((g1, g2))
    if verify(inst, alloc, AcceptanceCriterion(hi)).accepted:
        assert verify(inst, alloc, AcceptanceCriterion(lo)).accepted


def test_verifier_ignores_solver_metadata(asym12):
    from dataclasses import replace

    from viso.solvers import solve_fast

    res = solve_fast(asym12)
    crit = AcceptanceCriterion(0.3)
    honest = verify(asym12, res.candidate, crit)
    lying = replace(res, self_reported_rate=99.0, converged=False, cost_units=0)
    assert verify(asym12, lying.candidate, crit) == honest
