from __future__ import annotations

import json
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from viso.router import (
    BudgetPolicy,
    Descriptor,
    MemoryEntry,
    RouterKind,
    RuleConfig,
    SolverPlan,
    build_memory,
    extract_descriptor,
    gini,
    label_from_trials,
    route_agent,
    route_fixed,
    route_rule,
)
from viso.solvers import SolverId

from .conftest import make_instance, random_instance

F, E, D = SolverId.FAST, SolverId.EXACT, SolverId.DIST


def desc(**kw) -> Descriptor:
    base = dict(
        L=4, K=2, load_ratio=0.5, gamma_target=1.0, budget_mean=1.0, budget_min=1.0,
        gain_log_mean=0.0, gain_log_std=1.0, gain_log_min=-1.0, gain_log_max=1.0, imbalance=0.1,
    )
    base.update(kw)
    return Descriptor(**base)


class TestDescriptor:
    def test_load_ratio(self):
        assert extract_descriptor(make_instance(np.ones((4, 2)))).load_ratio == 0.5
        assert extract_descriptor(make_instance(np.ones((4, 8)))).load_ratio == 2.0

    @pytest.mark.parametrize("x, expected", [([1.0, 1.0, 1.0], 0.0), ([1.0, 0.0], 0.5), ([0.0, 0.0], 0.0)])
    def test_gini(self, x, expected):
        assert gini(np.array(x)) == pytest.approx(expected)

    def test_all_zero_gains(self):
        d = extract_descriptor(make_instance(np.zeros((2, 2))))
        assert np.all(np.isfinite(d.vector()))

    def test_invariant_under_user_permutation(self, rng):
        for _ in range(50):
            inst = random_instance(rng)
            perm = rng.permutation(inst.K)
            a = extract_descriptor(inst).vector()
            b = extract_descriptor(inst.replace(gains=inst.gains[:, perm])).vector()
            np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)

    def test_round_trip(self, rng):
        d = extract_descriptor(random_instance(rng))
        assert Descriptor.from_dict(json.loads(json.dumps(d.to_dict()))) == d


class TestPlans:
    @pytest.mark.parametrize("kind, solver", [("always-fast", F), ("always-exact", E), ("always-dist", D)])
    def test_fixed(self, kind, solver):
        plan = route_fixed(RouterKind(kind))
        assert plan.chain == (solver,)

    @pytest.mark.parametrize("kind", ["rule", "agent"])
    def test_fixed_rejects_routers(self, kind):
        with pytest.raises(ValueError):
            route_fixed(RouterKind(kind))

    def test_plan_validation(self):
        with pytest.raises(ValueError):
            SolverPlan(F, (F, E))
        with pytest.raises(ValueError):
            SolverPlan(F, (E, E))
        with pytest.raises(ValueError):
            BudgetPolicy(max_attempts=0)
        with pytest.raises(ValueError):
            BudgetPolicy(cost_cap=-1)


class TestRule:
    cfg = RuleConfig(theta_gamma=1.0, theta_load=0.5, theta_imb=0.2)

    def test_easy_goes_fast(self):
        assert route_rule(desc(), self.cfg).chain == (F, E, D)

    @pytest.mark.parametrize("field", ["gamma_target", "load_ratio", "imbalance"])
    def test_any_hard_feature_goes_exact(self, field):
        d = replace(desc(), **{field: getattr(desc(), field) + 0.5})
        assert route_rule(d, self.cfg).chain == (E, F, D)

    def test_thresholds_from_train(self, rng):
        train = [random_instance(rng, gamma=float(g)) for g in rng.uniform(0, 2, size=10)]
        cfg = RuleConfig.from_train(train)
        gammas = [t.gamma_target for t in train]
        assert cfg.theta_gamma == pytest.approx(np.quantile(gammas, 0.6))
        assert RuleConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


class TestLabels:
    def test_accepted_beats_feasible(self):
        label, rate = label_from_trials([(F, False, True, 2.0, 1), (E, True, True, 1.0, 9)])
        assert (label, rate) == (E, 1.0)

    def test_rate_then_cost_then_order(self):
        assert label_from_trials([(F, True, True, 1.0, 5), (E, True, True, 1.5, 9)])[0] == E
        assert label_from_trials([(F, True, True, 1.0, 5), (E, True, True, 1.0, 3)])[0] == E
        assert label_from_trials([(D, True, True, 1.0, 5), (E, True, True, 1.0, 5)])[0] == E
        assert label_from_trials([(E, True, True, 1.0, 5), (F, True, True, 1.0, 5)])[0] == F

    def test_feasible_tier(self):
        assert label_from_trials([(F, False, True, 0.3, 1), (D, False, True, 0.4, 1)])[0] == D

    def test_build_memory(self, rng):
        train = [random_instance(rng, gamma=0.1) for _ in range(3)]
        mem = build_memory(train)
        assert [m.instance_id for m in mem] == [t.id for t in train]
        assert MemoryEntry.from_dict(json.loads(json.dumps(mem[0].to_dict()))) == mem[0]
        with pytest.raises(ValueError):
            build_memory([])


def entry(iid, label, **kw):
    return MemoryEntry(desc(**kw), label, 1.0, iid)


class TestAgent:
    memory = [
        entry("a", F, gamma_target=0.5),
        entry("b", E, gamma_target=2.0),
        entry("c", D, gamma_target=3.0),
    ]

    def test_nearest_label_first(self):
        plan = route_agent(desc(gamma_target=0.6), self.memory)
        assert plan.chain == (F, E, D)
        plan = route_agent(desc(gamma_target=2.1), self.memory)
        assert plan.chain == (E, F, D)

    def test_distance_tie_broken_by_id(self):
        mem = [entry("z", D, gamma_target=1.0), entry("y", F, gamma_target=3.0)]
        assert route_agent(desc(gamma_target=2.0), mem).first == F

    def test_vote_tie_goes_to_nearest(self):
        mem = [
            entry("a", F, gamma_target=1.0),
            entry("b", E, gamma_target=1.5),
            entry("c", D, gamma_target=9.0),
        ]
        assert route_agent(desc(gamma_target=1.4), mem, k=2).first == E

    def test_majority(self):
        mem = [entry(str(i), E, gamma_target=1.0 + i) for i in range(2)] + [entry("x", F, gamma_target=0.9)]
        assert route_agent(desc(gamma_target=0.95), mem, k=3).first == E

    def test_errors(self):
        with pytest.raises(ValueError):
            route_agent(desc(), [])
        with pytest.raises(ValueError):
            route_agent(desc(), self.memory, k=4)

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), q=st.floats(0.0, 4.0))
    def test_memory_order_irrelevant(self, seed, q):
        rng = np.random.default_rng(seed)
        mem = [
            entry(f"m{i}", [F, E, D][i % 3], gamma_target=float(rng.uniform(0, 4)), imbalance=float(rng.uniform()))
            for i in range(7)
        ]
        perm = [mem[i] for i in rng.permutation(len(mem))]
        query = desc(gamma_target=q)
        for k in (1, 3):
            assert route_agent(query, mem, k).chain == route_agent(query, perm, k).chain
