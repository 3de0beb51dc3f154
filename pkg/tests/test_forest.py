import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from socialbotnet.forest import (
    ForestValidationError,
    InfeasibleBudgetError,
    RetweetForest,
    SpamParams,
    UndefinedDelayError,
    brute_force_optimum,
    build_forest,
    compute_delay,
    compute_phi,
    independent_forest,
    independent_objective,
    objective,
    default_lags,
    retweet_quota,
    validate,
)
from socialbotnet.graph import BotnetInstance


def disjoint_botnet(sizes):
    """Bot ``i`` (1-based) gets ``sizes[i-1]`` private followers."""
    return BotnetInstance(
        tuple(range(1, len(sizes) + 1)),
        {i: {1000 * i + j for j in range(s)} for i, s in enumerate(sizes, 1)},
    )


@st.composite
def small_instances(draw, max_n=6, max_k=3):
    n = draw(st.integers(1, max_n))
    bots = tuple(range(100, 100 + n))
    followers = {b: draw(st.frozensets(st.integers(0, 11), min_size=1, max_size=6)) for b in bots}
    M = draw(st.integers(1, min(max_k, n)))
    K = draw(st.integers(M, max_k))
    c = draw(st.integers(M, min(3, n) if M <= min(3, n) else M))
    r = draw(st.sampled_from([0.2, 0.3, 0.5]))
    alpha = draw(st.sampled_from([0.0, 0.3, 0.65, 1.0]))
    lags = (0.0,) + tuple(draw(st.floats(0.1, 3.0)) for _ in range(K - 1))
    return BotnetInstance(bots, followers), SpamParams(alpha=alpha, r=r, M=M, K=K, c=c, lags=lags)


def test_default_lags():
    lags = default_lags(10)
    assert lags[:3] == (0.0, 1.0, 1.5)
    assert len(lags) == 10
    # a level-3 follower waits t1 + t2 + t3
    assert sum(lags[:3]) == 2.5


def test_retweet_quota_is_exact():
    assert retweet_quota(32, 0.2) == 8
    assert retweet_quota(33, 0.2) == 9
    assert retweet_quota(3, 0.5) == 3
    assert retweet_quota(0, 0.2) == 0


def test_params_checks():
    with pytest.raises(InfeasibleBudgetError):
        SpamParams(M=3, c=2)
    with pytest.raises(ValueError):
        SpamParams(M=4, K=3)
    with pytest.raises(ValueError):
        SpamParams(r=1.0)
    with pytest.raises(ValueError):
        SpamParams(K=2, M=1, lags=(0.5, 1.0))


class TestPhiAndDelay:
    def test_single_level(self):
        bn = BotnetInstance((1, 2), {1: {10, 11}, 2: {11, 12}})
        phi = compute_phi(RetweetForest(((1, 2),), {}), bn)
        assert phi == [frozenset({10, 11, 12})]

    def test_two_levels(self):
        bn = BotnetInstance((1, 2), {1: {10, 11}, 2: {11, 12}})
        phi = compute_phi(RetweetForest(((1,), (2,)), {2: 1}), bn)
        assert phi == [frozenset({10, 11}), frozenset({12})]

    def test_random_forest_matches_min_level_scan(self):
        rng = random.Random(3)
        bots = tuple(range(8))
        bn = BotnetInstance(bots, {b: set(rng.sample(range(100, 130), rng.randint(0, 8))) for b in bots})
        order = list(bots)
        rng.shuffle(order)
        levels = [order[:2], order[2:3], order[3:6], order[6:]]
        phi = compute_phi(RetweetForest(tuple(map(tuple, levels)), {}), bn)
        first = {}
        for k, lv in enumerate(levels):
            for b in lv:
                for f in bn.followers[b]:
                    first[f] = min(first.get(f, k), k)
        for k in range(len(levels)):
            assert phi[k] == {f for f, lv in first.items() if lv == k}

    def test_delay_two_levels(self):
        # (3 * 0 + 2 * 1.0) / 5
        phi = [set(range(3)), {10, 11}]
        assert compute_delay(phi, [0.0, 1.0]) == pytest.approx(0.4, abs=1e-15)

    def test_delay_zero_when_all_first_level(self):
        assert compute_delay([{1, 2, 3}, set()], default_lags(2)) == 0.0

    def test_delay_default_lags_level_three(self):
        assert compute_delay([set(), set(), {7}], default_lags(3)) == 2.5

    def test_empty_coverage(self):
        with pytest.raises(UndefinedDelayError):
            compute_delay([set(), set()], [0.0, 1.0])


class TestObjective:
    def setup_method(self):
        self.bn = disjoint_botnet([1, 2, 3, 4, 5])
        self.forest = RetweetForest(((2,), (1,), (3,), (4, 5)), {1: 2, 3: 1, 4: 3, 5: 3})

    def test_alpha_one_is_lost_ratio(self):
        p = SpamParams(alpha=1.0, r=0.5, M=3, K=4, c=3)
        m = objective(self.forest, self.bn, p)
        assert m.objective_f == len(m.lost_followers) / len(m.coverage) == 6 / 15

    def test_alpha_zero_is_delay(self):
        p = SpamParams(alpha=0.0, r=0.5, M=3, K=4, c=3)
        m = objective(self.forest, self.bn, p)
        # levels 1..4 hold 2, 1, 3, 9 followers; cumulative lags 0, 1, 2.5, 4.5
        assert m.tau == pytest.approx((0 * 2 + 1 * 1 + 2.5 * 3 + 4.5 * 9) / 15)
        assert m.objective_f == m.tau

    def test_metric_invariants(self):
        m = objective(self.forest, self.bn, SpamParams(alpha=0.5, r=0.5, M=3, K=4, c=3))
        assert frozenset().union(*m.phi) == m.coverage
        assert sum(len(p) for p in m.phi) == len(m.coverage)
        assert m.lost_followers <= m.coverage
        assert m.suspended == {1, 2, 3}
        assert m.coverage_ratio == 1.0

    def test_fig1a_independent_layout(self):
        bn = disjoint_botnet([3] * 12)
        for alpha in (0.2, 0.65, 0.9):
            p = SpamParams(alpha=alpha, M=3, K=10, c=12)
            m = objective(independent_forest(bn), bn, p)
            assert m.tau == 0.0
            assert m.lost_followers == m.coverage
            assert m.objective_f == alpha * p.beta_scale == independent_objective(p)

    def test_invalid_forest_raises(self):
        p = SpamParams(alpha=0.5, r=0.5, M=3, K=3, c=3)
        with pytest.raises(ForestValidationError) as exc:
            objective(self.forest, self.bn, p)
        assert [v.constraint for v in exc.value.violations] == ["height"]


def test_independent_objective():
    assert independent_objective(SpamParams(alpha=0.4)) == 0.4
    assert independent_objective(SpamParams(alpha=0.9)) == 0.9
    assert independent_objective(SpamParams(alpha=0.0)) == 0.0


class TestValidate:
    def test_valid(self):
        bn = disjoint_botnet([1, 2, 3, 4, 5])
        f = RetweetForest(((2,), (1,), (3,), (4, 5)), {1: 2, 3: 1, 4: 3, 5: 3})
        assert validate(f, bn, SpamParams(r=0.5, M=3, K=4, c=3)) == []

    def test_height(self):
        bn = disjoint_botnet([4, 4, 4])
        f = RetweetForest(((1,), (2,), (3,)), {2: 1, 3: 2})
        v = validate(f, bn, SpamParams(r=0.5, M=1, K=2, c=1))
        assert [x.constraint for x in v] == ["height"]
        assert v[0].level == 3

    def test_capacity_exceeded_by_one(self):
        # bot 1 has 3 followers -> quota ceil(0.5 * 3 / 0.5) = 3; give level 2 four bots
        bn = disjoint_botnet([3, 1, 1, 1, 1])
        f = RetweetForest(((1,), (2, 3, 4, 5)), {2: 1, 3: 1, 4: 1, 5: 1})
        v = validate(f, bn, SpamParams(r=0.5, M=1, K=3, c=1))
        kinds = {(x.constraint, x.level) for x in v}
        assert ("capacity", 2) in kinds

    def test_prefix_exempt_from_capacity(self):
        bn = disjoint_botnet([1, 1, 1, 1, 1])
        f = RetweetForest(((1,), (2, 3, 4, 5)), {2: 1, 3: 1, 4: 1, 5: 1})
        assert validate(f, bn, SpamParams(r=0.2, M=2, K=3, c=5)) == []

    def test_disjoint_parent_and_membership(self):
        bn = disjoint_botnet([2, 2, 2])
        f = RetweetForest(((1, 2), (2, 9)), {2: 1, 9: 1})
        kinds = {x.constraint for x in validate(f, bn, SpamParams(r=0.5, M=1, K=3, c=3))}
        assert {"disjointness", "membership", "budget"} <= kinds or {"disjointness", "membership"} <= kinds
        f2 = RetweetForest(((1,), (), (2,)), {2: 1})
        assert "parent" in {x.constraint for x in validate(f2, bn, SpamParams(r=0.5, M=1, K=3, c=3))}


class TestBuildForest:
    def test_hand_traced_example(self):
        bn = disjoint_botnet([1, 2, 3, 4, 5])
        p = SpamParams(alpha=0.5, r=0.5, M=3, K=4, c=3)
        f = build_forest(bn, p)
        assert f.levels == ((2,), (1,), (3,), (4, 5))
        assert f.main_root == 2
        assert f.parent == {1: 2, 3: 1, 4: 3, 5: 3}
        assert validate(f, bn, p) == []
        m = objective(f, bn, p)
        assert len(m.coverage) == 15
        assert m.lost_followers == bn.followers[1] | bn.followers[2] | bn.followers[3]
        _, best = brute_force_optimum(bn, p)
        assert best <= m.objective_f

    def test_budget_equal_depth_gives_a_line(self):
        bn = disjoint_botnet([5, 6, 7, 8, 9, 10])
        p = SpamParams(r=0.2, M=3, K=10, c=3)
        f = build_forest(bn, p)
        assert [len(lv) for lv in f.levels[:3]] == [1, 1, 1]

    def test_identical_follower_sets(self):
        bots = tuple(range(1, 7))
        bn = BotnetInstance(bots, {b: {91, 92, 93, 94} for b in bots})
        p = SpamParams(alpha=0.6, r=0.2, M=2, K=4, c=2)
        f = build_forest(bn, p)
        assert validate(f, bn, p) == []
        m = objective(f, bn, p)
        assert m.tau == 0.0 and len(m.coverage) == 4
        _, best = brute_force_optimum(bn, p)
        assert best <= m.objective_f

    def test_budget_errors(self):
        bn = disjoint_botnet([1, 2])
        with pytest.raises(ValueError):
            build_forest(bn, SpamParams(M=1, c=3))

    def test_surplus_prefix_bots_become_roots(self):
        # 8 bots, c = 6: level 3 gets 4 bots with quota 2 each but only 2 bots remain
        bn = disjoint_botnet([8, 8, 8, 8, 8, 8, 8, 8])
        p = SpamParams(r=0.2, M=3, K=10, c=6)
        f = build_forest(bn, p)
        assert validate(f, bn, p) == []
        assert any(fl.startswith("moved_level_3") for fl in f.flags)
        assert len(f.roots) > 1
        assert len(f.levels[2]) >= 1
        assert sum(retweet_quota(8, 0.2) for _ in f.levels[2]) >= len(f.levels[3])

    def test_json_roundtrip(self):
        bn = disjoint_botnet([1, 2, 3, 4, 5])
        f = build_forest(bn, SpamParams(r=0.5, M=3, K=4, c=3))
        assert RetweetForest.from_json(f.to_json()) == f


class TestBruteForce:
    def test_single_bot(self):
        bn = disjoint_botnet([4])
        p = SpamParams(alpha=0.3, M=1, K=2, c=1, r=0.2)
        f, best = brute_force_optimum(bn, p)
        assert f.levels == ((1,),)
        assert best == pytest.approx(0.3)

    def test_guard(self):
        with pytest.raises(ValueError):
            brute_force_optimum(disjoint_botnet([1] * 9), SpamParams(M=1, K=3, c=1))
        with pytest.raises(ValueError):
            brute_force_optimum(disjoint_botnet([1] * 3), SpamParams(M=1, K=5, c=1))

    def test_zero_delay_optimum_at_alpha_zero(self):
        # with alpha = 0 only delay counts, and any single-level layout has zero delay
        bn = disjoint_botnet([2, 3, 4])
        p = SpamParams(alpha=0.0, M=1, K=3, c=3, r=0.2)
        f, best = brute_force_optimum(bn, p)
        assert best == 0.0
        assert len(f.levels) == 1


@settings(max_examples=150, deadline=None)
@given(small_instances())
def test_heuristic_is_feasible_and_never_beats_oracle(inst):
    bn, p = inst
    f = build_forest(bn, p)
    assert validate(f, bn, p) == []
    h = objective(f, bn, p).objective_f
    of, best = brute_force_optimum(bn, p)
    assert validate(of, bn, p) == []
    assert best <= h + 1e-12
    assert objective(of, bn, p).objective_f == pytest.approx(best, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(small_instances(), st.lists(st.floats(0.0, 5.0), min_size=9, max_size=9))
def test_alpha_one_ignores_lags(inst, new_lags):
    bn, p = inst
    f = build_forest(bn, p)
    p1 = SpamParams(alpha=1.0, r=p.r, M=p.M, K=p.K, c=p.c, lags=p.lags)
    p2 = SpamParams(alpha=1.0, r=p.r, M=p.M, K=p.K, c=p.c, lags=(0.0,) + tuple(new_lags[: p.K - 1]))
    assert objective(f, bn, p1).objective_f == objective(f, bn, p2).objective_f


@settings(max_examples=100, deadline=None)
@given(small_instances())
def test_phi_union_is_placed_followers(inst):
    bn, p = inst
    f = build_forest(bn, p)
    phi = compute_phi(f, bn)
    placed = set().union(*(bn.followers[b] for b in f.placed))
    assert frozenset().union(*phi) == placed
    assert sum(map(len, phi)) == len(placed)


def test_adding_deep_bot_never_shrinks_coverage():
    rng = random.Random(11)
    for _ in range(50):
        bots = tuple(range(6))
        bn = BotnetInstance(bots, {b: set(rng.sample(range(100, 120), rng.randint(0, 6))) for b in bots})
        base = RetweetForest(((0,), (1,), (2,), (3,)), {1: 0, 2: 1, 3: 2})
        grown = RetweetForest(((0,), (1,), (2,), (3, 4)), {1: 0, 2: 1, 3: 2, 4: 2})
        c0 = frozenset().union(*compute_phi(base, bn))
        c1 = frozenset().union(*compute_phi(grown, bn))
        assert c0 <= c1


@pytest.mark.parametrize("seed", range(5))
def test_full_scale_forest_is_valid(seed):
    from socialbotnet.synth import SynthFollowerConfig, gen_follower_sets

    bn = gen_follower_sets(SynthFollowerConfig(n=400, rng_seed=seed))
    p = SpamParams(alpha=0.9, c=20)
    f = build_forest(bn, p)
    assert validate(f, bn, p) == []
    assert f.placed == set(bn.bots)
    assert math.isfinite(objective(f, bn, p).objective_f)
