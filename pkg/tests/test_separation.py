import itertools

import numpy as np
import pytest

from scflp import compute_cy, follower_best_response, leader_share
from scflp.market import indicator
from scflp.separation import FollowerPool, RelaxPoint, is_integral, separate_ef, separate_gsf, separate_sf
from scflp.verify import greedy_assignment

from conftest import random_choice, random_instance


def test_pool_deduplicates_and_orders_newest_first():
    pool = FollowerPool()
    assert pool.add([1, 0, 1])
    assert pool.add([0, 1, 1])
    assert not pool.add([1, 0, 1])
    assert len(pool) == 2
    members = [tuple(y) for y in pool]
    assert members == [(0, 1, 1), (1, 0, 1)]


def test_sf_exact_separation_golden(golden):
    pool = FollowerPool()
    pt = RelaxPoint(eta=1.6, x=np.array([1.0, 1.0, 0.0]))
    cuts = separate_sf(pt, golden, pool)
    assert len(cuts) == 1
    assert cuts[0].constant == pytest.approx(4 / 3, abs=1e-12)
    assert len(pool) == 1
    assert [tuple(y) for y in pool] == [(1, 1, 1)]
    # second call at the same point hits the pool, not the exact solver
    again = separate_sf(pt, golden, pool)
    assert len(again) == 1 and again[0].provenance == cuts[0].provenance


def test_sf_zero_eta_never_violated(golden):
    pool = FollowerPool()
    pt = RelaxPoint(eta=0.0, x=np.array([1.0, 0.0, 1.0]))
    assert separate_sf(pt, golden, pool) == []


def test_sf_feasible_point_certified():
    rng = np.random.default_rng(7)
    inst = random_instance(rng, m=4, n=6, p=2, r=2)
    x = random_choice(rng, 6, 2)
    _, val = follower_best_response(inst, x)
    pt = RelaxPoint(eta=val, x=np.asarray(x, dtype=float))
    assert separate_sf(pt, inst, FollowerPool()) == []


def test_sf_fractional_uses_rounded_support_and_pool_only(golden):
    pool = FollowerPool()
    # fractional point, empty pool: the heuristic has nothing to offer
    pt = RelaxPoint(eta=2.0, x=np.array([0.5, 0.5, 0.5]))
    assert separate_sf(pt, golden, pool) == []
    assert len(pool) == 0  # no exact call at fractional points
    pool.add([1, 1, 1])
    cuts = separate_sf(pt, golden, pool)
    # ties at one half round up: support {0,1,2}, constant 3/2, violated by 2.0
    assert len(cuts) == 1
    assert cuts[0].constant == pytest.approx(3 / 2, abs=1e-12)
    assert cuts[0].provenance[2] == (0, 1, 2)


def test_gsf_cuts_off_classic_relaxation_optimum(golden):
    pool = FollowerPool()
    pt = RelaxPoint(eta=25 / 18, x=np.array([2 / 3, 2 / 3, 2 / 3]))
    cuts = separate_gsf(pt, golden, pool)
    assert len(cuts) == 1
    assert pt.eta > cuts[0].rhs_at(pt.x) + 1e-8
    # the exact reduction value is the anchor-cut optimum 4/3
    assert cuts[0].rhs_at(pt.x) == pytest.approx(4 / 3, abs=1e-9)


def test_gsf_certifies_anchor_relaxation_optimum(golden):
    pt = RelaxPoint(eta=4 / 3, x=np.array([1.0, 1.0, 0.0]))
    assert separate_gsf(pt, golden, FollowerPool()) == []


def test_gsf_zero_mass_point(golden):
    pool = FollowerPool()
    pt = RelaxPoint(eta=0.1, x=np.zeros(3))
    cuts = separate_gsf(pt, golden, pool)
    assert len(cuts) == 1
    assert cuts[0].constant == pytest.approx(0.0, abs=1e-12)


def test_gsf_pool_hit_skips_exact(golden):
    pool = FollowerPool()
    pool.add([1, 1, 1])
    pt = RelaxPoint(eta=1.6, x=np.array([1.0, 1.0, 0.0]))
    cuts = separate_gsf(pt, golden, pool)
    assert len(cuts) == 1
    assert len(pool) == 1  # nothing new was added


def test_ef_zero_assignment_violated(golden):
    pt = RelaxPoint(eta=0.5, x=np.array([1.0, 1.0, 0.0]), z=np.zeros((3, 3)))
    cuts = separate_ef(pt, golden)
    assert len(cuts) == 1 and cuts[0].kind == "EF"


def test_ef_certifies_optimal_point(golden):
    x = np.array([1.0, 1.0, 0.0])
    z = greedy_assignment(golden, x)
    pt = RelaxPoint(eta=4 / 3, x=x, z=z)
    assert separate_ef(pt, golden) == []


def test_ef_exactness_against_enumeration():
    rng = np.random.default_rng(11)
    for _ in range(25):
        inst = random_instance(rng, m=3, n=5, p=2, r=2)
        z = rng.uniform(0.0, 1.0, size=(3, 5))
        best = min(
            float(inst.w @ (compute_cy(inst, indicator(5, combo)) * z).sum(axis=1))
            for combo in itertools.combinations(range(5), 2)
        )
        # barely feasible: certified; clearly infeasible: cut returned
        assert separate_ef(RelaxPoint(eta=best - 1e-9, x=np.zeros(5), z=z), inst) == []
        assert len(separate_ef(RelaxPoint(eta=best + 1e-3, x=np.zeros(5), z=z), inst)) == 1


def test_exactness_at_integral_points_all_families():
    """Empty separation at an integral point implies eta is at most the
    minimum cut right-hand side over every follower choice (oracle:
    enumeration of the whole follower set)."""
    rng = np.random.default_rng(13)
    for _ in range(20):
        inst = random_instance(rng, m=3, n=6, p=2, r=2)
        x = random_choice(rng, 6, 2)
        xf = np.asarray(x, dtype=float)
        _, val = follower_best_response(inst, x)
        for eta, expect_cut in ((val - 1e-8, False), (val + 1e-3, True)):
            pt = RelaxPoint(eta=eta, x=xf)
            sf = separate_sf(pt, inst, FollowerPool())
            gsf = separate_gsf(pt, inst, FollowerPool())
            assert (len(sf) > 0) == expect_cut
            assert (len(gsf) > 0) == expect_cut
        truth = min(leader_share(inst, x, indicator(6, c)) for c in itertools.combinations(range(6), 2))
        assert truth == pytest.approx(val, rel=1e-12)


def test_pool_grows_one_member_per_exact_call():
    rng = np.random.default_rng(17)
    inst = random_instance(rng, m=3, n=6, p=2, r=2)
    pool = FollowerPool()
    sizes = []
    for _ in range(8):
        x = random_choice(rng, 6, 2)
        separate_gsf(RelaxPoint(eta=inst.total_demand, x=np.asarray(x, dtype=float)), inst, pool)
        sizes.append(len(pool))
    assert all(b - a in (0, 1) for a, b in zip([0] + sizes, sizes))
    members = [tuple(y) for y in pool]
    assert len(set(members)) == len(members)


def test_returned_cuts_are_sound():
    """No returned cut undercuts any achievable (best-response value, x)."""
    rng = np.random.default_rng(19)
    for _ in range(10):
        inst = random_instance(rng, m=3, n=5, p=2, r=2)
        pool = FollowerPool()
        collected = []
        for _ in range(6):
            x = rng.uniform(0.0, 1.0, size=5)
            x = x * inst.p / x.sum()
            pt = RelaxPoint(eta=float(inst.total_demand), x=np.clip(x, 0.0, 1.0))
            collected += separate_gsf(pt, inst, pool)
            collected += separate_sf(pt, inst, pool)
        for combo in itertools.combinations(range(5), 2):
            x = indicator(5, combo)
            _, val = follower_best_response(inst, x, mode="enumerate")
            for cut in collected:
                assert cut.rhs_at(np.asarray(x, dtype=float)) >= val - 1e-9


def test_is_integral_tolerance():
    assert is_integral(np.array([1.0 - 1e-8, 1e-8, 1.0]))
    assert not is_integral(np.array([0.5, 1.0, 0.0]))
