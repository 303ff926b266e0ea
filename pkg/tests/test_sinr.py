"""Powers, affectance, feasibility, avgA and power classification."""

from __future__ import annotations

import math

import numpy as np
import pytest

from sinrsched import (
    DeadLinkError,
    Instance,
    Link,
    Point,
    PowerAssignment,
    affectance,
    affectance_matrix,
    affectance_sum,
    classify_power,
    find_dead_links,
    generate_instance,
    is_feasible,
    max_avg_affectance,
    power,
)


def _link(i: int, sx: float, sy: float, rx: float, ry: float) -> Link:
    return Link(id=i, sender=Point(sx, sy), receiver=Point(rx, ry))


def _inst(links, alpha=2.0, beta=1.0, noise=0.0) -> Instance:
    return Instance(links=tuple(links), alpha=alpha, beta=beta, noise=noise)


def test_power_formulas():
    l4 = _link(0, 0.0, 0.0, 4.0, 0.0)
    l2 = _link(0, 0.0, 0.0, 2.0, 0.0)
    assert power(PowerAssignment.mean(), l4, 2.0) == pytest.approx(4.0, rel=1e-12)
    assert power(PowerAssignment.uniform(3.0), l4, 2.0) == 3.0
    assert power(PowerAssignment.uniform(3.0), l2, 5.0) == 3.0
    assert power(PowerAssignment.linear(), l2, 3.0) == pytest.approx(8.0, rel=1e-12)
    assert power(PowerAssignment.custom([2.5, 7.0]), l2, 3.0) == 2.5


def test_power_custom_table_must_cover_link():
    with pytest.raises(ValueError):
        power(PowerAssignment.custom([1.0]), _link(3, 0.0, 0.0, 1.0, 0.0), 2.0)


def test_power_assignment_validation():
    with pytest.raises(ValueError):
        PowerAssignment(kind="quadratic")
    with pytest.raises(ValueError):
        PowerAssignment.uniform(0.0)
    with pytest.raises(ValueError):
        PowerAssignment.custom([])
    with pytest.raises(ValueError):
        PowerAssignment.custom([1.0, -2.0])


def test_affectance_self_is_zero():
    inst = _inst([_link(0, 0.0, 0.0, 1.0, 0.0), _link(1, 9.0, 0.0, 10.0, 0.0)])
    pa = PowerAssignment.uniform()
    assert affectance(inst.links[0], inst.links[0], pa, inst) == 0.0


def test_affectance_hand_computed_quarter():
    # unit-length target, interferer's sender 2 away from the receiver:
    # min(1, (1/2)^2) with beta=1, no noise
    dst = _link(0, 0.0, 0.0, 1.0, 0.0)
    src = _link(1, 3.0, 0.0, 4.0, 0.0)
    inst = _inst([dst, src])
    a = affectance(inst.links[1], inst.links[0], PowerAssignment.uniform(), inst)
    assert a == pytest.approx(0.25, rel=1e-12)


def test_affectance_cap_saturates_at_colocated_sender():
    dst = _link(0, 0.0, 0.0, 1.0, 0.0)
    src = _link(1, 1.0, 0.0, 1.0, 2.0)  # sender sits on dst's receiver
    inst = _inst([dst, src])
    assert affectance(inst.links[1], inst.links[0], PowerAssignment.uniform(), inst) == 1.0


def test_affectance_monotone_in_distance():
    pa = PowerAssignment.uniform()
    last = 2.0
    for d in (1.5, 2.0, 3.0, 5.0, 9.0, 20.0, 100.0):
        dst = _link(0, 0.0, 0.0, 1.0, 0.0)
        src = _link(1, 1.0 + d, 0.0, 2.0 + d, 0.0)
        inst = _inst([dst, src])
        a = affectance(inst.links[1], inst.links[0], pa, inst)
        assert a <= last
        last = a


def test_affectance_matrix_entries_bounded():
    inst = generate_instance(25, 1.0, 10.0, 40.0, 2, alpha=2.5, beta=1.0, noise=0.0)
    m = affectance_matrix(inst, PowerAssignment.mean())
    assert m.shape == (25, 25)
    assert np.all(m >= 0.0)
    assert np.all(m <= 1.0)
    assert np.all(np.diag(m) == 0.0)


def test_affectance_sum_singleton_is_zero():
    inst = generate_instance(5, 1.0, 3.0, 20.0, 6)
    pa = PowerAssignment.mean()
    assert affectance_sum([inst.links[2]], inst.links[2], pa, inst) == 0.0


def test_affectance_sum_two_symmetric_interferers():
    dst = _link(0, 0.0, 0.0, 1.0, 0.0)
    a = _link(1, 3.0, 0.0, 4.0, 0.0)  # sender 2 right of the receiver
    b = _link(2, -1.0, 0.0, -2.0, 0.0)  # sender 2 left of the receiver
    inst = _inst([dst, a, b])
    pa = PowerAssignment.uniform()
    assert affectance_sum(inst.links, inst.links[0], pa, inst) == pytest.approx(0.5, rel=1e-12)


def test_affectance_sum_matches_matrix_accumulation():
    rng = np.random.default_rng(17)
    pa = PowerAssignment.mean()
    for _ in range(25):
        inst = generate_instance(int(rng.integers(2, 15)), 0.5, 6.0, 30.0, int(rng.integers(1 << 30)))
        m = affectance_matrix(inst, pa)
        size = int(rng.integers(1, inst.n + 1))
        S = rng.choice(inst.n, size=size, replace=False)
        dst = int(rng.integers(inst.n))
        expect = float(sum(m[int(s), dst] for s in S))
        got = affectance_sum([int(s) for s in S], dst, pa, inst)
        assert got == pytest.approx(expect, abs=1e-12)


def test_feasible_singleton_without_noise():
    inst = generate_instance(4, 1.0, 5.0, 20.0, 9, beta=2.0)
    assert is_feasible([inst.links[0]], PowerAssignment.uniform(), inst)


def test_infeasible_colocated_pair_at_beta_two():
    a = _link(0, 0.0, 0.0, 1.0, 0.0)
    b = _link(1, 0.0, 0.0, 1.0, 0.0)
    inst = _inst([a, b], beta=2.0)
    pa = PowerAssignment.uniform()
    assert is_feasible([0], pa, inst)
    assert is_feasible([1], pa, inst)
    assert not is_feasible([0, 1], pa, inst)


def test_feasibility_rejects_empty_set():
    inst = generate_instance(3, 1.0, 2.0, 10.0, 5)
    with pytest.raises(ValueError):
        is_feasible([], PowerAssignment.uniform(), inst)


def test_feasibility_monotone_under_subsets():
    rng = np.random.default_rng(23)
    pa = PowerAssignment.mean()
    checked = 0
    for trial in range(40):
        inst = generate_instance(int(rng.integers(4, 20)), 1.0, 8.0, 60.0, trial, alpha=2.5)
        # grow a feasible set greedily, then drop random members
        S = []
        for lid in range(inst.n):
            if is_feasible(S + [lid], pa, inst):
                S.append(lid)
        assert is_feasible(S, pa, inst)
        if len(S) < 2:
            continue
        for _ in range(10):
            size = int(rng.integers(1, len(S)))
            sub = rng.choice(S, size=size, replace=False)
            assert is_feasible([int(x) for x in sub], pa, inst)
            checked += 1
    assert checked > 50


def test_feasible_set_has_unit_affectance_budget():
    # for feasible sets the uncapped sums stay at or below 1
    rng = np.random.default_rng(31)
    pa = PowerAssignment.mean()
    for trial in range(20):
        inst = generate_instance(12, 1.0, 8.0, 50.0, 100 + trial, alpha=2.5)
        S = []
        for lid in range(inst.n):
            if is_feasible(S + [lid], pa, inst):
                S.append(lid)
        for lid in S:
            assert affectance_sum(S, lid, pa, inst, capped=False) <= 1.0 + 1e-12


def test_dead_link_detection_and_errors():
    alive = _link(0, 0.0, 0.0, 0.5, 0.0)
    weak = _link(1, 100.0, 0.0, 102.0, 0.0)  # signal 1/4 vs noise floor 1
    inst = _inst([alive, weak], alpha=2.0, beta=1.0, noise=1.0)
    pa = PowerAssignment.uniform(1.0)
    assert find_dead_links(inst, pa) == [1]
    with pytest.raises(DeadLinkError):
        affectance(inst.links[0], inst.links[1], pa, inst)
    with pytest.raises(DeadLinkError):
        affectance_matrix(inst, pa)
    with pytest.raises(DeadLinkError):
        affectance_sum([0, 1], 1, pa, inst)
    # dead membership makes a set infeasible without raising
    assert not is_feasible([0, 1], pa, inst)
    assert not is_feasible([1], pa, inst)
    assert is_feasible([0], pa, inst)


def test_max_avg_affectance_singleton():
    inst = generate_instance(6, 1.0, 4.0, 25.0, 13)
    assert max_avg_affectance([0], PowerAssignment.mean(), inst) == 0.0


def _pair_instance():
    # symmetric cross distances d with custom powers chosen so the two
    # directed affectances come out 0.3 and 0.1
    d = 0.03**-0.25
    a = _link(0, 0.0, 0.0, 1.0, 0.0)
    b = _link(1, d + 1.0, 0.0, d, 0.0)
    inst = _inst([a, b], alpha=2.0, beta=1.0, noise=0.0)
    pa = PowerAssignment.custom([math.sqrt(3.0), 1.0])
    return inst, pa


def test_max_avg_affectance_pair_beats_singletons():
    inst, pa = _pair_instance()
    assert affectance(inst.links[0], inst.links[1], pa, inst) == pytest.approx(0.3, abs=1e-12)
    assert affectance(inst.links[1], inst.links[0], pa, inst) == pytest.approx(0.1, abs=1e-12)
    assert max_avg_affectance([0, 1], pa, inst, mode="exact") == pytest.approx(0.2, abs=1e-12)
    assert max_avg_affectance([0, 1], pa, inst, mode="greedy") == pytest.approx(0.2, abs=1e-12)


def test_max_avg_affectance_exact_size_limit():
    inst = generate_instance(21, 1.0, 5.0, 40.0, 19)
    with pytest.raises(ValueError):
        max_avg_affectance(range(21), PowerAssignment.mean(), inst, mode="exact")
    with pytest.raises(ValueError):
        max_avg_affectance([0, 1], PowerAssignment.mean(), inst, mode="best")
    with pytest.raises(ValueError):
        max_avg_affectance([], PowerAssignment.mean(), inst)


def test_max_avg_affectance_permutation_invariant():
    rng = np.random.default_rng(41)
    for trial in range(10):
        inst = generate_instance(8, 1.0, 9.0, 25.0, 300 + trial, alpha=2.5)
        pa = PowerAssignment.mean()
        v = max_avg_affectance(range(8), pa, inst, mode="exact")
        perm = rng.permutation(8)
        relabeled = tuple(
            Link(id=i, sender=inst.links[p].sender, receiver=inst.links[p].receiver)
            for i, p in enumerate(perm)
        )
        inst2 = Instance(links=relabeled, alpha=inst.alpha, beta=inst.beta, noise=inst.noise)
        v2 = max_avg_affectance(range(8), pa, inst2, mode="exact")
        assert v2 == pytest.approx(v, rel=1e-12, abs=1e-12)


def test_greedy_peeling_within_factor_two():
    for trial in range(20):
        inst = generate_instance(8, 1.0, 7.0, 30.0, 700 + trial, alpha=2.5)
        pa = PowerAssignment.mean()
        exact = max_avg_affectance(range(8), pa, inst, mode="exact")
        greedy = max_avg_affectance(range(8), pa, inst, mode="greedy")
        assert greedy <= exact + 1e-12
        assert greedy >= exact / 2.0 - 1e-12


def test_classify_power_standard_assignments():
    inst = generate_instance(15, 1.0, 10.0, 50.0, 21, alpha=2.5)
    assert classify_power(PowerAssignment.mean(), inst) == (True, True)
    assert classify_power(PowerAssignment.uniform(2.0), inst) == (True, True)
    assert classify_power(PowerAssignment.linear(), inst) == (True, True)


def test_classify_power_custom_cases():
    short = _link(0, 0.0, 0.0, 1.0, 0.0)
    long = _link(1, 20.0, 0.0, 22.0, 0.0)
    inst = _inst([short, long], alpha=2.0)
    decreasing = classify_power(PowerAssignment.custom([2.0, 1.0]), inst)
    assert decreasing == (False, True)
    steep = classify_power(PowerAssignment.custom([1.0, 100.0]), inst)
    assert steep == (True, False)
