"""Rate vectors and Bernoulli arrival sampling."""

from __future__ import annotations

import numpy as np
import pytest

from sinrsched import (
    Instance,
    Link,
    Point,
    PowerAssignment,
    RateVector,
    build_rate_vector,
    parse_rate_vector,
    rate_vector_to_text,
    sample,
    validate_rate_vector,
    zero_rate_vector,
)
from sinrsched import generate_instance, is_feasible
from sinrsched.rng import STREAM_ARRIVALS, stream_rng


def _far_apart_instance(n: int, beta: float = 1.0) -> Instance:
    links = tuple(
        Link(id=i, sender=Point(1000.0 * i, 0.0), receiver=Point(1000.0 * i + 1.0, 0.0))
        for i in range(n)
    )
    return Instance(links=links, alpha=2.5, beta=beta, noise=0.0)


def _colocated_instance(n: int) -> Instance:
    links = tuple(
        Link(id=i, sender=Point(0.0, 0.0), receiver=Point(1.0, 0.0)) for i in range(n)
    )
    return Instance(links=links, alpha=2.0, beta=2.0, noise=0.0)


def test_build_rate_vector_uniform_weights():
    inst = generate_instance(30, 1.0, 10.0, 30.0, 3, alpha=2.5)
    pa = PowerAssignment.mean()
    rv = build_rate_vector(inst, pa, 0.5)
    T = len(rv.sets)
    assert T >= 1
    assert sum(rv.weights) == pytest.approx(0.5, abs=1e-12)
    assert all(w == pytest.approx(0.5 / T, abs=1e-15) for w in rv.weights)
    assert all(r == pytest.approx(0.5 / T, abs=1e-12) for r in rv.rates)
    assert max(rv.rates) <= 0.5
    validate_rate_vector(rv, pa, inst)


def test_build_rate_vector_jointly_feasible_instance():
    inst = _far_apart_instance(6)
    pa = PowerAssignment.uniform()
    assert is_feasible(range(6), pa, inst)
    rv = build_rate_vector(inst, pa, 0.8)
    assert len(rv.sets) == 1
    assert rv.rates == (0.8,) * 6


def test_build_rate_vector_pairwise_infeasible_instance():
    inst = _colocated_instance(3)
    pa = PowerAssignment.uniform()
    rv = build_rate_vector(inst, pa, 0.9)
    assert len(rv.sets) == 3
    assert all(len(s) == 1 for s in rv.sets)
    assert all(r == pytest.approx(0.3, abs=1e-12) for r in rv.rates)


def test_build_rate_vector_rejects_bad_gamma():
    inst = _far_apart_instance(2)
    pa = PowerAssignment.uniform()
    with pytest.raises(ValueError):
        build_rate_vector(inst, pa, 0.0)
    with pytest.raises(ValueError):
        build_rate_vector(inst, pa, -0.1)
    with pytest.raises(ValueError):
        build_rate_vector(inst, pa, 1.2)
    build_rate_vector(inst, pa, 1.0)


def test_zero_rate_vector_never_emits_packets():
    inst = _far_apart_instance(4)
    rv = zero_rate_vector(inst)
    rng = stream_rng(1, STREAM_ARRIVALS)
    for t in range(200):
        assert not sample(rv, t, rng).any()


def test_degenerate_rate_one_always_emits():
    inst = _far_apart_instance(3)
    pa = PowerAssignment.uniform()
    rv = build_rate_vector(inst, pa, 1.0)
    assert rv.rates == (1.0, 1.0, 1.0)
    rng = stream_rng(2, STREAM_ARRIVALS)
    for t in range(200):
        assert sample(rv, t, rng).all()


def test_sample_empirical_mean():
    rv = RateVector(rates=(0.3,), sets=((0,),), weights=(0.3,), gamma=0.3)
    rng = stream_rng(3, STREAM_ARRIVALS)
    draws = np.array([sample(rv, t, rng)[0] for t in range(100000)])
    assert abs(draws.mean() - 0.3) < 0.005


def test_sample_pairwise_independence():
    rv = RateVector(
        rates=(0.3, 0.3, 0.3),
        sets=((0,), (1,), (2,)),
        weights=(0.1,) * 3,
        gamma=0.3,
    )
    # decomposition above is not meant to be consistent; sampling only reads rates
    rng = stream_rng(4, STREAM_ARRIVALS)
    x = np.array([sample(rv, t, rng) for t in range(100000)], dtype=np.float64)
    for i in range(3):
        for j in range(i + 1, 3):
            cov = float((x[:, i] * x[:, j]).mean() - x[:, i].mean() * x[:, j].mean())
            assert abs(cov) < 0.005


def test_validate_rate_vector_rejects_inconsistencies():
    inst = _colocated_instance(2)
    pa = PowerAssignment.uniform()
    ok = build_rate_vector(inst, pa, 0.4)
    validate_rate_vector(ok, pa, inst)

    bad_gamma = RateVector(rates=ok.rates, sets=ok.sets, weights=ok.weights, gamma=0.5)
    with pytest.raises(ValueError):
        validate_rate_vector(bad_gamma, pa, inst)

    bad_rates = RateVector(rates=(0.4, 0.2), sets=ok.sets, weights=ok.weights, gamma=0.4)
    with pytest.raises(ValueError):
        validate_rate_vector(bad_rates, pa, inst)

    infeasible_set = RateVector(rates=(0.4, 0.4), sets=((0, 1),), weights=(0.4,), gamma=0.4)
    with pytest.raises(ValueError):
        validate_rate_vector(infeasible_set, pa, inst)

    empty_set = RateVector(rates=(0.4, 0.0), sets=((0,), ()), weights=(0.4, 0.0), gamma=0.4)
    with pytest.raises(ValueError):
        validate_rate_vector(empty_set, pa, inst)

    wrong_n = RateVector(rates=(0.1,), sets=((0,),), weights=(0.1,), gamma=0.1)
    with pytest.raises(ValueError):
        validate_rate_vector(wrong_n, pa, inst)

    out_of_range = RateVector(rates=(1.2, 1.2), sets=((0,), (1,)), weights=(1.2, 1.2), gamma=2.4)
    with pytest.raises(ValueError):
        validate_rate_vector(out_of_range, pa, inst)


def test_rate_vector_text_round_trip():
    inst = generate_instance(14, 1.0, 6.0, 30.0, 8, alpha=2.5)
    pa = PowerAssignment.mean()
    rv = build_rate_vector(inst, pa, 0.35)
    text = rate_vector_to_text(rv)
    back = parse_rate_vector(text, inst.n)
    assert back == rv
    assert rate_vector_to_text(back) == text


def test_parse_rate_vector_rejects_malformed_text():
    with pytest.raises(ValueError):
        parse_rate_vector("", 3)
    with pytest.raises(ValueError):
        parse_rate_vector("0.5\n", 3)  # header too short
    with pytest.raises(ValueError):
        parse_rate_vector("0.5 2\n0.5: 0 1\n", 3)  # missing set line
    with pytest.raises(ValueError):
        parse_rate_vector("0.5 1\n0.5 0 1\n", 3)  # no colon
    with pytest.raises(ValueError):
        parse_rate_vector("0.5 1\n0.5: 0 9\n", 3)  # unknown link id
