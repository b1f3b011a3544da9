import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import gammaincc

from fkriesz import potential as P
from fkriesz import riesz as R
from fkriesz.potential import ValidationError

FEW = R.MCParams(n_paths=4, dt=1e-3, dt_body=1e-2, seed=0)


@given(st.floats(0.2, 3.0), st.floats(0.05, 20.0))
def test_time_nodes_integrate_exponentials(a, lam):
    # (1/Gamma(a)) int_0^T e^{-lam t} t^{a-1} dt = (1 - Gamma(a, lam T)/Gamma(a)) lam^{-a}
    tau = min(1.0, 1.0 / lam)
    T = 40.0
    nodes = R.time_nodes(a, tau, T, 64, 400)
    v = sum(w * math.exp(-lam * t) for _, t, w in nodes)
    exact = (1.0 - gammaincc(a, lam * T)) * lam ** -a
    assert v == pytest.approx(exact, rel=2e-4)


def test_time_nodes_parts_and_breaks():
    nodes = R.time_nodes(0.5, 0.25, 8.0, 16, 32, breaks=[2.0, 4.0])
    heads = [t for p, t, _ in nodes if p == "head"]
    body = [t for p, t, _ in nodes if p == "body"]
    assert max(heads) <= 1.0 and min(body) == 1.0 and max(body) == 8.0
    assert 2.0 in body and 4.0 in body
    assert all(w > 0 for _, _, w in nodes)


def test_tail_bound_formula():
    v = R.tail_bound(2.0, 0.5, 0.7, 1.2, 10.0)
    assert v == pytest.approx(2.0 * 1.5 * 1.2 * gammaincc(0.5, 7.0) / 0.7 ** 0.5)
    assert R.tail_bound(1.0, 1.0, 1.0, 1.0, 5.0, safety=1.0) == pytest.approx(math.exp(-5.0))


def test_planned_horizon_meets_half_tolerance():
    q = R.QuadParams()
    for a in (0.5, 1.0, 2.0):
        T = R.planned_horizon(3.0, [a], 0.5, 1.1, q)
        tail = R.tail_bound(3.0 ** a, a, 0.5, 1.1, T, q.safety)
        assert tail <= 0.5 * q.tail_rel * 1.0000001 or T == 2.0


@pytest.mark.parametrize("c", [0.5, 4.0])
@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_constant_potential_gives_one(c, a):
    pot = P.constant(c, 1)
    res = R.riesz_batch(pot, [0.0], [a], (c, 1.0), FEW)
    r, d = res[("riesz", a)], res[("dual", a)]
    assert r.total == pytest.approx(1.0, abs=2e-4)
    assert d.total == pytest.approx(1.0, abs=2e-4)
    assert r.flags["tail_certified"] and r.tail_bound < 1e-4
    assert r.head + r.body == pytest.approx(r.total, rel=1e-12)


def test_zero_power_is_identity_and_vanishing_prefactor():
    pot = P.harmonic(1.0, 1)
    e = R.riesz_one(pot, [1.0], 0.0, (0.7, 1.0))
    assert e.total == 1.0 and e.flags["identity"]
    z = R.riesz_one(pot, [0.0], 1.0, (0.7, 1.0))
    assert z.total == 0.0 and z.flags["vanishing_prefactor"]


def test_decay_must_be_positive():
    with pytest.raises(R.DecayNotPositive):
        R.riesz_one(P.bump(1.0, 1.0, 3), [0.0, 0.0, 0.0], 0.5, (0.0, 1.0), FEW)
    with pytest.raises(ValidationError):
        R.riesz_one(P.constant(1.0, 1), [0.0], -1.0, (1.0, 1.0), FEW)


def test_estimates_are_deterministic():
    pot = P.harmonic(1.0, 1)
    mc = R.MCParams(n_paths=200, seed=3)
    a = R.riesz_batch(pot, [0.5], [0.5, 1.0], (0.69, 1.0), mc)
    b = R.riesz_batch(pot, [0.5], [0.5, 1.0], (0.69, 1.0), mc)
    for k in a:
        assert a[k].total == b[k].total and a[k].sigma == b[k].sigma


def test_harmonic_riesz_is_bounded_by_one_for_half_power():
    # V^{1/2} L^{-1/2} is an L^2 contraction; pointwise values at moderate x stay near or below 1
    pot = P.harmonic(1.0, 1)
    e = R.riesz_one(pot, [1.0], 0.5, (0.69, 1.0), R.MCParams(n_paths=2000, seed=1))
    assert 0.3 < e.total < 1.2
    assert e.sigma > 0 and e.n_nodes > 0


def test_divergence_witness_constant_ratio():
    # e^{-tL}1 = e^{-ct}: partial integrals converge, so P(2T)/P(T) -> 1
    w = R.divergence_witness(P.constant(1.0, 1), [0.0], [1.0], [4.0, 8.0, 16.0], R.MCParams(n_paths=8))
    for T in (8.0, 16.0):
        assert w[1.0]["ratio"][T] == pytest.approx(1.0, abs=1e-3)
    assert w[1.0]["P"][32.0][0] == pytest.approx(1.0, abs=1e-3)
    with pytest.raises(ValidationError):
        R.divergence_witness(P.constant(1.0, 1), [0.0], [1.0], [4.0, 8.0])
    with pytest.raises(ValidationError):
        R.divergence_witness(P.harmonic(1.0, 1), [0.0], [1.0], [4.0, 8.0, 16.0])

