import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from fkriesz import potential as P
from fkriesz import semigroup as SG
from fkriesz.potential import ValidationError


def test_constant_potential_is_exact():
    est = SG.fk_estimate(P.constant(0.7, 2), [0.3, 0.1], 2.0, n_paths=50, dt=0.01)
    assert est.value == pytest.approx(math.exp(-1.4), rel=1e-12)
    assert est.std_error < 1e-12
    assert SG.constant_semigroup_one(0.7, 2.0) == math.exp(-1.4)


def test_closed_form_validation():
    with pytest.raises(ValidationError):
        SG.constant_semigroup_one(-1.0, 1.0)
    with pytest.raises(ValidationError):
        SG.mehler_kernel(0.0, 1.0, 0.0, 0.0)
    with pytest.raises(ValidationError):
        SG.mehler_kernel(1.0, 1.0, 0.0, 0.0, form="sinh")


def test_mehler_origin_value():
    # (sinh 1)^{-1/2} by direct evaluation
    assert SG.mehler_kernel(1.0, 1.0, 0.0, 0.0) == pytest.approx(0.92245224, abs=1e-8)


@given(st.floats(0.1, 3.0), st.floats(0.05, 5.0),
       st.lists(st.floats(-3, 3), min_size=2, max_size=2), st.lists(st.floats(-3, 3), min_size=2, max_size=2))
def test_mehler_forms_agree(gamma, t, x, y):
    a = SG.mehler_kernel(gamma, t, x, y, form="coth")
    b = SG.mehler_kernel(gamma, t, x, y, form="tanh")
    assert a == pytest.approx(b, rel=1e-9, abs=1e-300)


def test_mehler_underflow_flag():
    v, info = SG.mehler_kernel(1.0, 800.0, 0.0, 0.0, full_output=True)
    assert v == 0.0 and info["underflow"]


@pytest.mark.parametrize("gamma,t,x", [(1.0, 0.5, 0.0), (1.0, 1.0, 1.0), (2.0, 0.7, -0.5)])
def test_kernel_integrates_to_semigroup_of_one(gamma, t, x):
    norm = math.sqrt(gamma / (2 * math.pi))
    v, _ = quad(lambda y: SG.mehler_kernel(gamma, t, x, y), -np.inf, np.inf, epsabs=1e-13)
    assert norm * v == pytest.approx(SG.harmonic_semigroup_one(gamma, t, x), rel=1e-9)


def test_harmonic_closed_form():
    g, t, x = 1.0, 1.0, np.array([1.0, 0.5])
    expected = math.cosh(g * t) ** -1 * math.exp(-0.5 * g * math.tanh(g * t) * 1.25)
    assert SG.harmonic_semigroup_one(g, t, x) == pytest.approx(expected, rel=1e-13)
    # no overflow for large gamma t
    assert SG.harmonic_semigroup_one(1.0, 2000.0, 0.0) == 0.0


def test_harmonic_monte_carlo():
    pot = P.harmonic(gamma=1.0, d=1)
    ests = SG.fk_estimate(pot, [0.5], [0.5, 1.0], n_paths=20_000, dt=1e-3, seed=2)
    for row, t in zip(ests, (0.5, 1.0)):
        e = row[0]
        assert abs(e.value - SG.harmonic_semigroup_one(1.0, t, 0.5)) < 4 * e.std_error + 2e-3


def test_truncated_v_power_functional():
    pot = P.constant(4.0, 1)
    rows = SG.fk_estimate(pot, [0.0], 0.5, f="Va", a=0.5, n_trunc=[1.0, 10.0], n_paths=20, dt=0.01)
    low, high = rows[0]
    assert low.value == 0.0
    assert high.value == pytest.approx(2.0 * math.exp(-2.0), rel=1e-12)


def test_estimate_argument_errors():
    pot = P.constant(1.0, 1)
    with pytest.raises(ValidationError):
        SG.fk_estimate(pot, [0.0], 0.0)
    with pytest.raises(ValidationError):
        SG.fk_estimate(pot, [0.0], [2.0, 1.0])
    with pytest.raises(ValidationError):
        SG.fk_estimate(pot, [0.0], 1.0, f="Va", a=1.0)
    with pytest.raises(ValidationError):
        SG.fk_estimate(pot, [0.0], 1.0, f=lambda p: p[..., 0])
    with pytest.raises(ValidationError):
        SG.fk_estimate(pot, [0.0], 1.0, f="square")


def test_bounded_callable_functional():
    def half(pos):
        return np.full(pos.shape[:-1], 0.5)
    e = SG.fk_estimate(P.constant(1.0, 1), [0.0], 1.0, f=half, f_bound=0.5, n_paths=10, dt=0.1)
    assert e.value == pytest.approx(0.5 * math.exp(-1.0)) and e.f_tag == "half"


def test_dt_refinement_converges_for_constant():
    est, hist = SG.fk_estimate_converged(P.constant(1.0, 1), [0.0], 1.0, n_paths=10, dt=0.1)
    assert est.flags["dt_converged"] and len(hist) == 2


def test_fit_constant_decay_is_exact():
    fit = SG.fit_decay(P.constant(0.4, 1), [[0.0], [1.0]], [1, 2, 3, 4], n_paths=20, dt=0.05)
    assert fit.delta_hat == pytest.approx(0.4, rel=1e-10)
    assert fit.C_hat == pytest.approx(1.0, rel=1e-10)
    assert fit.residual < 1e-10


def test_fit_refuses_unresolved_values():
    with pytest.raises(SG.FitRefused):
        SG.fit_decay(P.constant(300.0, 1), [[0.0]], [1, 2, 3, 4], n_paths=20, dt=0.05)
    with pytest.raises(ValidationError):
        SG.fit_decay(P.constant(1.0, 1), [[0.0]], [1, 2, 3])


def test_harmonic_decay_rate_near_ground_state():
    # V = x^2 has ground-state energy 1/sqrt(2)
    fit = SG.fit_decay(P.harmonic(1.0, 1), [[0.0]], [1, 2, 3, 4, 5], n_paths=5000, dt=1e-2)
    assert 0.6 < fit.delta_hat < 1 / math.sqrt(2) + 0.02
