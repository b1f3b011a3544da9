import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fkriesz import potential as P
from fkriesz import spectral_oracle as O
from fkriesz.potential import ValidationError


def test_free_operator_matches_discrete_laplacian():
    with pytest.warns(UserWarning, match="confine"):
        o = O.build(P.constant(0.0, 1), 5.0, 200)
    assert np.allclose(o.eigenvalues, O.dirichlet_laplacian_eigs(5.0, 200), rtol=1e-10, atol=1e-10)


def test_constant_shifts_the_spectrum():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        o = O.build(P.constant(2.0, 1), 4.0, 300)
    assert np.allclose(o.eigenvalues - 2.0, O.dirichlet_laplacian_eigs(4.0, 300), atol=1e-9)


def test_oscillator_spectrum_and_diagnostics():
    o = O.build(P.harmonic(gamma=1.0, d=1), 7.0, 4000)
    assert np.max(np.abs(o.eigenvalues[:10] - (np.arange(10) + 0.5))) < 1e-4
    small = O.build(P.harmonic(gamma=1.0, d=1), 7.0, 300)
    d = small.diagnostics()
    assert d["orthonormality"] < 1e-10 and d["rayleigh"] < 1e-10
    assert d["lambda_1"] == pytest.approx(0.5, abs=2e-3)
    assert o.summary(3)["eigenvalues"] == pytest.approx([0.5, 1.5, 2.5], abs=1e-4)


def test_semigroup_of_one_matches_closed_form():
    from fkriesz.semigroup import harmonic_semigroup_one
    o = O.build(P.harmonic(gamma=1.0, d=1), 10.0, 2000)
    u = O.semigroup_apply(o, np.ones(o.n), 1.0)
    for x in (0.0, 0.7, 1.5):
        assert o.at(u, x) == pytest.approx(harmonic_semigroup_one(1.0, 1.0, x), rel=5e-5)


def test_interpolation_vanishes_at_the_box_edges():
    o = O.build(P.harmonic(1.0, 1), 6.0, 200)
    f = np.ones(o.n)
    assert o.at(f, 6.0) == 0.0 and o.at(f, -6.0) == 0.0
    assert o.at(f, 0.0) == pytest.approx(1.0)
    assert np.allclose(o.at(f, [0.0, 1.0]), 1.0)


def test_negative_powers_compose():
    o = O.build(P.harmonic(1.0, 1), 6.0, 300)
    f = np.exp(-o.x ** 2)
    half = O.negative_power_apply(o, O.negative_power_apply(o, f, 0.5), 0.5)
    assert np.allclose(half, O.negative_power_apply(o, f, 1.0), atol=1e-10)
    assert np.allclose(o.apply_operator(O.negative_power_apply(o, f, 1.0)), f, atol=1e-9)
    assert np.array_equal(O.negative_power_apply(o, f, 0.0), f)
    assert np.array_equal(O.riesz_apply_one(o, 0.0), np.ones(o.n))
    assert np.array_equal(O.dual_apply(o, 0.0), np.ones(o.n))


def test_constant_riesz_identity():
    # V = c: V^a L^{-a} 1 -> 1 far from the box edges as the box grows
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        o = O.build(P.constant(1.0, 1), 12.0, 2000)
    for a in (0.5, 1.0, 2.0):
        assert o.at(O.riesz_apply_one(o, a), 0.0) == pytest.approx(1.0, abs=1e-3)


@given(st.floats(0.1, 50.0), st.floats(0.1, 3.0))
def test_gamma_integral_is_negative_power(lam, a):
    assert O.gamma_integral_power(lam, a) == pytest.approx(lam ** -a, rel=1e-9)


def test_l2_contraction():
    s = O.l2_contraction_check(O.build(P.harmonic(1.0, 1), 8.0, 400))
    assert 0.0 < s < 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        o = O.build(P.constant(2.0, 1), 12.0, 2000)
        zero = O.build(P.constant(0.0, 1), 3.0, 100)
    mu = O.dirichlet_laplacian_eigs(12.0, 2000)[0]
    assert O.l2_contraction_check(o) == pytest.approx(math.sqrt(2.0 / (2.0 + mu)), abs=1e-10)
    assert O.l2_contraction_check(zero) == 0.0
    with pytest.raises(ValidationError):
        O.l2_contraction_check(o, a=1.0)


def test_build_validation():
    with pytest.raises(ValidationError):
        O.build(P.harmonic(1.0, 2), 5.0, 200)
    with pytest.raises(ValidationError):
        O.build(P.harmonic(1.0, 1), 5.0, 50)
    with pytest.raises(ValidationError):
        O.build(P.harmonic(1.0, 1), -1.0, 200)
    o = O.build(P.harmonic(1.0, 1), 5.0, 200)
    with pytest.raises(ValidationError):
        O.semigroup_apply(o, np.ones(o.n), -1.0)
    with pytest.raises(ValidationError):
        O.negative_power_apply(o, np.ones(o.n), -0.5)
