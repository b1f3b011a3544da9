import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fkriesz import potential as P
from fkriesz.potential import PotentialSpec, ValidationError


def test_evaluation_examples():
    assert P.constant(1.0, 3)([0.3, -2.0, 5.0]) == 1.0
    assert P.power(2.0, 2)([3.0, 4.0]) == 25.0
    assert P.bump(1.0, 1.0, 2)([2.0, 0.0]) == 0.0
    assert P.bump(1.0, 1.0, 1)(0.0) == 1.0
    assert P.exponential(2.0, 1).eval(3.0, 1.0) == 8.0
    assert P.constant(4.0).eval(1.3, 0.5) == 2.0
    assert P.harmonic(gamma=2.0, d=1)(1.5) == pytest.approx(2.0 * 1.5**2)
    s = P.strip_complement(3.0, 1.0, 2)
    assert s([0.5, 100.0]) == 0.0 and s([-1.5, 0.0]) == 3.0


def test_d1_arrays_are_lists_of_points():
    v = P.power(1.0, 1)(np.array([-2.0, 0.5, 3.0]))
    assert np.array_equal(v, [2.0, 0.5, 3.0])
    v2 = P.power(1.0, 2)(np.array([[3.0, 4.0], [0.0, 1.0]]))
    assert np.array_equal(v2, [5.0, 1.0])
    with pytest.raises(ValidationError):
        P.power(1.0, 2)(np.zeros((3, 3)))


def test_zero_power_is_identity():
    for pot in (P.power(1.0, 1), P.bump(1.0, 1.0, 1)):
        assert pot.eval(0.0, 0.0) == 1.0
        assert pot.eval(5.0, 0.0) == 1.0


@pytest.mark.parametrize("kind,params,field", [
    ("power", {"alpha": 0.0}, "params.alpha"),
    ("power", {"alpha": -1.0}, "params.alpha"),
    ("exponential", {"beta": 1.0}, "params.beta"),
    ("constant", {"c": -0.1}, "params.c"),
    ("strip_complement", {"c": 1.0, "N": 0.0}, "params.N"),
    ("bump", {"radius": -1.0}, "params.radius"),
    ("power", {"alpha": 1.0, "gamma": 2.0}, "params.gamma"),
    ("constant", {}, "params.c"),
])
def test_validation_names_the_field(kind, params, field):
    with pytest.raises(ValidationError) as ei:
        P.construct(PotentialSpec(kind, 1, params))
    assert ei.value.field == field


def test_bad_kind_and_dimension():
    with pytest.raises(ValidationError):
        P.construct(PotentialSpec("cubic", 1, {}))
    with pytest.raises(ValidationError):
        P.construct(PotentialSpec("constant", 0, {"c": 1.0}))


def test_parameters_are_frozen():
    pot = P.power(2.0, 1)
    with pytest.raises(ValueError):
        pot.par[0, 0] = 3.0


def test_radial_extrema_examples():
    assert P.power(1.0, 2).radial_extrema([4.0, 0.0], 1.0) == (3.0, 5.0)
    assert P.constant(7.0, 3).radial_extrema([1.0, 2.0, 3.0], 4.0) == (7.0, 7.0)
    assert P.bump(1.0, 1.0, 1).radial_extrema([0.0], 3.0) == (0.0, 1.0)
    (lo, hi), info = P.strip_complement(2.0, 1.0, 1).radial_extrema([0.5], 0.6, full_output=True)
    assert (lo, hi) == (0.0, 2.0) and not info["approximate"]


@given(st.sampled_from(["power1", "power3", "exp", "harm", "bump"]), st.floats(0, 6), st.floats(0, 3),
       st.floats(0, 3))
def test_radial_extrema_monotone_and_enclosing(name, nx, r1, dr):
    pot = {"power1": P.power(1.0, 2), "power3": P.power(3.0, 2), "exp": P.exponential(1.5, 2),
           "harm": P.harmonic(0.5, 2), "bump": P.bump(2.0, 1.5, 2)}[name]
    x = np.array([nx, 0.0])
    lo1, hi1 = pot.radial_extrema(x, r1)
    lo2, hi2 = pot.radial_extrema(x, r1 + dr)
    assert lo2 <= lo1 + 1e-12 and hi2 >= hi1 - 1e-12
    # random points of the ball stay within the extrema
    rng = np.random.default_rng(0)
    ang = rng.uniform(0, 2 * np.pi, 64)
    rad = r1 * np.sqrt(rng.uniform(0, 1, 64))
    pts = x + np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1)
    v = pot(pts)
    tol = 1e-9 * max(1.0, hi1)
    assert np.all(v >= lo1 - tol) and np.all(v <= hi1 + tol)


@given(st.floats(0, 4), st.floats(0, 4), st.floats(-5, 5))
def test_eval_power_law(a, b, x):
    pot = P.harmonic(0.7, 1)
    lhs = pot.eval(x, a) * pot.eval(x, b)
    rhs = pot.eval(x, a + b)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


def test_power_metadata_equivalence():
    pot = P.power(1.5, 2, scale=3.0)
    assert pot.metadata["m"] == pot.metadata["M"] == 3.0
    assert pot.check_equivalence(np.linspace(0, 50, 101))
    spec = PotentialSpec("power", 1, {"alpha": 2.0}, metadata={"m": 0.5, "M": 2.0, "R0": 1.0})
    assert P.construct(spec).check_equivalence(np.linspace(1, 20, 50))
    with pytest.raises(ValidationError):
        P.construct(PotentialSpec("power", 1, {"alpha": 2.0}, metadata={"m": 2.0, "M": 1.0, "R0": 0.0}))


def test_perturbed_sum_clamps_and_flags():
    base = PotentialSpec("harmonic", 1, {"c": 1.0})
    pot = P.perturbed_sum(base, [(PotentialSpec("constant", 1, {"c": 2.0}), -1.0, 0.0)])
    assert pot(0.0) == 0.0 and pot(3.0) == pytest.approx(7.0)
    assert pot.metadata["clamped"]
    (lo, hi), info = pot.radial_extrema([1.0], 1.0, full_output=True)
    assert info["approximate"] and lo == 0.0 and hi == pytest.approx(2.0)
    with pytest.raises(ValidationError):
        P.perturbed_sum(base, [(PotentialSpec("strip_complement", 1, {"c": 1.0, "N": 1.0}), 1.0, 0.0)])


def test_from_dict_roundtrip():
    pot = P.from_dict({"kind": "power", "alpha": 2}, d=3)
    assert pot.d == 3 and pot([1.0, 2.0, 2.0]) == 9.0
    s = P.from_dict({"kind": "perturbed_sum", "base": {"kind": "power", "alpha": 1},
                     "terms": [{"kind": "bump", "amplitude": 0.5, "radius": 1.0, "sign": 1.0}]}, d=1)
    assert s(0.0) == pytest.approx(0.5) and s(2.0) == 2.0
    with pytest.raises(ValidationError):
        P.from_dict({"kind": "power", "alpha": 1, "beta": 2})
    with pytest.raises(ValidationError):
        P.from_dict({"alpha": 1})


def test_sup():
    assert P.bump(2.0, 1.0, 1).sup == 2.0
    assert P.constant(3.0).sup == 3.0
    assert math.isinf(P.power(1.0).sup)


def test_radial_extrema_saturate_instead_of_overflowing():
    lo, hi = P.exponential(2.0, 1).radial_extrema([0.0], 5000.0)
    assert hi == math.inf
    assert P.power(2.0, 1).radial_extrema([0.0], 1e200)[1] == math.inf
