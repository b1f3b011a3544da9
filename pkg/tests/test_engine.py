import numpy as np
import pytest

from fkriesz import _engine as E
from fkriesz import potential as P
from fkriesz import rng


def test_time_grid_keeps_extra_nodes_exactly():
    g = E.time_grid(3.0, [0.01, 0.1], breaks=[1.0], extra=[0.123, 2.5])
    assert g[0] == 0.0 and g[-1] == 3.0
    assert 0.123 in g and 2.5 in g
    assert np.all(np.diff(g) > 0)
    assert np.diff(g[g <= 1.0]).max() <= 0.01 + 1e-12
    assert np.diff(g).max() <= 0.1 + 1e-12


def test_record_indices_rejects_off_grid_times():
    g = E.time_grid(1.0, 0.1)
    assert list(E.record_indices(g, [0.0, 1.0])) == [0, g.size - 1]
    with pytest.raises(ValueError):
        E.record_indices(g, [0.55])


def test_grid_validation():
    with pytest.raises(ValueError):
        E.simulate(None, [0.0], np.array([0.1, 0.2]), [0.2], 2, 0)
    with pytest.raises(ValueError):
        E.simulate(P.constant(1.0, 2), [0.0], E.time_grid(1.0, 0.1), [1.0], 2, 0)


def test_positions_are_cumulated_stream_normals():
    g = E.time_grid(1.0, 0.01)
    x0 = np.array([0.5, -1.0])
    r = E.simulate(None, x0, g, g, 5, 7)
    z = rng.normals(7, np.arange(5), 200, tag=rng.TAG_BROWNIAN).reshape(5, 100, 2)
    expected = x0 + np.concatenate([np.zeros((5, 1, 2)), np.cumsum(0.1 * z, axis=1)], axis=1)
    assert np.max(np.abs(r.positions - expected)) < 1e-12


def test_action_is_trapezoid_of_v_along_path():
    pot = P.power(2.0, 1)
    g = E.time_grid(0.5, 0.05)
    r = E.simulate(pot, [0.3], g, g, 4, 3)
    v = r.positions[..., 0] ** 2
    trap = np.concatenate([np.zeros((4, 1)), np.cumsum(0.5 * 0.05 * (v[:, 1:] + v[:, :-1]), axis=1)], axis=1)
    assert np.allclose(r.action, trap, rtol=1e-12, atol=1e-14)


def test_chunking_does_not_change_results():
    pot = P.harmonic(1.0, 2)
    g = E.time_grid(2.0, 0.01)
    kw = dict(reducer=lambda r: np.exp(-r.action), positions=False)
    a = E.simulate(pot, [0.2, 0.1], g, [1.0, 2.0], 300, 11, **kw)
    b = E.simulate(pot, [0.2, 0.1], g, [1.0, 2.0], 300, 11, chunk_bytes=200, **kw)
    assert np.array_equal(a, b)


def test_path_offset_addresses_streams():
    g = E.time_grid(1.0, 0.1)
    full = E.simulate(None, [0.0], g, [1.0], 10, 5).positions
    tail = E.simulate(None, [0.0], g, [1.0], 4, 5, path_offset=6).positions
    assert np.array_equal(full[6:], tail)


def test_kill_sets_action_to_infinity():
    pot = P.constant(1000.0, 1)
    g = E.time_grid(2.0, 0.1)
    r = E.simulate(pot, [0.0], g, [0.5, 2.0], 3, 0, kill=E.KILL_ACTION, positions=False)
    assert np.allclose(r.action[:, 0], 500.0)
    assert np.all(np.isinf(r.action[:, 1]))
    assert np.all(np.exp(-r.action[:, 1]) == 0.0)
    with pytest.raises(ValueError):
        E.simulate(pot, [0.0], g, [2.0], 3, 0, kill=E.KILL_ACTION, maxima=True)


def test_memory_cap_raises_resource_error():
    g = E.time_grid(1.0, 0.01)
    with pytest.raises(E.ResourceError):
        E.simulate(None, [0.0], g, g, 1000, 0, mem_cap=1e4)


def test_normal_count():
    g = E.time_grid(1.0, 0.01)
    assert E.n_normals(g, 3, 10) == 100 * 3 * 10
