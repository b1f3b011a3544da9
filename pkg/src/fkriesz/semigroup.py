"""Feynman-Kac estimates of e^{-tL} f(x), closed-form oracles and decay fits.

e^{-tL} f(x) = E_x[exp(-int_0^t V(X_s) ds) f(X_t)] with L = -Delta/2 + V.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _engine
from .potential import Potential, ValidationError

__all__ = [
    "SemigroupEstimate",
    "DecayFit",
    "FitRefused",
    "fk_estimate",
    "fk_estimate_converged",
    "constant_semigroup_one",
    "mehler_kernel",
    "harmonic_semigroup_one",
    "fit_decay",
]


@dataclass
class SemigroupEstimate:
    value: float
    std_error: float
    t: float
    x: np.ndarray
    n_paths: int
    dt: float
    f_tag: str
    flags: dict = field(default_factory=dict)


def _terminal(potential: Potential, f, a, n_trunc, f_bound):
    """Per-path terminal functional(s): returns (callable or None, tags)."""
    if isinstance(f, str) and f == "one":
        return None, ["one"]
    if isinstance(f, str) and f == "Va":
        if a is None:
            raise ValidationError("a", "f=V^a needs the exponent a")
        if n_trunc is None:
            raise ValidationError("n_trunc", "f=V^a is unbounded; a truncation level is required")
        levels = np.atleast_1d(np.asarray(n_trunc, dtype=float))

        def fv(pos):
            v = potential(pos)
            va = potential.eval(pos, a) if a > 0 else np.ones_like(v)
            return np.stack([np.where(v < lv, va, 0.0) for lv in levels], axis=-1)

        return fv, [f"V^{a:g} 1(V<{lv:g})" for lv in levels]
    if callable(f):
        if f_bound is None or not math.isfinite(f_bound):
            raise ValidationError("f_bound", "custom terminal functions must declare a finite bound")

        def fc(pos):
            return np.asarray(f(pos), dtype=float)[..., None]

        return fc, [getattr(f, "__name__", "custom")]
    raise ValidationError("f", f"expected 'one', 'Va' or a bounded callable, got {f!r}")


def fk_per_path(potential: Potential, x, times, f="one", *, a=None, n_trunc=None, f_bound=None,
                n_paths: int = 10_000, dt: float = 1e-3, seed: int = 0, grid=None,
                path_offset: int = 0) -> np.ndarray:
    """Per-path samples exp(-action) f(X_t): array (n_paths, n_times, n_f)."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    fn, _ = _terminal(potential, f, a, n_trunc, f_bound)
    if grid is None:
        grid = _engine.time_grid(float(times.max()), dt, extra=times)

    def reduce(r):
        w = np.exp(-r.action)
        if fn is None:
            return w[:, :, None]
        vals = fn(r.positions)
        return np.where(w[:, :, None] > 0, w[:, :, None] * vals, 0.0)

    return _engine.simulate(potential, x, grid, times, n_paths, seed, reducer=reduce,
                            positions=fn is not None, kill=_engine.KILL_ACTION, path_offset=path_offset)


def fk_estimate(potential: Potential, x, t, f="one", *, a=None, n_trunc=None, f_bound=None,
                n_paths: int = 10_000, dt: float = 1e-3, seed: int = 0):
    """Monte Carlo e^{-tL} f(x) at one or several times from a single ensemble.

    ``f`` is ``"one"``, ``"Va"`` (needs ``a`` and ``n_trunc``; a list of truncation
    levels gives one estimate per level) or a callable on positions ``(..., d)``
    with a declared ``f_bound``.  A scalar ``t`` and a single functional return one
    :class:`SemigroupEstimate`; otherwise a nested list ``[t][f]`` is returned.
    """
    scalar_t = np.ndim(t) == 0
    times = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(times <= 0):
        raise ValidationError("t", "must be > 0")
    if np.any(np.diff(times) <= 0):
        raise ValidationError("t", "times must increase strictly")
    _, tags = _terminal(potential, f, a, n_trunc, f_bound)
    samples = fk_per_path(potential, x, times, f, a=a, n_trunc=n_trunc, f_bound=f_bound,
                          n_paths=n_paths, dt=dt, seed=seed)
    mean = samples.mean(axis=0)
    se = samples.std(axis=0, ddof=1) / math.sqrt(n_paths) if n_paths > 1 else np.zeros_like(mean)
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    out = [[SemigroupEstimate(float(mean[i, j]), float(se[i, j]), float(times[i]), xa, n_paths, dt, tags[j])
            for j in range(len(tags))] for i in range(len(times))]
    if scalar_t and len(tags) == 1:
        return out[0][0]
    return out


def fk_estimate_converged(potential: Potential, x, t: float, *, n_paths: int = 10_000, dt: float = 1e-3,
                          seed: int = 0, max_halvings: int = 4):
    """Halve dt until the f=1 estimate moves by less than one standard error.

    Returns ``(estimate, history)``; ``estimate.flags['dt_converged']`` records the outcome.
    """
    hist = [fk_estimate(potential, x, t, n_paths=n_paths, dt=dt, seed=seed)]
    for _ in range(max_halvings):
        dt *= 0.5
        hist.append(fk_estimate(potential, x, t, n_paths=n_paths, dt=dt, seed=seed))
        prev, cur = hist[-2], hist[-1]
        if abs(cur.value - prev.value) < max(cur.std_error, 1e-15):
            cur.flags["dt_converged"] = True
            return cur, hist
    hist[-1].flags["dt_converged"] = False
    return hist[-1], hist


# ---------------------------------------------------------------- closed forms

def constant_semigroup_one(c: float, t: float) -> float:
    if c < 0 or t <= 0:
        raise ValidationError("c" if c < 0 else "t", "need c >= 0 and t > 0")
    return math.exp(-c * t)


def mehler_kernel(gamma: float, t: float, x, y, d: int | None = None, form: str = "coth",
                  full_output: bool = False):
    """Kernel K_t^gamma(x, y) of the oscillator -Delta/2 + gamma^2 |x|^2 / 2.

    The normalising factor (gamma / 2 pi)^{d/2} is not included.  ``form`` picks
    the coth / inner-product expression or the equivalent tanh(gamma t / 2) one.
    """
    if gamma <= 0 or t <= 0:
        raise ValidationError("gamma" if gamma <= 0 else "t", "must be > 0")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    d = x.size if d is None else d
    gt = gamma * t
    if gt > 700.0:
        return (0.0, {"underflow": True}) if full_output else 0.0
    sh = math.sinh(gt)
    if form == "coth":
        e = -0.5 * gamma * (x @ x + y @ y) / math.tanh(gt) + gamma * float(x @ y) / sh
    elif form == "tanh":
        th = math.tanh(0.5 * gt)
        dm, dp = x - y, x + y
        e = -gamma * float(dm @ dm) / (4.0 * th) - 0.25 * gamma * th * float(dp @ dp)
    else:
        raise ValidationError("form", "expected 'coth' or 'tanh'")
    v = sh ** (-0.5 * d) * math.exp(e)
    return (v, {"underflow": v == 0.0}) if full_output else v


def harmonic_semigroup_one(gamma: float, t: float, x, d: int | None = None) -> float:
    """e^{-tL}1(x) for V = gamma^2 |x|^2 / 2: (cosh gamma t)^{-d/2} exp(-gamma tanh(gamma t) |x|^2 / 2)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    d = x.size if d is None else d
    gt = gamma * t
    return math.exp(-0.5 * d * (gt + math.log1p(math.exp(-2 * gt)) - math.log(2.0))
                    - 0.5 * gamma * math.tanh(gt) * float(x @ x))


# ---------------------------------------------------------------- decay fits

class FitRefused(RuntimeError):
    """The semigroup values are not resolved above noise, so a log fit is meaningless."""


@dataclass
class DecayFit:
    delta_hat: float
    C_hat: float
    t_window: tuple
    residual: float
    x_grid: np.ndarray
    t_grid: np.ndarray
    M: np.ndarray
    M_se: np.ndarray
    slope: float


def fit_decay(potential: Potential, x_grid, t_grid, *, n_paths: int = 10_000, dt: float = 1e-3,
              seed: int = 0) -> DecayFit:
    """Fit log max_x e^{-tL}1(x) ~ log C - delta t over ``t_grid``.

    ``delta_hat`` is max(0, -slope); the raw slope is kept alongside.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size < 4 or t_grid[0] < 1 or np.any(np.diff(t_grid) <= 0):
        raise ValidationError("t_grid", "need >= 4 increasing times in [1, inf)")
    x_grid = np.asarray(x_grid, dtype=float).reshape(len(x_grid), -1)
    vals = np.empty((len(x_grid), t_grid.size))
    ses = np.empty_like(vals)
    for i, xi in enumerate(x_grid):
        s = fk_per_path(potential, xi, t_grid, n_paths=n_paths, dt=dt, seed=seed)[:, :, 0]
        vals[i] = s.mean(axis=0)
        ses[i] = s.std(axis=0, ddof=1) / math.sqrt(n_paths)
    arg = np.argmax(vals, axis=0)
    M = vals[arg, np.arange(t_grid.size)]
    Mse = ses[arg, np.arange(t_grid.size)]
    if np.any(M <= 3 * Mse):
        raise FitRefused(f"max_x estimate within 3 sigma of 0 at t={t_grid[np.argmax(M <= 3 * Mse)]}")
    slope, icpt = np.polyfit(t_grid, np.log(M), 1)
    res = np.log(M) - (slope * t_grid + icpt)
    return DecayFit(max(0.0, -float(slope)), float(math.exp(icpt)), (float(t_grid[0]), float(t_grid[-1])),
                    float(np.sqrt(np.mean(res ** 2))), x_grid, t_grid, M, Mse, float(slope))
