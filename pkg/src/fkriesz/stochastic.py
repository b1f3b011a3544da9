"""Brownian path ensembles, local time, exit statistics and strip occupation moments."""

from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erf, erfc

from . import _engine
from .potential import Potential

__all__ = [
    "MCEstimate",
    "PathBundle",
    "sample_paths",
    "save_bundle",
    "load_bundle",
    "occupation_time",
    "local_time",
    "local_time_density",
    "atom_mass",
    "local_time_ensemble",
    "exit_probability_bound",
    "exit_probabilities",
    "reflection_probability",
    "occupation_moment",
    "occupation_moment_bound",
    "gaussian_moment_bound",
]

DEFAULT_MEM_CAP = 1.0e9


@dataclass
class MCEstimate:
    value: float
    std_error: float
    n_paths: int
    flags: dict = field(default_factory=dict)


def _binomial(hits: np.ndarray) -> MCEstimate:
    n = hits.size
    p = float(np.mean(hits))
    return MCEstimate(p, math.sqrt(max(p * (1.0 - p), 0.0) / n), n)


# ---------------------------------------------------------------- stored bundles

@dataclass
class PathBundle:
    """Seeded ensemble of paths on the uniform grid ``k * dt``, ``k = 0..n_steps``."""
    x: np.ndarray
    dt: float
    n_steps: int
    n_paths: int
    seed: int
    positions: np.ndarray  # (n_paths, n_steps + 1, d)
    action: np.ndarray  # (n_paths, n_steps + 1)
    flags: dict = field(default_factory=dict)  # radius -> per-path exit indicator

    @property
    def d(self) -> int:
        return self.x.size

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.n_steps + 1)


def _uniform_grid(t_max: float, dt: float) -> tuple[np.ndarray, int]:
    n = int(round(t_max / dt))
    if abs(n * dt - t_max) > 1e-9 * t_max:
        n = int(math.ceil(t_max / dt))
    return dt * np.arange(n + 1), n


def sample_paths(x, t_max: float, dt: float, n_paths: int, seed: int, potential: Potential | None = None,
                 radii=(), mem_cap: float = DEFAULT_MEM_CAP) -> PathBundle:
    """Store full paths and the running action int_0^t V(X_s) ds at every grid time."""
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if t_max < dt:
        raise ValueError("t_max must be >= dt")
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    grid, n = _uniform_grid(t_max, dt)
    need = 8 * n_paths * (n + 1) * (x.size + 1)
    if need > mem_cap:
        raise _engine.ResourceError(
            f"bundle of {n_paths} paths x {n + 1} times in d={x.size} needs {need / 1e6:.1f} MB, "
            f"cap is {mem_cap / 1e6:.1f} MB")
    r = _engine.simulate(potential, x, grid, grid, n_paths, seed, positions=True)
    dev = np.sqrt(np.sum((r.positions - x) ** 2, axis=-1)).max(axis=1)
    flags = {float(rad): dev >= rad for rad in radii}
    return PathBundle(x, float(dt), n, int(n_paths), int(seed), r.positions, r.action, flags)


_MAGIC = b"FKPB0001"
_HEADER = struct.Struct("<8sQdQQQ")  # magic, d, dt, n_steps, n_paths, seed


def save_bundle(bundle: PathBundle, path) -> str:
    """Flat little-endian layout; returns the sha256 written after the payload."""
    body = bytearray(_HEADER.pack(_MAGIC, bundle.d, bundle.dt, bundle.n_steps, bundle.n_paths, bundle.seed))
    body += np.ascontiguousarray(bundle.x, dtype="<f8").tobytes()
    body += np.ascontiguousarray(bundle.positions, dtype="<f8").tobytes()
    body += np.ascontiguousarray(bundle.action, dtype="<f8").tobytes()
    digest = hashlib.sha256(body).hexdigest()
    with open(path, "wb") as fh:
        fh.write(body)
        fh.write(digest.encode("ascii"))
    return digest


def load_bundle(path) -> PathBundle:
    with open(path, "rb") as fh:
        raw = fh.read()
    body, digest = raw[:-64], raw[-64:].decode("ascii")
    if hashlib.sha256(body).hexdigest() != digest:
        raise ValueError(f"checksum mismatch in {path}")
    magic, d, dt, n_steps, n_paths, seed = _HEADER.unpack_from(body)
    if magic != _MAGIC:
        raise ValueError(f"{path} is not a path bundle")
    off = _HEADER.size
    arr = np.frombuffer(body, dtype="<f8", offset=off)
    x = arr[:d].copy()
    m = n_paths * (n_steps + 1)
    pos = arr[d:d + m * d].reshape(n_paths, n_steps + 1, d).copy()
    act = arr[d + m * d:d + m * d + m].reshape(n_paths, n_steps + 1).copy()
    return PathBundle(x, dt, n_steps, n_paths, seed, pos, act)


# ---------------------------------------------------------------- local time

def occupation_time(path, dt: float, lo: float, hi: float) -> float:
    """Trapezoidal time spent by a 1D path in [lo, hi]."""
    p = np.asarray(path, dtype=float).reshape(-1)
    ind = ((p >= lo) & (p <= hi)).astype(float)
    return float(0.5 * dt * np.sum(ind[1:] + ind[:-1]))


def local_time(path, y: float, eps: float, dt: float) -> float:
    """(1 / 2 eps) times the occupation of [y - eps, y + eps] by a 1D path."""
    p = np.asarray(path, dtype=float)
    if p.ndim == 2 and p.shape[1] != 1:
        raise ValueError(f"local time is defined for d=1 only, got d={p.shape[1]}")
    if eps <= 0:
        raise ValueError("eps must be > 0")
    return occupation_time(p, dt, y - eps, y + eps) / (2.0 * eps)


def local_time_density(y: float, t: float, z):
    """Density of L_t(y) on z > 0 for Brownian motion started at 0."""
    z = np.asarray(z, dtype=float)
    if t <= 0:
        raise ValueError("t must be > 0")
    if np.any(z <= 0):
        raise ValueError("density is defined for z > 0; the atom at 0 is atom_mass(y, t)")
    v = math.sqrt(2.0 / (math.pi * t)) * np.exp(-((abs(y) + z) ** 2) / (2.0 * t))
    return float(v) if v.ndim == 0 else v


def atom_mass(y: float, t: float) -> float:
    """P(L_t(y) = 0) = P(the path never reaches y)."""
    return float(erf(abs(y) / math.sqrt(2.0 * t)))


def local_time_ensemble(levels, t: float, eps: float, dt: float, n_paths: int, seed: int,
                        record_times=None, x0: float = 0.0):
    """Local times at ``levels`` plus 1D path maxima, streamed without storing paths.

    Returns ``(times, local_times[n_paths, n_rec, n_levels], max_abs[n_paths, n_rec],
    max_up[n_paths, n_rec])``.
    """
    times = [t] if record_times is None else sorted(record_times)
    grid = _engine.time_grid(max(times), dt, extra=times)
    win = [[y - eps, y + eps] for y in levels]

    def keep(r):
        return np.concatenate([r.occupation.reshape(len(r.path_ids), -1) / (2.0 * eps),
                               r.max_dev, r.max_up], axis=1)

    out = _engine.simulate(None, [x0], grid, times, n_paths, seed, reducer=keep, positions=False,
                           maxima=True, windows=win)
    nr, nl = len(times), len(levels)
    lt = out[:, :nr * nl].reshape(n_paths, nr, nl)
    return np.asarray(times), lt, out[:, nr * nl:nr * nl + nr], out[:, nr * nl + nr:]


# ---------------------------------------------------------------- exit statistics

def exit_probability_bound(r: float, t: float, d: int) -> float:
    """min(1, 4d exp(-r^2 / (2td))) for P(sup_{s<=t} |X_s - x| >= r)."""
    if r <= 0 or t <= 0:
        raise ValueError("r and t must be > 0")
    return min(1.0, 4.0 * d * math.exp(-r * r / (2.0 * t * d)))


def exit_probabilities(d: int, radii, times, n_paths: int, dt: float, seed: int):
    """Grid-maximum estimates of P(sup_{s<=t} |X_s - x| >= r) for all (r, t) pairs.

    Returns ``{(r, t): MCEstimate}``.  The grid maximum under-estimates the true
    supremum, so these estimates are biased low.
    """
    times = sorted(times)
    grid = _engine.time_grid(max(times), dt, extra=times)
    dev = _engine.simulate(None, np.zeros(d), grid, times, n_paths, seed, positions=False, maxima=True,
                           reducer=lambda rr: rr.max_dev)
    res = {}
    for j, t in enumerate(times):
        for r in radii:
            est = _binomial(dev[:, j] >= r)
            est.flags["grid_maximum"] = True
            res[(float(r), float(t))] = est
    return res


def reflection_probability(a: float, t: float) -> float:
    """P(sup_{s<=t} (X_s - x) >= a) = erfc(a / sqrt(2t)) in one dimension."""
    return float(erfc(a / math.sqrt(2.0 * t)))


# ---------------------------------------------------------------- strip occupation

def occupation_moment_bound(C: float, N: float, k: float, t: float) -> float:
    return C * math.exp(8.0 * N * N * k * k * t)


def occupation_moment(x, times, k_values, N: float, n_paths: int, dt: float, seed: int,
                      rel_tol: float = 0.1):
    """E_x exp(2k * occupation of {|x_1| <= N} up to t), for every (k, t).

    One ensemble serves all k because the occupation time does not depend on k.
    Returns ``{(k, t): MCEstimate}``; estimates with relative error above
    ``rel_tol`` carry the ``low_precision`` flag.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    times = sorted(float(t) for t in np.atleast_1d(times))
    if N <= 0 or min(times) <= 0:
        raise ValueError("N and t must be > 0")
    grid = _engine.time_grid(max(times), dt, extra=times)
    occ = _engine.simulate(None, x, grid, times, n_paths, seed, positions=False, windows=[[-N, N]],
                           reducer=lambda r: r.occupation[:, :, 0])
    res = {}
    for k in np.atleast_1d(k_values):
        k = float(k)
        if k < 0:
            raise ValueError("k must be >= 0")
        for j, t in enumerate(times):
            w = np.exp(2.0 * k * occ[:, j])
            m = float(np.mean(w))
            s = float(np.std(w) / math.sqrt(n_paths))
            est = MCEstimate(m, s, n_paths)
            if m > 0 and s / m > rel_tol:
                est.flags["low_precision"] = True
            res[(k, t)] = est
    return res


def gaussian_moment_bound(lam: float, t: float, x, d: int) -> float:
    """2^d exp(d lam^2 t / 2 + sqrt(d) lam |x|), an upper bound for E_x exp(lam |X_t|)."""
    nx = float(np.linalg.norm(np.atleast_1d(x)))
    return 2.0 ** d * math.exp(d * lam * lam * t / 2.0 + math.sqrt(d) * lam * nx)
