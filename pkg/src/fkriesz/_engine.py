"""Streaming Brownian path kernel shared by every Monte Carlo estimator.

Paths are advanced on an arbitrary increasing time grid with exact Gaussian
increments.  Along the way the kernel accumulates the trapezoidal action
int V(X_s) ds, running maxima and window occupations, and writes them out only
at the requested record indices, so long paths never have to be stored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba as nb
import numpy as np

from . import rng
from .potential import Potential, v_at

# exp(-750) is exactly zero in double precision, so freezing a path once its
# action passes this level does not change any weight.
KILL_ACTION = 750.0
_BUF = 256
_EMPTY_KINDS = np.zeros(1, dtype=np.int64)
_EMPTY_PAR = np.zeros((1, 4))
_EMPTY_KINDS.setflags(write=False)
_EMPTY_PAR.setflags(write=False)


class ResourceError(RuntimeError):
    """Requested ensemble exceeds the configured memory cap."""


@nb.njit(inline="always", cache=True)
def _write(p, ri, x, act, dev, up, occ, want_pos, want_max, act_out, pos_out, dev_out, up_out, occ_out):
    act_out[p, ri] = act
    if want_pos:
        for c in range(x.shape[0]):
            pos_out[p, ri, c] = x[c]
    if want_max:
        dev_out[p, ri] = dev
        up_out[p, ri] = up
    for w in range(occ.shape[0]):
        occ_out[p, ri, w] = occ[w]


@nb.njit(parallel=True, cache=True)
def _kernel(x0, tg, rec, kinds, par, use_v, k0, k1, pid0, kill, win,
            want_pos, want_max, act_out, pos_out, dev_out, up_out, occ_out):
    n_paths = act_out.shape[0]
    n_rec = rec.shape[0]
    n_steps = rec[n_rec - 1]
    d = x0.shape[0]
    n_win = win.shape[0]
    block = _BUF // d
    hs = np.empty(n_steps)
    sqs = np.empty(n_steps)
    for i in range(n_steps):
        hs[i] = tg[i + 1] - tg[i]
        sqs[i] = math.sqrt(hs[i])
    for p in nb.prange(n_paths):
        st = rng.new_stream(pid0 + p, rng.TAG_BROWNIAN)
        buf = np.empty(block * d)
        x = x0.copy()
        v_prev = v_at(kinds, par, x) if use_v else 0.0
        act = 0.0
        dev = 0.0
        up = 0.0
        occ = np.zeros(n_win)
        ind = np.zeros(n_win)
        for w in range(n_win):
            ind[w] = 1.0 if win[w, 0] <= x[0] <= win[w, 1] else 0.0
        ri = 0
        while ri < n_rec and rec[ri] == 0:
            _write(p, ri, x, act, dev, up, occ, want_pos, want_max, act_out, pos_out, dev_out, up_out, occ_out)
            ri += 1
        nxt = rec[ri] if ri < n_rec else -1
        i = 0
        while i < n_steps:
            m = min(block, n_steps - i)
            rng.fill_normals(st, k0, k1, buf[: m * d])
            for j in range(m):
                h = hs[i]
                sq = sqs[i]
                for c in range(d):
                    x[c] += sq * buf[j * d + c]
                if use_v:
                    v = v_at(kinds, par, x)
                    act += 0.5 * h * (v_prev + v)
                    v_prev = v
                if want_max:
                    r2 = 0.0
                    for c in range(d):
                        r2 += (x[c] - x0[c]) ** 2
                    r = math.sqrt(r2)
                    if r > dev:
                        dev = r
                    if x[0] - x0[0] > up:
                        up = x[0] - x0[0]
                for w in range(n_win):
                    iw = 1.0 if win[w, 0] <= x[0] <= win[w, 1] else 0.0
                    occ[w] += 0.5 * h * (ind[w] + iw)
                    ind[w] = iw
                i += 1
                if act > kill:
                    act = np.inf
                    while ri < n_rec:
                        _write(p, ri, x, act, dev, up, occ, want_pos, want_max,
                               act_out, pos_out, dev_out, up_out, occ_out)
                        ri += 1
                    i = n_steps
                    break
                if i == nxt:
                    _write(p, ri, x, act, dev, up, occ, want_pos, want_max,
                           act_out, pos_out, dev_out, up_out, occ_out)
                    ri += 1
                    nxt = rec[ri] if ri < n_rec else -1


def time_grid(t_max: float, dt, breaks=None, extra=()) -> np.ndarray:
    """Increasing grid on [0, t_max]: uniform pieces plus the ``extra`` times.

    ``dt`` is a step or a list of steps, one per segment between ``breaks``.
    Extra times are kept exactly; grid points closer than 1e-12 to one are dropped.
    """
    dts = np.atleast_1d(np.asarray(dt, dtype=float))
    edges = [0.0] + list(breaks or []) + [t_max]
    edges = [e for e in edges if e <= t_max]
    if edges[-1] != t_max:
        edges.append(t_max)
    if len(dts) == 1:
        dts = np.repeat(dts, len(edges) - 1)
    pieces = []
    for (a, b), h in zip(zip(edges[:-1], edges[1:]), dts):
        if b <= a:
            continue
        n = max(1, int(math.ceil((b - a) / h - 1e-9)))
        pieces.append(a + (b - a) * np.arange(n + 1) / n)
    g = np.unique(np.concatenate(pieces))
    extra = np.asarray([e for e in extra if 0.0 < e <= t_max], dtype=float)
    if extra.size:
        near = np.zeros(g.shape, dtype=bool)
        j = np.searchsorted(extra, g)
        for jj in (j - 1, j):
            ok = (jj >= 0) & (jj < extra.size)
            near[ok] |= np.abs(g[ok] - extra[jj[ok]]) < 1e-12
        near[0] = False
        g = np.unique(np.concatenate([g[~near], extra]))
    return g


def record_indices(grid: np.ndarray, times) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    idx = np.searchsorted(grid, times)
    idx = np.clip(idx, 0, grid.size - 1)
    if not np.all(grid[idx] == times):
        raise ValueError("record times must lie on the time grid")
    return idx.astype(np.int64)


@dataclass
class Records:
    """Per-path quantities at the record times of one chunk of paths."""
    times: np.ndarray
    action: np.ndarray
    positions: np.ndarray | None
    max_dev: np.ndarray | None
    max_up: np.ndarray | None
    occupation: np.ndarray | None
    path_ids: np.ndarray


def n_normals(grid: np.ndarray, d: int, n_paths: int) -> int:
    return int((grid.size - 1) * d * n_paths)


def simulate(potential: Potential | None, x, grid, record_times, n_paths: int, seed: int, *,
             reducer=None, path_offset: int = 0, positions: bool = True, maxima: bool = False,
             windows=None, kill: float | None = None, chunk_bytes: float = 2.5e8,
             mem_cap: float | None = None):
    """Run paths from ``x`` on ``grid`` and return records or reduced per-path values.

    Without ``reducer`` all records are returned as one :class:`Records`.  With a
    reducer, records are produced chunk by chunk and ``reducer(records)`` must
    return an array with one row per path; the rows are concatenated in path order.
    Paths are addressed by ``path_offset + i`` so results are chunk independent.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    d = x.size
    if potential is not None and potential.d != d:
        raise ValueError(f"point has dimension {d}, potential has {potential.d}")
    grid = np.asarray(grid, dtype=float)
    if grid[0] != 0.0 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must start at 0 and increase strictly")
    rec = record_indices(grid, record_times)
    if np.any(np.diff(rec) <= 0):
        raise ValueError("record times must increase strictly")
    win = np.zeros((0, 2)) if windows is None else np.asarray(windows, dtype=float).reshape(-1, 2)
    if kill is not None and (maxima or win.shape[0]):
        raise ValueError("path killing is incompatible with path maxima and occupations")
    kill = np.inf if kill is None else float(kill)
    use_v = potential is not None
    kinds = potential.kinds if use_v else _EMPTY_KINDS
    par = potential.par if use_v else _EMPTY_PAR
    n_rec = rec.size
    per_path = 8 * n_rec * (1 + (d if positions else 0) + (2 if maxima else 0) + win.shape[0])
    if reducer is None and mem_cap is not None and per_path * n_paths > mem_cap:
        raise ResourceError(
            f"{n_paths} paths x {n_rec} records need {per_path * n_paths / 1e6:.1f} MB, "
            f"cap is {mem_cap / 1e6:.1f} MB; reduce n_paths or record fewer times")
    chunk = n_paths if reducer is None else max(1, min(n_paths, int(chunk_bytes // per_path)))
    k0, k1 = rng.split_seed(seed)
    out = []
    for start in range(0, n_paths, chunk):
        m = min(chunk, n_paths - start)
        act = np.empty((m, n_rec))
        pos = np.empty((m, n_rec, d)) if positions else np.empty((1, 1, 1))
        dev = np.empty((m, n_rec)) if maxima else np.empty((1, 1))
        up = np.empty((m, n_rec)) if maxima else np.empty((1, 1))
        occ = np.empty((m, n_rec, win.shape[0]))
        _kernel(x, grid, rec, kinds, par, use_v, k0, k1, np.int64(path_offset + start), kill, win,
                positions, maxima, act, pos, dev, up, occ)
        r = Records(grid[rec], act, pos if positions else None, dev if maxima else None,
                    up if maxima else None, occ if win.shape[0] else None,
                    np.arange(path_offset + start, path_offset + start + m, dtype=np.uint64))
        if reducer is None:
            return r
        out.append(np.asarray(reducer(r)))
    return np.concatenate(out, axis=0)
