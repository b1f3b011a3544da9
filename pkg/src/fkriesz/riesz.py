"""Riesz transforms R_V^a(1)(x) = V^a(x) L^{-a}1(x) and the dual L^{-a}(V^a)(x).

Both are Gamma-weighted time integrals of Feynman-Kac semigroup values,

    L^{-a} f(x) = (1 / Gamma(a)) int_0^inf e^{-tL} f(x) t^{a-1} dt,

estimated path by path: every path carries its own quadrature sum, so the
standard error comes straight from the spread of per-path totals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import gammaincc, gammainccinv

from . import _engine
from .potential import Potential, ValidationError
from .semigroup import DecayFit

__all__ = ["MCParams", "QuadParams", "RieszEstimate", "DecayNotPositive", "riesz_batch",
           "riesz_one", "dual_riesz", "divergence_witness", "tail_bound", "time_nodes",
           "planned_horizon"]


@dataclass(frozen=True)
class MCParams:
    n_paths: int = 10_000
    dt: float = 1e-3  # step on [0, 1]
    dt_body: float = 1e-2  # step on [1, T_max]
    seed: int = 0


@dataclass(frozen=True)
class QuadParams:
    n_head: int = 64
    n_body: int = 96
    tail_rel: float = 1e-4
    safety: float = 1.5
    max_doublings: int = 4
    ladder_levels: int = 4


@dataclass
class RieszEstimate:
    x: np.ndarray
    a: float
    kind: str  # "riesz" or "dual"
    head: float
    head_se: float
    body: float
    body_se: float
    tail_bound: float
    total: float
    sigma: float
    T_max: float
    n_nodes: int
    dt: float
    n_paths: int
    ladder_level: float | None = None
    flags: dict = field(default_factory=dict)


class DecayNotPositive(ValueError):
    """No positive decay rate: the time integral may diverge; use divergence_witness."""


def _decay(decay_fit) -> tuple[float, float]:
    if isinstance(decay_fit, DecayFit):
        return decay_fit.delta_hat, decay_fit.C_hat
    delta, C = decay_fit
    return float(delta), float(C)


def tail_bound(prefactor: float, a: float, delta: float, C: float, T: float, safety: float = 1.5) -> float:
    """prefactor * safety * C * Gamma(a, delta T) / (Gamma(a) delta^a)."""
    return prefactor * safety * C * gammaincc(a, delta * T) / delta ** a


def planned_horizon(vx: float, a_values, delta: float, C: float, quad: QuadParams = QuadParams()) -> float:
    """Initial T_max: half the tail tolerance spent on Gamma(a, delta T) before any doubling."""
    T = 2.0
    for a in a_values:
        pre = vx ** a if vx > 0 else 1.0
        target = 0.5 * quad.tail_rel * delta ** a / (quad.safety * C * pre)
        if target < 1.0:
            T = max(T, float(gammainccinv(a, target)) / delta)
    return T


def time_nodes(a: float, tau: float, T: float, n_head: int, n_body: int, breaks=()):
    """Nodes and weights for (1/Gamma(a)) int_0^T g(t) t^{a-1} dt.

    [0, tau]: Gauss-Legendre in w = t^a (weight becomes dw / Gamma(a+1)).
    [tau, 1]: Gauss-Legendre in log t.
    [1, T]: trapezoid in log t, one uniform piece per interval between ``breaks``.
    Returns a list of ``(part, t, w)`` with part in {"head", "body"}.
    """
    out = []
    g, gw = np.polynomial.legendre.leggauss(n_head)
    wa = tau ** a
    w = 0.5 * wa * (g + 1.0)
    out += [("head", wi ** (1.0 / a), 0.5 * wa * gi / gamma_fn(a + 1.0)) for wi, gi in zip(w, gw)]
    if tau < 1.0:
        lt = math.log(tau)
        u = 0.5 * lt * (1.0 - g)
        t = np.exp(u)
        out += [("head", ti, 0.5 * (-lt) * gi * ti ** a / gamma_fn(a)) for ti, gi in zip(t, gw)]
    if T > 1.0:
        edges = [1.0] + sorted(b for b in breaks if 1.0 < b < T) + [T]
        n_seg = max(2, n_body // (len(edges) - 1))
        for lo, hi in zip(edges[:-1], edges[1:]):
            u = np.linspace(math.log(lo), math.log(hi), n_seg)
            du = u[1] - u[0]
            tw = np.full(n_seg, du)
            tw[[0, -1]] *= 0.5
            t = np.exp(u)
            t[0], t[-1] = lo, hi
            out += [("body", ti, wi * ti ** a / gamma_fn(a)) for ti, wi in zip(t, tw)]
    return out


def _merge_nodes(node_sets):
    """Unique record times and, per set, (index, weight, part) arrays."""
    times = np.unique(np.concatenate([[t for _, t, _ in ns] for ns in node_sets]))
    maps = []
    for ns in node_sets:
        t = np.array([t for _, t, _ in ns])
        idx = np.searchsorted(times, t)
        maps.append((idx, np.array([w for _, _, w in ns]), np.array([p == "head" for p, _, _ in ns])))
    return times, maps


def _weights_matrix(n_rec, maps):
    """(n_rec, 2 * len(maps)) weights: head and body columns for each node set."""
    W = np.zeros((n_rec, 2 * len(maps)))
    for j, (idx, w, head) in enumerate(maps):
        np.add.at(W[:, 2 * j], idx[head], w[head])
        np.add.at(W[:, 2 * j + 1], idx[~head], w[~head])
    return W


def _ladder(vx: float, levels: int) -> np.ndarray:
    k0 = 2 if vx <= 0 else max(2, int(math.ceil(math.log10(vx))) + 1)
    return 10.0 ** np.arange(k0, k0 + levels)


def riesz_batch(potential: Potential, x, a_values, decay_fit, mc: MCParams = MCParams(),
                quad: QuadParams = QuadParams(), riesz: bool = True, dual: bool = True) -> dict:
    """R_V^a(1)(x) and/or L^{-a}(V^a)(x) for several a from one shared ensemble.

    Returns ``{("riesz", a): RieszEstimate, ("dual", a): RieszEstimate}``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    a_values = [float(a) for a in a_values]
    if any(a < 0 for a in a_values):
        raise ValidationError("a", "must be >= 0")
    delta, C = _decay(decay_fit)
    vx = potential.value(x)
    out = {}
    sim_a = []
    for a in a_values:
        if a == 0:
            for kind, on in (("riesz", riesz), ("dual", dual)):
                if on:
                    out[(kind, a)] = RieszEstimate(x, a, kind, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0,
                                                   mc.dt, 0, flags={"identity": True})
            continue
        if riesz and vx == 0.0:
            out[("riesz", a)] = RieszEstimate(x, a, "riesz", 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0,
                                              mc.dt, 0, flags={"vanishing_prefactor": True})
        if (riesz and vx > 0.0) or dual:
            sim_a.append(a)
    if not sim_a:
        return out
    if not delta > 0:
        raise DecayNotPositive(f"decay rate {delta} <= 0; use divergence_witness")
    want_r = riesz and vx > 0.0
    levels = _ladder(vx, quad.ladder_levels)
    tau = min(1.0, 1.0 / vx) if vx > 0 else 1.0

    T = planned_horizon(vx, sim_a, delta, C, quad)
    for attempt in range(quad.max_doublings + 1):
        res = _run(potential, x, sim_a, tau, T, levels, mc, quad, want_r, dual, vx, delta, C)
        ok = all(e.tail_bound < quad.tail_rel * abs(e.total) or e.total == 0.0 for e in res.values())
        if ok or attempt == quad.max_doublings:
            break
        T *= 2.0
    for e in res.values():
        e.flags["tail_certified"] = bool(e.tail_bound < quad.tail_rel * abs(e.total) or e.total == 0.0)
        e.flags["low_precision"] = bool(e.total != 0 and e.sigma > 0.1 * abs(e.total))
    out.update(res)
    return {k: out[k] for k in sorted(out, key=lambda k: (k[0], k[1]))}


def _run(potential, x, a_list, tau, T, levels, mc, quad, want_r, want_d, vx, delta, C):
    node_sets = [time_nodes(a, tau, T, quad.n_head, quad.n_body) for a in a_list]
    times, maps = _merge_nodes(node_sets)
    W = _weights_matrix(times.size, maps)
    grid = _engine.time_grid(float(times[-1]), [mc.dt, mc.dt_body], breaks=[1.0], extra=times)
    n_l = len(levels)

    def reduce(r):
        w = np.exp(-r.action)
        cols = []
        if want_r:
            cols.append(w @ W)  # (m, 2 * n_a)
        if want_d:
            v = potential(r.positions)
            alive = w > 0
            for j, a in enumerate(a_list):
                va = np.where(alive, v ** a, 0.0)
                for lv in levels:
                    g = np.where(v < lv, w * va, 0.0)
                    cols.append(g @ W[:, 2 * j:2 * j + 2])
        return np.concatenate(cols, axis=1)

    per = _engine.simulate(potential, x, grid, times, mc.n_paths, mc.seed, reducer=reduce,
                           positions=want_d, kill=_engine.KILL_ACTION)
    n = mc.n_paths
    res = {}
    col = 0

    def stats(h, b):
        tot = h + b
        se = (lambda v: float(np.std(v, ddof=1) / math.sqrt(n)) if n > 1 else 0.0)
        return float(h.mean()), se(h), float(b.mean()), se(b), float(tot.mean()), se(tot), tot

    if want_r:
        for j, a in enumerate(a_list):
            pre = vx ** a
            h, b = pre * per[:, 2 * j], pre * per[:, 2 * j + 1]
            hm, hs, bm, bs, tm, ts, _ = stats(h, b)
            tb = tail_bound(pre, a, delta, C, T, quad.safety)
            res[("riesz", a)] = RieszEstimate(x, a, "riesz", hm, hs, bm, bs, tb, tm, ts, T,
                                              len(node_sets[j]), mc.dt, n)
        col = 2 * len(a_list)
    if want_d:
        for j, a in enumerate(a_list):
            ests = []
            for li, lv in enumerate(levels):
                c0 = col + 2 * (j * n_l + li)
                h, b = per[:, c0], per[:, c0 + 1]
                ests.append((lv,) + stats(h, b))
            used = None
            for k in range(1, n_l):
                if abs(ests[k][5] - ests[k - 1][5]) < ests[k][6]:
                    used = k
                    break
            conv = used is not None
            used = n_l - 1 if used is None else used
            lv, hm, hs, bm, bs, tm, ts, tot = ests[used]
            body_last = _body_envelope(per, col, j, n_l, used, maps[j], times, delta)
            tb = tail_bound(1.0, a, delta, body_last, T, quad.safety)
            share = float(np.max(np.abs(tot)) / max(np.sum(np.abs(tot)), 1e-300))
            e = RieszEstimate(x, a, "dual", hm, hs, bm, bs, tb, tm, ts, T, len(node_sets[j]), mc.dt, n,
                              ladder_level=float(lv))
            e.flags.update({"ladder_converged": conv, "max_path_share": share,
                            "ladder": [(float(q[0]), q[5], q[6]) for q in ests]})
            res[("dual", a)] = e
    return res


def _body_envelope(per, col, j, n_l, used, node_map, times, delta):
    """Prefactor C_f for the dual tail: the tail is bounded as if e^{-tL}(V^a) <= C_f e^{-delta t}.

    C_f is taken as the ratio of the body integral to the same integral of e^{-delta t},
    which is exact when the body already decays at rate delta.
    """
    idx, w, head = node_map
    t = times[idx[~head]]
    ref = float(np.sum(w[~head] * np.exp(-delta * t)))
    c0 = col + 2 * (j * n_l + used)
    body = float(per[:, c0 + 1].mean())
    return body / ref if ref > 0 else 0.0


def riesz_one(potential: Potential, x, a: float, decay_fit, mc: MCParams = MCParams(),
              quad: QuadParams = QuadParams()) -> RieszEstimate:
    """R_V^a(1)(x) with head, body and certified tail."""
    return riesz_batch(potential, x, [a], decay_fit, mc, quad, riesz=True, dual=False)[("riesz", float(a))]


def dual_riesz(potential: Potential, x, a: float, decay_fit, mc: MCParams = MCParams(),
               quad: QuadParams = QuadParams()) -> RieszEstimate:
    """L^{-a}(V^a)(x) under the truncation ladder V^a 1{V < N}."""
    return riesz_batch(potential, x, [a], decay_fit, mc, quad, riesz=False, dual=True)[("dual", float(a))]


def divergence_witness(potential: Potential, x, a_values, T_list, mc: MCParams = MCParams(),
                       n_head: int = 64, n_per_segment: int = 32) -> dict:
    """Partial integrals P(T) = V^a(x)/Gamma(a) int_0^T e^{-tL}1(x) t^{a-1} dt.

    Evaluated at every T and 2T; returns ``{a: {"P": {T: (value, se)}, "ratio": {T: P(2T)/P(T)}}}``.
    A plateau e^{-tL}1(x) -> w > 0 makes the ratio tend to 2^a.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    T_list = sorted(float(T) for T in T_list)
    if len(T_list) < 3:
        raise ValidationError("T_list", "need at least 3 times")
    vx = potential.value(x)
    if vx <= 0:
        raise ValidationError("x", "the witness needs V(x) > 0")
    a_values = [float(a) for a in a_values]
    ends = sorted(set(T_list) | {2 * T for T in T_list})
    tau = min(1.0, 1.0 / vx)
    sets = []
    for a in a_values:
        for Tend in ends:
            nb = n_per_segment * sum(1 for e in ends if e <= Tend)
            sets.append(time_nodes(a, tau, Tend, n_head, nb, breaks=[e for e in ends if e < Tend]))
    times, maps = _merge_nodes(sets)
    W = _weights_matrix(times.size, maps)
    W = W[:, 0::2] + W[:, 1::2]
    grid = _engine.time_grid(float(times[-1]), [mc.dt, mc.dt_body], breaks=[1.0], extra=times)
    per = _engine.simulate(potential, x, grid, times, mc.n_paths, mc.seed,
                           reducer=lambda r: np.exp(-r.action) @ W, positions=False,
                           kill=_engine.KILL_ACTION)
    out = {}
    n = mc.n_paths
    for i, a in enumerate(a_values):
        pre = vx ** a
        P = {}
        for k, Tend in enumerate(ends):
            v = pre * per[:, i * len(ends) + k]
            P[Tend] = (float(v.mean()), float(v.std(ddof=1) / math.sqrt(n)))
        ratio = {T: P[2 * T][0] / P[T][0] for T in T_list}
        out[a] = {"P": P, "ratio": ratio}
    return out
