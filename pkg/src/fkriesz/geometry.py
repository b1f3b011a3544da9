"""Geometric functionals of a potential: ball radii rho/sigma, the integrals I, J, K
and the explicit constants of the decay and comparison estimates.

rho_x(u): largest radius with V >= 2V(x)/u on B(x, rho).
sigma_x(u): largest radius with V <= (u/2)V(x) on B(x, sigma).
I^a = int_0^{V(x)} s^{a-1} exp(-rho_x(s)^2 / 4d) ds
J^a = min(1, V(x)^a) int_1^inf s^{a-1} exp(-sigma_x(s)^2 / 8) ds
K^a_c = min(1, V(x)^a) int_1^inf s^{a-1} exp(-c sigma_x(s)) ds
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .potential import Potential, ValidationError

__all__ = [
    "GeometryProfile",
    "rho",
    "sigma",
    "integral_I",
    "integral_J",
    "integral_K",
    "profile",
    "decay_constant",
    "holder_constant",
    "lem28_threshold",
    "RHO_LOG_CUT",
]

# exp(-37) < 1e-16: kernels below this level are numerically invisible
RHO_LOG_CUT = 37.0
_BISECT_TOL = 1e-9


def _bisect(ok, lo: float, hi: float, tol: float) -> float:
    """Largest point of [lo, hi] where the monotone predicate holds (ok(lo) is True)."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def rho(potential: Potential, x, u: float, rho_max: float | None = None, tol: float = _BISECT_TOL,
        full_output: bool = False):
    """Largest rho <= rho_max with min_{B(x, rho)} V >= 2V(x)/u.

    The default cap makes exp(-rho_max^2 / 4d) < 1e-16.
    """
    if u <= 0:
        raise ValidationError("u", "must be > 0")
    if rho_max is None:
        rho_max = math.sqrt(4.0 * potential.d * RHO_LOG_CUT)
    if rho_max <= 0:
        raise ValidationError("rho_max", "must be > 0")
    level = 2.0 * potential.value(x) / u

    def ok(r):
        return potential.radial_extrema(x, r)[0] >= level

    if ok(rho_max):
        return (rho_max, {"capped": True}) if full_output else rho_max
    if not ok(min(tol, rho_max)):
        return (0.0, {"capped": False}) if full_output else 0.0
    v = _bisect(ok, min(tol, rho_max), rho_max, tol)
    return (v, {"capped": False}) if full_output else v


def sigma(potential: Potential, x, u: float, sigma_max: float, tol: float = _BISECT_TOL,
          full_output: bool = False):
    """Largest sigma <= sigma_max with max_{B(x, sigma)} V <= (u/2) V(x).

    Returns ``inf`` when the potential is bounded and (u/2) V(x) >= sup V.
    """
    if u <= 0:
        raise ValidationError("u", "must be > 0")
    if sigma_max <= 0:
        raise ValidationError("sigma_max", "must be > 0")
    vx = potential.value(x)
    info = {"capped": False, "vanishing_center": vx == 0.0}
    if vx == 0.0:
        return (0.0, info) if full_output else 0.0
    level = 0.5 * u * vx
    if level >= potential.sup:
        return (math.inf, info) if full_output else math.inf

    def ok(r):
        return potential.radial_extrema(x, r)[1] <= level

    if ok(sigma_max):
        info["capped"] = True
        return (sigma_max, info) if full_output else sigma_max
    if not ok(min(tol, sigma_max)):
        return (0.0, info) if full_output else 0.0
    v = _bisect(ok, min(tol, sigma_max), sigma_max, tol)
    return (v, info) if full_output else v


# ---------------------------------------------------------------- I^a

def integral_I(potential: Potential, x, a: float, epsabs: float = 1e-10, full_output: bool = False):
    """I^a(V)(x) with the substitution s = V(x) w^{1/a}.

    After the substitution I = (V^a / a) int_0^1 exp(-rho(V w^{1/a})^2 / 4d) dw.  For
    s < 2 the ball condition already fails at the centre, so rho = 0 there and that
    piece is the exact min(2, V)^a / a.
    """
    if a <= 0:
        raise ValidationError("a", "must be > 0")
    vx = potential.value(x)
    if vx == 0.0:
        return (0.0, 0.0, {}) if full_output else 0.0
    d = potential.d
    head = min(2.0, vx) ** a / a
    if vx <= 2.0:
        return (head, 0.0, {"intervals": 0}) if full_output else head
    w0 = (2.0 / vx) ** a
    scale = vx ** a / a

    def g(w):
        s = vx * w ** (1.0 / a)
        r = rho(potential, x, s)
        return math.exp(-r * r / (4.0 * d))

    body, err, info = _adaptive(g, w0, 1.0, epsabs / scale)
    val = head + scale * body
    return (val, scale * err, info) if full_output else val


def _adaptive(g, lo: float, hi: float, epsabs: float):
    v, err, info = quad(g, lo, hi, epsabs=epsabs, epsrel=1e-12, limit=400, full_output=1)[:3]
    return v, err, {"intervals": int(info["last"])}


# ---------------------------------------------------------------- J^a, K^a_c

def _sigma_cap(kernel_log_cut, a: float, s: float) -> float:
    # kernel(cap) <= e^{-39} s^{-a-1}, so capped blocks are negligible and summable
    return kernel_log_cut(RHO_LOG_CUT + 2.0 + (a + 1.0) * math.log(max(s, 1.0)))


def _tail_integral(potential: Potential, x, a: float, kernel, cap_of, sigma_max, epsabs: float,
                   max_blocks: int = 400):
    """int_1^inf s^{a-1} kernel(sigma_x(s)) ds for a kernel decreasing in sigma.

    [1, 2) is exact ((2^a - 1)/a, sigma = 0 there); beyond 2 the integral is taken
    over dyadic blocks [S, 2S].  Since sigma_x is non-decreasing, each block is at
    most B(S) = S max(S^{a-1}, (2S)^{a-1}) kernel(sigma_x(S)).  Blocks are added
    until the block bound falls below epsabs and has decreased over the last two
    doublings; the remaining tail is extrapolated geometrically from the last
    ratio of block bounds.  A block bound that stops decreasing while sigma_x has
    stopped growing signals divergence.

    With ``sigma_max=None`` the cap grows with s so that a capped sigma makes the
    block bound itself negligible; an explicit ``sigma_max`` is used literally.
    """
    head = (2.0 ** a - 1.0) / a

    def sig(s):
        cap = cap_of(a, s) if sigma_max is None else sigma_max
        return sigma(potential, x, s, cap, full_output=True)

    def f(s):
        v, _ = sig(s)
        return 0.0 if math.isinf(v) else s ** (a - 1.0) * kernel(v)

    total, err = 0.0, 0.0
    bounds, sigmas = [], []
    S = 2.0
    info = {"blocks": 0, "diverged": False, "remainder": 0.0}
    for k in range(max_blocks):
        sv, _ = sig(S)
        kb = 0.0 if math.isinf(sv) else kernel(sv)
        B = S * max(S ** (a - 1.0), (2.0 * S) ** (a - 1.0)) * kb
        bounds.append(B)
        sigmas.append(sv)
        if B == 0.0:
            info["blocks"] = k
            return head + total, err, info
        v, e, _ = _adaptive(f, S, 2.0 * S, epsabs * 1e-2)
        total += v
        err += e
        if k >= 2 and bounds[-1] < bounds[-2] < bounds[-3] and B < epsabs:
            q = bounds[-1] / bounds[-2]
            rem = B * q / (1.0 - q)
            if rem < epsabs:
                info.update(blocks=k + 1, remainder=rem)
                return head + total, err + rem, info
        if k >= 2 and bounds[-1] >= bounds[-3] and sigmas[-1] <= sigmas[-3]:
            info.update(blocks=k + 1, diverged=True)
            return math.inf, math.inf, info
        S *= 2.0
        if not math.isfinite(S):
            break
    info.update(blocks=max_blocks, diverged=True)
    return math.inf, math.inf, info


def integral_J(potential: Potential, x, a: float, sigma_max: float | None = None, epsabs: float = 1e-10,
               full_output: bool = False):
    """J^a(V)(x); sigma = inf contributes 0."""
    if a <= 0:
        raise ValidationError("a", "must be > 0")
    vx = potential.value(x)
    if vx == 0.0:
        return (0.0, 0.0, {"vanishing_center": True}) if full_output else 0.0
    pre = min(1.0, vx ** a)
    val, err, info = _tail_integral(potential, x, a, lambda s: math.exp(-s * s / 8.0),
                                    lambda a_, s: _sigma_cap(lambda L: math.sqrt(8.0 * L), a_, s),
                                    sigma_max, epsabs / pre)
    return (pre * val, pre * err, info) if full_output else pre * val


def integral_K(potential: Potential, x, a: float, c_holder: float, sigma_max: float | None = None,
               epsabs: float = 1e-10, full_output: bool = False):
    """K^a_c(V)(x) with kernel exp(-c sigma)."""
    if a <= 0:
        raise ValidationError("a", "must be > 0")
    if c_holder <= 0:
        raise ValidationError("c_holder", "must be > 0")
    vx = potential.value(x)
    if vx == 0.0:
        return (0.0, 0.0, {"vanishing_center": True}) if full_output else 0.0
    pre = min(1.0, vx ** a)
    c = c_holder
    val, err, info = _tail_integral(potential, x, a, lambda s: math.exp(-c * s),
                                    lambda a_, s: _sigma_cap(lambda L: L / c, a_, s),
                                    sigma_max, epsabs / pre)
    return (pre * val, pre * err, info) if full_output else pre * val


# ---------------------------------------------------------------- profiles

@dataclass
class GeometryProfile:
    x: np.ndarray
    a: float
    c_holder: float | None
    rho_samples: dict = field(default_factory=dict)
    sigma_samples: dict = field(default_factory=dict)
    I_value: float = 0.0
    J_value: float = 0.0
    K_value: float = 0.0
    quadrature_error: float = 0.0


def profile(potential: Potential, x, a: float, c_holder: float | None = None, u_values=None,
            sigma_max: float = 1e3) -> GeometryProfile:
    """All functionals at one point; rho/sigma are sampled at u = 2^k, k = 0..20."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    us = [2.0 ** k for k in range(21)] if u_values is None else list(u_values)
    gp = GeometryProfile(x, a, c_holder)
    gp.rho_samples = {u: rho(potential, x, u) for u in us}
    gp.sigma_samples = {u: sigma(potential, x, u, sigma_max) for u in us}
    I, eI, _ = integral_I(potential, x, a, full_output=True)
    J, eJ, _ = integral_J(potential, x, a, full_output=True)
    gp.I_value, gp.J_value = I, J
    err = eI + eJ
    if c_holder is not None:
        K, eK, _ = integral_K(potential, x, a, c_holder, full_output=True)
        gp.K_value = K
        err += eK
    gp.quadrature_error = err
    return gp


# ---------------------------------------------------------------- constants

def decay_constant(c: float, N: float) -> float:
    """Decay rate (1/2) min(c, 1/(8N^2)) for potentials >= c off a strip of half-width N."""
    if c <= 0 or N <= 0:
        raise ValidationError("c" if c <= 0 else "N", "must be > 0")
    return 0.5 * min(c, 1.0 / (8.0 * N * N))


def holder_constant(a: float, b: float, delta: float) -> float:
    """min((b - a) / 8b, delta a / 4b)."""
    if not b > a > 0:
        raise ValidationError("b", f"need b > a > 0, got a={a}, b={b}")
    if delta <= 0:
        raise ValidationError("delta", "must be > 0")
    return min((b - a) / (8.0 * b), delta * a / (4.0 * b))


def lem28_threshold(N: float, b: float, d: int) -> float:
    """mu tanh(mu/2) / 4b with mu = d^{1/3} / 3N^2."""
    if N <= 0 or b <= 0 or d < 1:
        raise ValidationError("N" if N <= 0 else ("b" if b <= 0 else "d"), "out of range")
    mu = d ** (1.0 / 3.0) / (3.0 * N * N)
    return mu * math.tanh(0.5 * mu) / (4.0 * b)
