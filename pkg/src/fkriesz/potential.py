"""Non-negative potentials V on R^d with exact evaluation and growth metadata.

A potential is stored as a short table of terms so the same object can be
evaluated from numpy code and from numba kernels.  Each row of the table is
``(kind, p0, p1, sign, cutoff)`` and contributes ``sign * g(x) * 1{|x| >= cutoff}``;
the sum is clamped at zero.  Simple kinds have a single row with sign 1 and
cutoff 0.  The norm is Euclidean throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numba as nb
import numpy as np
from scipy.optimize import minimize_scalar

__all__ = [
    "ValidationError",
    "PotentialSpec",
    "Potential",
    "construct",
    "constant",
    "power",
    "exponential",
    "harmonic",
    "bump",
    "strip_complement",
    "perturbed_sum",
    "from_dict",
    "v_at",
]

KINDS = ("constant", "power", "exponential", "harmonic", "bump", "strip_complement", "perturbed_sum")
_CODE = {k: i for i, k in enumerate(KINDS[:-1])}
K_CONST, K_POWER, K_EXP, K_HARM, K_BUMP, K_STRIP = range(6)
_RADIAL = ("constant", "power", "exponential", "harmonic", "bump")


class ValidationError(ValueError):
    """Invalid parameter; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class PotentialSpec:
    kind: str
    d: int = 1
    params: dict = field(default_factory=dict)
    terms: tuple = ()  # perturbed_sum: ((PotentialSpec, sign, cutoff), ...)
    base: "PotentialSpec | None" = None
    metadata: dict | None = None  # optional {"m", "M", "R0"}


_DEFAULTS = {
    "constant": {"c": None},
    "power": {"alpha": None, "scale": 1.0},
    "exponential": {"beta": None, "scale": 1.0},
    "harmonic": {"c": None},
    "bump": {"amplitude": 1.0, "radius": 1.0},
    "strip_complement": {"c": None, "N": None},
}


def _num(name, v):
    try:
        v = float(v)
    except (TypeError, ValueError):
        raise ValidationError(name, f"expected a real number, got {v!r}") from None
    if not math.isfinite(v):
        raise ValidationError(name, f"must be finite, got {v}")
    return v


def _check_params(kind: str, params: dict) -> dict:
    allowed = dict(_DEFAULTS[kind])
    if kind == "harmonic":
        allowed["gamma"] = None
    unknown = set(params) - set(allowed)
    if unknown:
        raise ValidationError(f"params.{sorted(unknown)[0]}", f"unknown parameter for kind {kind}")
    p = {}
    for k, default in allowed.items():
        if k in params:
            p[k] = _num(f"params.{k}", params[k])
        elif default is not None:
            p[k] = default
    if kind == "harmonic":
        if "gamma" in p:
            if "c" in p:
                raise ValidationError("params.gamma", "give either c or gamma, not both")
            if p["gamma"] <= 0:
                raise ValidationError("params.gamma", "must be > 0")
            p["c"] = 0.5 * p.pop("gamma") ** 2
    for k in ("c",):
        if kind in ("constant", "harmonic", "strip_complement"):
            if k not in p:
                raise ValidationError(f"params.{k}", "required")
            if p[k] < 0:
                raise ValidationError(f"params.{k}", "must be >= 0")
    if kind == "power":
        if "alpha" not in p:
            raise ValidationError("params.alpha", "required")
        if p["alpha"] <= 0:
            raise ValidationError("params.alpha", "must be > 0")
    if kind == "exponential":
        if "beta" not in p:
            raise ValidationError("params.beta", "required")
        if p["beta"] <= 1:
            raise ValidationError("params.beta", "must be > 1")
    if kind == "strip_complement":
        if "N" not in p:
            raise ValidationError("params.N", "required")
        if p["N"] <= 0:
            raise ValidationError("params.N", "must be > 0")
    if kind == "bump":
        if p["radius"] <= 0:
            raise ValidationError("params.radius", "must be > 0")
        if p["amplitude"] < 0:
            raise ValidationError("params.amplitude", "must be >= 0")
    for k in ("scale",):
        if k in p and p[k] < 0:
            raise ValidationError(f"params.{k}", "must be >= 0")
    return p


def _row(kind: str, p: dict) -> tuple:
    if kind in ("constant", "harmonic"):
        return (_CODE[kind], p["c"], 0.0)
    if kind == "power":
        return (K_POWER, p["scale"], p["alpha"])
    if kind == "exponential":
        return (K_EXP, p["scale"], p["beta"])
    if kind == "bump":
        return (K_BUMP, p["amplitude"], p["radius"])
    return (K_STRIP, p["c"], p["N"])


# ---------------------------------------------------------------- evaluation

@nb.njit(inline="always", cache=True)
def _term(kind, p0, p1, r2, x1):
    if kind == 0:
        return p0
    if kind == 1:
        if r2 <= 0.0:
            return 0.0
        if p1 == 1.0:
            return p0 * math.sqrt(r2)
        if p1 == 2.0:
            return p0 * r2
        return p0 * math.exp(0.5 * p1 * math.log(r2))
    if kind == 2:
        return p0 * math.pow(p1, math.sqrt(r2))
    if kind == 3:
        return p0 * r2
    if kind == 4:
        q = r2 / (p1 * p1)
        if q >= 1.0:
            return 0.0
        return p0 * math.exp(1.0 - 1.0 / (1.0 - q))
    if abs(x1) > p1:
        return p0
    return 0.0


@nb.njit(inline="always", cache=True)
def v_at(kinds, par, x):
    """V(x) for a term table; ``par`` rows are ``(p0, p1, sign, cutoff)``."""
    r2 = 0.0
    for i in range(x.shape[0]):
        r2 += x[i] * x[i]
    if kinds.shape[0] == 1:
        return _term(kinds[0], par[0, 0], par[0, 1], r2, x[0])
    v = 0.0
    for j in range(kinds.shape[0]):
        cut = par[j, 3]
        if cut > 0.0 and r2 < cut * cut:
            continue
        v += par[j, 2] * _term(kinds[j], par[j, 0], par[j, 1], r2, x[0])
    return v if v > 0.0 else 0.0


def _term_np(kind, p0, p1, r, x1):
    if kind == K_CONST:
        return np.full_like(r, p0)
    if kind == K_POWER:
        with np.errstate(divide="ignore"):
            return np.where(r > 0, p0 * np.power(r, p1), 0.0)
    if kind == K_EXP:
        return p0 * np.power(p1, r)
    if kind == K_HARM:
        return p0 * r * r
    if kind == K_BUMP:
        q = (r / p1) ** 2
        inside = q < 1.0
        out = np.zeros_like(r)
        out[inside] = p0 * np.exp(1.0 - 1.0 / (1.0 - q[inside]))
        return out
    return np.where(np.abs(x1) > p1, p0, 0.0)


def _term_scalar(kind, p0, p1, r):
    """Radial profile of one term at a radius r >= 0."""
    if kind == K_CONST:
        return p0
    try:
        if kind == K_POWER:
            return p0 * r ** p1 if r > 0 else 0.0
        if kind == K_EXP:
            return p0 * p1 ** r
    except OverflowError:
        return math.inf
    if kind == K_HARM:
        return p0 * r * r
    q = (r / p1) ** 2
    return p0 * math.exp(1.0 - 1.0 / (1.0 - q)) if q < 1.0 else 0.0


class Potential:
    """Evaluable, immutable potential built from a :class:`PotentialSpec`."""

    def __init__(self, spec: PotentialSpec, rows: list, metadata: dict):
        self.spec = spec
        self.d = int(spec.d)
        self.kind = spec.kind
        self.kinds = np.array([r[0] for r in rows], dtype=np.int64)
        self.par = np.array([[r[1], r[2], r[3], r[4]] for r in rows], dtype=np.float64)
        self.kinds.setflags(write=False)
        self.par.setflags(write=False)
        self.metadata = metadata
        self.sup = self._global_sup()
        self.metadata["clamped"] = self._scan_clamp() if len(rows) > 1 else False

    # properties used by estimators
    @property
    def is_constant(self) -> bool:
        return len(self.kinds) == 1 and self.kinds[0] == K_CONST

    @property
    def constant_value(self) -> float | None:
        return float(self.par[0, 0]) if self.is_constant else None

    @property
    def radial(self) -> bool:
        return K_STRIP not in self.kinds

    @property
    def exact_extrema(self) -> bool:
        return len(self.kinds) == 1

    def _global_sup(self) -> float:
        total = 0.0
        for k, (p0, p1, s, _) in zip(self.kinds, self.par):
            if p0 == 0.0:
                continue
            if k in (K_POWER, K_EXP, K_HARM):
                if s > 0:
                    return math.inf
                continue
            if s > 0:
                total += p0
        return total

    def _scan_clamp(self) -> bool:
        r = np.concatenate([np.linspace(0.0, 50.0, 5001), self.par[:, 3]])
        return bool(np.any(self._profile_raw(r) < 0.0))

    def _profile_raw(self, r):
        """Unclamped radial profile for radial potentials (r >= 0 array)."""
        r = np.asarray(r, dtype=float)
        v = np.zeros_like(r)
        for k, (p0, p1, s, cut) in zip(self.kinds, self.par):
            g = _term_np(k, p0, p1, r, r)
            v += s * np.where(r >= cut, g, 0.0)
        return v

    def profile(self, r):
        """V as a function of |x| (radial potentials only)."""
        if not self.radial:
            raise ValidationError("kind", "profile is defined for radial potentials only")
        v = self._profile_raw(r)
        return np.maximum(v, 0.0) if len(self.kinds) > 1 else v

    def __call__(self, x) -> np.ndarray | float:
        """V at points ``x`` of shape ``(..., d)``.

        For d=1 a scalar is one point and a flat array is a list of points.
        """
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0 or (x.ndim == 1 and self.d > 1)
        if self.d == 1 and (x.ndim == 1 or (x.ndim >= 1 and x.shape[-1] != 1)):
            x = x[..., None]
        elif x.ndim == 0:
            x = x.reshape(1)
        if x.shape[-1] != self.d:
            raise ValidationError("x", f"expected trailing dimension {self.d}, got {x.shape[-1]}")
        r = np.sqrt(np.sum(x * x, axis=-1))
        x1 = x[..., 0]
        if len(self.kinds) == 1:
            v = _term_np(self.kinds[0], self.par[0, 0], self.par[0, 1], r, x1)
        else:
            v = np.zeros_like(r)
            for k, (p0, p1, s, cut) in zip(self.kinds, self.par):
                v += s * np.where(r >= cut, _term_np(k, p0, p1, r, x1), 0.0)
            v = np.maximum(v, 0.0)
        if scalar or v.ndim == 0:
            return float(np.asarray(v).reshape(-1)[0])
        return v

    def value(self, x) -> float:
        """V at a single point."""
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.size != self.d:
            raise ValidationError("x", f"expected a point of dimension {self.d}, got {x.size} coordinates")
        return float(self(x.reshape(1, self.d))[0])

    def eval(self, x, a: float = 1.0):
        """V(x)^a with 0^0 = 1."""
        if a < 0:
            raise ValidationError("a", "must be >= 0")
        v = self(x)
        if a == 0:
            return 1.0 if np.ndim(v) == 0 else np.ones_like(v)
        return v ** a

    def radial_extrema(self, x, r: float, full_output: bool = False):
        """(min, max) of V over the closed ball B(x, r)."""
        if r < 0:
            raise ValidationError("r", "must be >= 0")
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if len(self.kinds) == 1:
            k = int(self.kinds[0])
            p0, p1 = float(self.par[0, 0]), float(self.par[0, 1])
            if k == K_STRIP:
                ax = abs(float(x[0]))
                lo, hi = max(0.0, ax - r), ax + r
                res = (p0 if lo > p1 else 0.0, p0 if hi > p1 else 0.0)
            else:
                nx = math.sqrt(float(x @ x))
                lo, hi = max(0.0, nx - r), nx + r
                glo, ghi = _term_scalar(k, p0, p1, lo), _term_scalar(k, p0, p1, hi)
                res = (ghi, glo) if k == K_BUMP else (glo, ghi)
            return (res, {"approximate": False}) if full_output else res
        nx = float(np.linalg.norm(x))
        lo, hi = max(0.0, nx - r), nx + r
        res = _interval_extrema(self.profile, lo, hi)
        return (res, {"approximate": True}) if full_output else res

    def model(self, x):
        """Model function g of the kind (the base kind for sums), with unit scale."""
        spec = self.spec.base if self.kind == "perturbed_sum" else self.spec
        k, _, p1 = _row(spec.kind, _check_params(spec.kind, dict(spec.params)))
        x = np.asarray(x, dtype=float).reshape(-1, self.d)
        r = np.sqrt(np.sum(x * x, axis=-1))
        return _term_np(k, 1.0, p1, r, x[:, 0])

    def check_equivalence(self, radii) -> bool:
        """m g <= V <= M g on sampled |x| >= R0 along the first axis."""
        md = self.metadata
        if not {"m", "M", "R0"} <= set(md):
            raise ValidationError("metadata", "needs m, M and R0")
        radii = np.asarray([r for r in radii if r >= md["R0"]], dtype=float)
        pts = np.zeros((len(radii), self.d))
        pts[:, 0] = radii
        v, g = self(pts), self.model(pts)
        tol = 1e-12 * np.maximum(1.0, np.abs(v))
        return bool(np.all(md["m"] * g <= v + tol) and np.all(v <= md["M"] * g + tol))

    def __repr__(self):
        return f"Potential({self.kind}, d={self.d}, params={self.spec.params})"


def _interval_extrema(h, lo: float, hi: float, n: int = 2049):
    """Extrema of a 1D function on [lo, hi] by sampling plus local refinement."""
    if hi - lo <= 0:
        v = float(h(np.array([lo]))[0])
        return v, v
    r = np.linspace(lo, hi, n)
    v = h(r)
    out = []
    for sgn, idx in ((1.0, int(np.argmin(v))), (-1.0, int(np.argmax(v)))):
        best = sgn * v[idx]
        a, b = r[max(idx - 1, 0)], r[min(idx + 1, n - 1)]
        if b > a:
            opt = minimize_scalar(lambda s: sgn * float(h(np.array([s]))[0]), bounds=(a, b),
                                  method="bounded", options={"xatol": 1e-12})
            best = min(best, float(opt.fun))
        out.append(sgn * best)
    return out[0], out[1]


# ---------------------------------------------------------------- constructors

def construct(spec: PotentialSpec) -> Potential:
    """Validate a spec and return an evaluable potential."""
    if spec.kind not in KINDS:
        raise ValidationError("kind", f"unknown kind {spec.kind!r}; expected one of {KINDS}")
    if int(spec.d) != spec.d or spec.d < 1:
        raise ValidationError("d", f"dimension must be a positive integer, got {spec.d}")
    md = dict(spec.metadata or {})
    if md:
        for k in md:
            if k not in ("m", "M", "R0"):
                raise ValidationError(f"metadata.{k}", "unknown metadata key")
        if not {"m", "M", "R0"} <= set(md):
            raise ValidationError("metadata", "needs m, M and R0 together")
        md = {k: _num(f"metadata.{k}", v) for k, v in md.items()}
        if not 0 < md["m"] <= md["M"]:
            raise ValidationError("metadata.m", "need 0 < m <= M")
    if spec.kind != "perturbed_sum":
        p = _check_params(spec.kind, dict(spec.params))
        spec = PotentialSpec(spec.kind, int(spec.d), p, metadata=spec.metadata)
        k, p0, p1 = _row(spec.kind, p)
        if not md and spec.kind in ("power", "exponential") and p0 > 0:
            md = {"m": p0, "M": p0, "R0": 0.0}
        return Potential(spec, [(k, p0, p1, 1.0, 0.0)], md)
    if spec.base is None:
        raise ValidationError("base", "perturbed_sum needs a base spec")
    rows = []
    for i, (sub, sign, cutoff) in enumerate(((spec.base, 1.0, 0.0),) + tuple(spec.terms)):
        name = "base" if i == 0 else f"terms[{i - 1}]"
        if sub.kind not in _RADIAL:
            raise ValidationError(f"{name}.kind", f"perturbed_sum accepts radial kinds only, got {sub.kind}")
        p = _check_params(sub.kind, dict(sub.params))
        sign = _num(f"{name}.sign", sign)
        cutoff = _num(f"{name}.cutoff", cutoff)
        if cutoff < 0:
            raise ValidationError(f"{name}.cutoff", "must be >= 0")
        k, p0, p1 = _row(sub.kind, p)
        rows.append((k, p0, p1, sign, cutoff))
    spec = PotentialSpec("perturbed_sum", int(spec.d), {}, tuple(spec.terms), spec.base, spec.metadata)
    return Potential(spec, rows, md)


def constant(c: float, d: int = 1) -> Potential:
    return construct(PotentialSpec("constant", d, {"c": c}))


def power(alpha: float, d: int = 1, scale: float = 1.0) -> Potential:
    return construct(PotentialSpec("power", d, {"alpha": alpha, "scale": scale}))


def exponential(beta: float, d: int = 1, scale: float = 1.0) -> Potential:
    return construct(PotentialSpec("exponential", d, {"beta": beta, "scale": scale}))


def harmonic(c: float | None = None, d: int = 1, gamma: float | None = None) -> Potential:
    """c|x|^2, or (gamma^2/2)|x|^2 when ``gamma`` is given."""
    params = {"gamma": gamma} if gamma is not None else {"c": c}
    return construct(PotentialSpec("harmonic", d, params))


def bump(amplitude: float = 1.0, radius: float = 1.0, d: int = 1) -> Potential:
    return construct(PotentialSpec("bump", d, {"amplitude": amplitude, "radius": radius}))


def strip_complement(c: float, N: float, d: int = 1) -> Potential:
    """c on {|x_1| > N}, zero on the strip."""
    return construct(PotentialSpec("strip_complement", d, {"c": c, "N": N}))


def perturbed_sum(base: PotentialSpec, terms, d: int | None = None, metadata: dict | None = None) -> Potential:
    d = base.d if d is None else d
    base = PotentialSpec(base.kind, d, base.params)
    terms = tuple((PotentialSpec(s.kind, d, s.params), sign, cut) for s, sign, cut in terms)
    return construct(PotentialSpec("perturbed_sum", d, {}, terms, base, metadata))


def from_dict(cfg: dict[str, Any], d: int | None = None) -> Potential:
    """Build a potential from a config mapping.

    Simple kinds look like ``{kind: power, alpha: 2}``; sums look like
    ``{kind: perturbed_sum, base: {...}, terms: [{kind: ..., sign: -1, cutoff: 2}]}``.
    """
    return construct(spec_from_dict(cfg, d))


def spec_from_dict(cfg: dict[str, Any], d: int | None = None) -> PotentialSpec:
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise ValidationError("potential", "mapping with a 'kind' key expected")
    cfg = dict(cfg)
    kind = cfg.pop("kind")
    dim = int(cfg.pop("d", d if d is not None else 1))
    md = cfg.pop("metadata", None)
    if kind == "perturbed_sum":
        base = spec_from_dict(cfg.pop("base", None) or {}, dim)
        terms = []
        for i, t in enumerate(cfg.pop("terms", [])):
            t = dict(t)
            sign = t.pop("sign", 1.0)
            cut = t.pop("cutoff", 0.0)
            terms.append((spec_from_dict(t, dim), sign, cut))
        if cfg:
            raise ValidationError(f"potential.{sorted(cfg)[0]}", "unknown key")
        return PotentialSpec(kind, dim, {}, tuple(terms), base, md)
    return PotentialSpec(kind, dim, cfg, metadata=md)
