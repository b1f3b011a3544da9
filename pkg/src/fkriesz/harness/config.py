"""Experiment configuration: YAML in, validated dataclass out.

Every key is checked against the schema and the experiment's declared defaults
before anything is computed, so a bad config never produces partial output.
"""

from __future__ import annotations

import copy
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from ..potential import ValidationError, from_dict
from ..riesz import MCParams, QuadParams


class ConfigError(ValueError):
    """Invalid configuration; ``path`` is the dotted key that failed."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


TOP_KEYS = ("experiment", "potential", "d", "a_values", "x_grid", "mc", "quadrature", "params", "output")
MC_KEYS = {"n_paths": int, "dt": float, "dt_body": float, "seed": int, "budget_normals": float}
QUAD_KEYS = {"n_head": int, "n_body": int, "tail_rel": float, "safety": float, "max_doublings": int,
             "ladder_levels": int}
GRID_KEYS = {"max_norm": float, "count_1d": int, "count_radial": int}

MC_DEFAULTS = {"n_paths": 10_000, "dt": 1e-3, "dt_body": 1e-2, "seed": 0, "budget_normals": None}
QUAD_DEFAULTS = {"n_head": 64, "n_body": 96, "tail_rel": 1e-4, "safety": 1.5, "max_doublings": 4,
                 "ladder_levels": 4}
GRID_DEFAULTS = {"max_norm": 10.0, "count_1d": 41, "count_radial": 11}


class _Loader(yaml.SafeLoader):
    """Safe loader that also reads YAML 1.2 floats such as 1e-3 (1.1 wants 1.0e-3)."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"""^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
                |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
                |\.[0-9_]+(?:[eE][-+]?[0-9]+)?
                |[-+]?\.(?:inf|Inf|INF)
                |\.(?:nan|NaN|NAN))$""", re.X),
    list("-+0123456789."))


@dataclass
class ExperimentConfig:
    experiment: str
    potentials: list = field(default_factory=list)  # list of potential mappings
    d: list = field(default_factory=list)
    a_values: list = field(default_factory=list)
    x_grid: dict = field(default_factory=dict)
    mc: dict = field(default_factory=dict)
    quadrature: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    output: str | None = None

    @property
    def seed(self) -> int:
        return int(self.mc["seed"])

    def mc_params(self, **override) -> MCParams:
        m = {**self.mc, **override}
        return MCParams(int(m["n_paths"]), float(m["dt"]), float(m["dt_body"]), int(m["seed"]))

    def quad_params(self) -> QuadParams:
        return QuadParams(**self.quadrature)

    def points(self, d: int) -> list[np.ndarray]:
        """d=1: a symmetric axis section; d>=2: a radial grid along e_1."""
        g = self.x_grid
        if d == 1:
            return [np.array([v]) for v in np.linspace(-g["max_norm"], g["max_norm"], g["count_1d"])]
        e1 = np.zeros(d)
        e1[0] = 1.0
        return [r * e1 for r in np.linspace(0.0, g["max_norm"], g["count_radial"])]

    def as_dict(self) -> dict:
        return {"experiment": self.experiment, "potential": self.potentials, "d": self.d,
                "a_values": self.a_values, "x_grid": self.x_grid, "mc": self.mc,
                "quadrature": self.quadrature, "params": self.params}


def _number(path: str, v, kind=float, positive=True, allow_zero=False):
    if isinstance(v, bool):
        raise ConfigError(path, f"expected a number, got {v!r}")
    if kind is int:
        if isinstance(v, float) and v.is_integer():
            v = int(v)
        if not isinstance(v, int):
            raise ConfigError(path, f"expected an integer, got {v!r}")
    else:
        if not isinstance(v, (int, float)):
            raise ConfigError(path, f"expected a number, got {v!r}")
        v = float(v)
        if not math.isfinite(v):
            raise ConfigError(path, f"must be finite, got {v}")
    if positive and (v < 0 or (v == 0 and not allow_zero)):
        raise ConfigError(path, f"must be {'>= 0' if allow_zero else '> 0'}, got {v}")
    return v


def _block(path: str, given, schema: dict, defaults: dict) -> dict:
    if given is None:
        given = {}
    if not isinstance(given, dict):
        raise ConfigError(path, "expected a mapping")
    unknown = sorted(set(given) - set(schema))
    if unknown:
        raise ConfigError(f"{path}.{unknown[0]}", "unknown key")
    out = dict(defaults)
    for k, v in given.items():
        if v is None and defaults.get(k) is None:
            out[k] = None
            continue
        out[k] = _number(f"{path}.{k}", v, schema[k], allow_zero=k in ("seed", "max_doublings"))
    return out


def _merge_params(path: str, given, defaults: dict) -> dict:
    """Experiment parameters: known keys only, values type-checked against the defaults."""
    if given is None:
        return copy.deepcopy(defaults)
    if not isinstance(given, dict):
        raise ConfigError(path, "expected a mapping")
    unknown = sorted(set(given) - set(defaults))
    if unknown:
        raise ConfigError(f"{path}.{unknown[0]}", "unknown parameter for this experiment")
    out = copy.deepcopy(defaults)
    for k, v in given.items():
        ref = defaults[k]
        p = f"{path}.{k}"
        if isinstance(ref, dict):
            out[k] = _merge_params(p, v, ref)
        elif isinstance(ref, bool):
            if not isinstance(v, bool):
                raise ConfigError(p, f"expected true/false, got {v!r}")
            out[k] = v
        elif isinstance(ref, (int, float)):
            out[k] = _number(p, v, int if isinstance(ref, int) else float, positive=False)
        elif isinstance(ref, list):
            if not isinstance(v, list) or not v:
                raise ConfigError(p, "expected a non-empty list")
            out[k] = v
        else:
            out[k] = v
    return out


def load(source) -> ExperimentConfig:
    """Parse a YAML file path, YAML text or mapping and validate it completely."""
    from .experiments import REGISTRY  # registry holds the per-experiment defaults

    if isinstance(source, dict):
        raw = copy.deepcopy(source)
    else:
        text = Path(source).read_text(encoding="utf-8") if isinstance(source, Path) or (
            isinstance(source, str) and "\n" not in source and Path(source).exists()) else source
        try:
            raw = yaml.load(text, Loader=_Loader)
        except yaml.YAMLError as exc:
            raise ConfigError("<file>", f"not valid YAML: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "expected a mapping at top level")
    unknown = sorted(set(raw) - set(TOP_KEYS))
    if unknown:
        raise ConfigError(unknown[0], "unknown key")
    eid = raw.get("experiment")
    if eid not in REGISTRY:
        raise ConfigError("experiment", f"unknown experiment {eid!r}; expected one of {sorted(REGISTRY)}")
    exp = REGISTRY[eid]
    for k in ("potential", "d", "a_values", "x_grid"):
        if k in raw and k not in exp.uses:
            raise ConfigError(k, f"not used by experiment {eid}")

    pots = raw.get("potential", exp.defaults.get("potential", []))
    if isinstance(pots, dict):
        pots = [pots]
    if not isinstance(pots, list):
        raise ConfigError("potential", "expected a mapping or a list of mappings")
    ds = raw.get("d", exp.defaults.get("d", [1]))
    ds = [ds] if not isinstance(ds, list) else ds
    ds = [_number(f"d[{i}]", v, int) for i, v in enumerate(ds)]
    for i, p in enumerate(pots):
        for d in ds:
            try:
                from_dict(p, d)
            except ValidationError as exc:
                raise ConfigError(f"potential[{i}].{exc.field}", str(exc).split(": ", 1)[-1]) from None
    a_vals = raw.get("a_values", exp.defaults.get("a_values", []))
    if not isinstance(a_vals, list):
        raise ConfigError("a_values", "expected a list")
    a_vals = [_number(f"a_values[{i}]", v) for i, v in enumerate(a_vals)]

    mc = _block("mc", raw.get("mc"), MC_KEYS, {**MC_DEFAULTS, **exp.defaults.get("mc", {})})
    quad = _block("quadrature", raw.get("quadrature"), QUAD_KEYS, QUAD_DEFAULTS)
    if quad["tail_rel"] >= 1:
        raise ConfigError("quadrature.tail_rel", "must be < 1")
    grid = _block("x_grid", raw.get("x_grid"), GRID_KEYS, {**GRID_DEFAULTS, **exp.defaults.get("x_grid", {})})
    params = _merge_params("params", raw.get("params"), exp.defaults.get("params", {}))
    out = raw.get("output")
    if out is not None and not isinstance(out, str):
        raise ConfigError("output", "expected a path string")
    cfg = ExperimentConfig(eid, pots, ds, a_vals, grid, mc, quad, params, out)
    if exp.check is not None:
        exp.check(cfg)
    return cfg
