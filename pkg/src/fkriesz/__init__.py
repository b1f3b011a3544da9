"""Monte Carlo and spectral tools for Riesz transforms V^a L^{-a} of Schrodinger operators.

Submodules load on first access so that the command line can fix the numba
thread count before any kernel module is imported.
"""

import importlib

__version__ = "0.1.0"

_SUBMODULES = ("potential", "geometry", "stochastic", "semigroup", "spectral_oracle", "riesz", "rng", "harness")
_EXPORTS = {"Potential": "potential", "PotentialSpec": "potential", "ValidationError": "potential",
            "construct": "potential", "from_dict": "potential"}

__all__ = list(_SUBMODULES) + list(_EXPORTS) + ["__version__"]


def __getattr__(name):
    if name in _SUBMODULES:
        return importlib.import_module(f".{name}", __name__)
    if name in _EXPORTS:
        return getattr(importlib.import_module(f".{_EXPORTS[name]}", __name__), name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
