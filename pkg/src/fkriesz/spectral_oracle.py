"""Deterministic 1D reference for L = -d^2/(2dx^2) + V on [-R, R] with Dirichlet ends.

The operator is discretised by the three-point second difference on the n
interior nodes x_i = -R + i h, h = 2R / (n + 1), and diagonalised once; every
function of L (e^{-tL}, L^{-a}, V^a L^{-a}) is then applied through the spectrum.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.linalg import LinAlgError, eigh_tridiagonal, svdvals
from scipy.special import gamma as gamma_fn

from .potential import Potential, ValidationError

__all__ = ["SpectralOracle1D", "build", "semigroup_apply", "negative_power_apply",
           "riesz_apply_one", "dual_apply", "l2_contraction_check", "dirichlet_laplacian_eigs",
           "gamma_integral_power"]


class ContractionFailure(RuntimeError):
    """The discrete L^2 inequality <Vf, f> <= <L_h f, f> was violated."""


@dataclass
class SpectralOracle1D:
    R: float
    n: int
    h: float
    x: np.ndarray
    V_grid: np.ndarray
    eigenvalues: np.ndarray
    vectors: np.ndarray  # Euclidean-orthonormal columns
    diag: np.ndarray
    offdiag: float

    @property
    def eigenvectors(self) -> np.ndarray:
        """Eigenvectors orthonormal for the h-weighted inner product."""
        return self.vectors / math.sqrt(self.h)

    def apply(self, g, f_grid) -> np.ndarray:
        coef = self.vectors.T @ np.asarray(f_grid, dtype=float)
        return self.vectors @ (g(self.eigenvalues) * coef)

    def apply_operator(self, f_grid) -> np.ndarray:
        """L_h f via the tridiagonal matrix."""
        f = np.asarray(f_grid, dtype=float)
        out = self.diag * f
        out[1:] += self.offdiag * f[:-1]
        out[:-1] += self.offdiag * f[1:]
        return out

    def at(self, grid_fn, x) -> np.ndarray | float:
        """Linear interpolation of a grid function, zero at the Dirichlet ends."""
        xs = np.concatenate([[-self.R], self.x, [self.R]])
        fs = np.concatenate([[0.0], np.asarray(grid_fn, dtype=float), [0.0]])
        v = np.interp(x, xs, fs)
        return float(v) if np.ndim(v) == 0 else v

    def diagnostics(self) -> dict:
        U = self.eigenvectors
        G = self.h * (U.T @ U)
        ortho = float(np.max(np.abs(G - np.eye(self.n))))
        LU = np.column_stack([self.apply_operator(U[:, i]) for i in range(self.n)])
        res = np.sqrt(self.h) * np.linalg.norm(LU - U * self.eigenvalues, axis=0) / self.eigenvalues
        return {"orthonormality": ortho, "rayleigh": float(np.max(res)),
                "lambda_1": float(self.eigenvalues[0])}

    def summary(self, k: int = 20) -> dict:
        return {"R": self.R, "n": self.n, "h": self.h, "eigenvalues": self.eigenvalues[:k].tolist()}


def build(potential: Potential, R: float, n: int) -> SpectralOracle1D:
    """Discretise and diagonalise; warns when V(+-R) is too small to confine."""
    if potential.d != 1:
        raise ValidationError("d", "the spectral oracle is one dimensional")
    if n < 100:
        raise ValidationError("n", "need n >= 100")
    if R <= 0:
        raise ValidationError("R", "must be > 0")
    h = 2.0 * R / (n + 1)
    x = -R + h * np.arange(1, n + 1)
    V = np.asarray(potential(x), dtype=float)
    edge = min(potential.value(-R), potential.value(R))
    if edge < 10.0 / R ** 2:
        warnings.warn(f"V(+-R) = {edge:.3g} < 10/R^2: the Dirichlet box, not V, may confine", stacklevel=2)
    diag = 1.0 / h ** 2 + V
    off = -0.5 / h ** 2
    try:
        lam, vec = eigh_tridiagonal(diag, np.full(n - 1, off), lapack_driver="stemr")
    except (LinAlgError, ValueError) as exc:
        raise LinAlgError(f"tridiagonal eigensolver failed for n={n}, R={R}, "
                          f"diag range [{diag.min():.3g}, {diag.max():.3g}]: {exc}") from exc
    return SpectralOracle1D(float(R), int(n), h, x, V, lam, vec, diag, off)


def semigroup_apply(oracle: SpectralOracle1D, f_grid, t: float) -> np.ndarray:
    if t < 0:
        raise ValidationError("t", "must be >= 0")
    return oracle.apply(lambda lam: np.exp(-t * lam), f_grid)


def negative_power_apply(oracle: SpectralOracle1D, f_grid, a: float) -> np.ndarray:
    if a < 0:
        raise ValidationError("a", "must be >= 0")
    if a == 0:
        return np.array(f_grid, dtype=float)
    return oracle.apply(lambda lam: lam ** (-a), f_grid)


def riesz_apply_one(oracle: SpectralOracle1D, a: float) -> np.ndarray:
    """V^a L^{-a} 1 on the grid."""
    if a == 0:
        return np.ones(oracle.n)
    return oracle.V_grid ** a * negative_power_apply(oracle, np.ones(oracle.n), a)


def dual_apply(oracle: SpectralOracle1D, a: float) -> np.ndarray:
    """L^{-a}(V^a) on the grid."""
    if a == 0:
        return np.ones(oracle.n)
    return negative_power_apply(oracle, oracle.V_grid ** a, a)


def l2_contraction_check(oracle: SpectralOracle1D, a: float = 0.5) -> float:
    """Largest singular value of diag(V^{1/2}) L_h^{-1/2}; must not exceed 1."""
    if a != 0.5:
        raise ValidationError("a", "the discrete inequality is exact only for a = 1/2")
    if not np.any(oracle.V_grid):
        return 0.0
    B = np.sqrt(oracle.V_grid)[:, None] * oracle.vectors * oracle.eigenvalues ** -0.5
    s = float(svdvals(B, check_finite=False)[0])
    if s > 1.0 + 1e-6:
        raise ContractionFailure(f"||V^(1/2) L^(-1/2)|| = {s:.12g} > 1; the discretisation is broken")
    return s


def dirichlet_laplacian_eigs(R: float, n: int) -> np.ndarray:
    """Eigenvalues (1 - cos(k pi / (n + 1))) / h^2 of the discrete -d^2/(2dx^2)."""
    h = 2.0 * R / (n + 1)
    k = np.arange(1, n + 1)
    return (1.0 - np.cos(k * np.pi / (n + 1))) / h ** 2


def gamma_integral_power(lam: float, a: float) -> float:
    """(1 / Gamma(a)) int_0^inf e^{-t lam} t^{a-1} dt by direct quadrature in t."""
    t0 = 1.0 / lam
    head, _ = quad(lambda t: math.exp(-t * lam), 0.0, t0, weight="alg", wvar=(a - 1.0, 0.0),
                   epsabs=0.0, epsrel=1e-13, limit=200)
    tail, _ = quad(lambda t: math.exp(-t * lam) * t ** (a - 1.0), t0, np.inf,
                   epsabs=0.0, epsrel=1e-13, limit=200)
    return (head + tail) / gamma_fn(a)
