"""Bernoulli-Gaussian GAMP estimation of the vectorized virtual channel.

Observation model: y = A_eff v + n with A_eff = scale * A, n ~ CN(0, N0 I),
and prior v_j ~ (1-rho) delta_0 + rho CN(0, slab) i.i.d.  The estimator runs
sum-product GAMP with scalar AWGN output denoising and Bernoulli-Gaussian
input denoising, damped updates, and a relative-change stopping rule.

The support/slab posterior weight is computed in the log domain so the
estimator stays stable across the many orders of magnitude of slab/noise
encountered in a cell-geometry sweep.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .numerics import ComplexMatrix, ComplexVector


@dataclass(frozen=True)
class GampPrior:
    """i.i.d. Bernoulli-Gaussian prior: activity rho, active variance slab."""

    rho: float
    slab: float

    def __post_init__(self):
        if not (0 < self.rho <= 1):
            raise ValueError("rho must lie in (0, 1]")
        if self.slab <= 0:
            raise ValueError("slab variance must be positive")


@dataclass(frozen=True)
class GampConfig:
    max_iterations: int = 50
    tol: float = 1e-6
    damping: float = 0.7

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("need at least one iteration")
        if self.tol < 0:
            raise ValueError("tol must be non-negative")
        if not (0 < self.damping <= 1):
            raise ValueError("damping must lie in (0, 1]")


@dataclass
class GampResult:
    v_hat: ComplexVector
    v_var: np.ndarray
    iterations: int
    converged: bool
    residuals: np.ndarray       # relative change of v_hat per iteration
    support_sizes: np.ndarray   # entries with posterior activity > 1/2


class GampDivergence(RuntimeError):
    def __init__(self, iteration: int):
        super().__init__(f"GAMP iterate became non-finite at iteration {iteration}")
        self.iteration = iteration


def _log_prior_odds(rho: float) -> float:
    """log((1-rho)/rho); -inf at rho=1 collapses the posterior onto the slab."""
    return -math.inf if rho >= 1.0 else math.log((1.0 - rho) / rho)


def gin_mean_var(r, r_var: float, prior: GampPrior):
    """Scalar Bernoulli-Gaussian denoiser: posterior mean/variance of v given
    the pseudo-observation r = v + CN(0, r_var).

    Vectorized over r.  Exposed mainly for verification against numerical
    posterior integrals.
    """
    r = np.asarray(r, dtype=np.complex128)
    rv = float(r_var)
    slab = prior.slab
    tot = rv + slab
    nu = rv * slab / tot
    gamma = r * (slab / tot)
    r2 = r.real**2 + r.imag**2
    t = _log_prior_odds(prior.rho) + np.log(tot / rv) - r2 * slab / (rv * tot)
    pi = 1.0 / (1.0 + np.exp(np.minimum(t, 700.0)))
    mean = pi * gamma
    g2 = gamma.real**2 + gamma.imag**2
    var = pi * (nu + (1.0 - pi) * g2)
    return mean, var


def gout_mean_var(y, p, p_var, noise_var: float):
    """Scalar AWGN output step: s = (y-p)/(p_var+N0) and its variance."""
    s = (np.asarray(y) - np.asarray(p)) / (np.asarray(p_var) + noise_var)
    s_var = 1.0 / (np.asarray(p_var) + noise_var)
    return s, s_var


def _dense_to_csr(A: ComplexMatrix, scale: float):
    rows, cols = np.nonzero(A)
    data = A[rows, cols] * scale
    counts = np.bincount(rows, minlength=A.shape[0])
    indptr = np.zeros(A.shape[0] + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, cols.astype(np.int64), data.astype(np.complex128)


def gamp_estimate(
    y: ComplexVector,
    A: ComplexMatrix,
    prior: GampPrior,
    noise_var: float,
    scale: float = 1.0,
    cfg: GampConfig = GampConfig(),
    backend: str | None = None,
) -> GampResult:
    """Estimate v from y = scale*A v + CN(0, noise_var I).

    Never-sensed coefficients (all-zero columns of A) are pinned to the
    prior (mean 0, variance rho*slab).  If an iterate goes non-finite the
    pass is retried with halved damping (twice) before GampDivergence is
    raised with the offending iteration.
    """
    y = np.ascontiguousarray(y, dtype=np.complex128)
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or y.ndim != 1 or y.size != A.shape[0]:
        raise ValueError(f"shape mismatch: y {y.shape} vs A {A.shape}")
    if noise_var < 0:
        raise ValueError("noise variance must be non-negative")
    if scale <= 0:
        raise ValueError("scale must be positive")

    if backend is None:
        backend = _kernels.backend_name()
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not _kernels.HAS_NUMBA:
        raise ValueError("numba backend requested but unavailable")

    log_odds = _log_prior_odds(prior.rho)
    damping = cfg.damping
    last_iteration = 0
    for _attempt in range(3):
        if backend == "numba":
            indptr, indices, data = _dense_to_csr(A, scale)
            v, vv, iters, status, res, supp = _kernels.gamp_csr(
                y, indptr, indices, data, A.shape[1],
                prior.rho, prior.slab, noise_var,
                cfg.max_iterations, cfg.tol, damping, log_odds,
            )
        else:
            v, vv, iters, status, res, supp = _kernels.gamp_numpy(
                y, scale * A, prior.rho, prior.slab, noise_var,
                cfg.max_iterations, cfg.tol, damping, log_odds,
            )
        if status != _kernels.STATUS_DIVERGED:
            return GampResult(
                v_hat=v,
                v_var=vv,
                iterations=int(iters),
                converged=status == _kernels.STATUS_CONVERGED,
                residuals=res,
                support_sizes=supp,
            )
        last_iteration = int(iters)
        damping = damping / 2.0
    raise GampDivergence(last_iteration)
