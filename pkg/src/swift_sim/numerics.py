"""Shared numeric primitives: counter-based RNG streams, complex Gaussians,
vectorization helpers, and weighted sampling without replacement.

All randomness in the simulator flows through `rng_fork`, which derives
independent, reproducible streams from a master seed and a tuple of integer
stream ids.  Philox (counter-based) keeps streams platform-independent and
cheap to fork.
"""
from __future__ import annotations

import numpy as np

# Arrays are the types; these aliases document intent at API boundaries.
ComplexVector = np.ndarray
ComplexMatrix = np.ndarray
RngStream = np.random.Generator

kron = np.kron


def rng_fork(seed: int, *stream_ids: int) -> RngStream:
    """Derive an independent random stream from a master seed.

    Streams with distinct id tuples are statistically independent; the same
    (seed, ids) pair always yields an identical stream.
    """
    if seed < 0:
        raise ValueError("seed must be non-negative")
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(int(i) for i in stream_ids))
    return np.random.Generator(np.random.Philox(ss))


def complex_gaussian(mean, variance: float, rng: RngStream, size=None) -> ComplexVector:
    """Draw circularly-symmetric complex Gaussians CN(mean, variance).

    Real and imaginary parts are independent N(0, variance/2); the second
    moment of (x - mean) is exactly `variance`.
    """
    if variance < 0:
        raise ValueError("variance must be non-negative")
    shape = () if size is None else (size if isinstance(size, tuple) else (size,))
    z = rng.standard_normal(shape + (2,))
    out = np.sqrt(variance / 2.0) * (z[..., 0] + 1j * z[..., 1]) + mean
    return out


def poisson_sample(lam: float, rng: RngStream) -> int:
    """One Poisson draw with mean lam (lam = 0 degenerates to 0)."""
    if lam < 0:
        raise ValueError("rate must be non-negative")
    return int(rng.poisson(lam))


def vec(M: ComplexMatrix) -> ComplexVector:
    """Column-major (column-stacking) vectorization."""
    return np.asarray(M).flatten(order="F")


def unvec(v: ComplexVector, rows: int, cols: int) -> ComplexMatrix:
    """Inverse of `vec`: reshape a length rows*cols vector column-major."""
    v = np.asarray(v)
    if v.size != rows * cols:
        raise ValueError(f"cannot unvec length {v.size} into {rows}x{cols}")
    return v.reshape((rows, cols), order="F")


def weighted_sample_without_replacement(weights, k: int, rng: RngStream) -> np.ndarray:
    """Draw k distinct indices sequentially with probability proportional to
    weight, removing each selected index before the next draw.

    Returns indices in draw order.  Weights must be non-negative and finite,
    with at least k strictly positive entries.
    """
    w = np.asarray(weights, dtype=np.float64).copy()
    if w.ndim != 1:
        raise ValueError("weights must be a 1-D array")
    if not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite")
    if np.any(w < 0):
        raise ValueError("weights must be non-negative")
    if not (0 <= k <= w.size):
        raise ValueError(f"cannot draw {k} from {w.size} items")
    if np.count_nonzero(w > 0) < k:
        raise ValueError(f"need at least {k} strictly positive weights")
    out = np.empty(k, dtype=np.int64)
    for d in range(k):
        c = np.cumsum(w)
        r = rng.random() * c[-1]
        idx = int(np.searchsorted(c, r, side="right"))
        out[d] = idx
        w[idx] = 0.0
    return out
