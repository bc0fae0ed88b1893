"""Iteration kernels for the Bernoulli-Gaussian GAMP estimator.

Two interchangeable backends:

* numba (default when importable): the sensing matrix is consumed as CSR
  index arrays and every pass is a fused scalar loop.  Pilot sensing rows
  carry only R_BS nonzeros out of N_BS*N_UE columns, so sparse matvecs are
  the difference between milliseconds and seconds per call.
* numpy (fallback, or forced with SWIFT_SIM_NO_NUMBA=1): dense matmuls,
  kept deliberately simple as a reference implementation.

Backends agree to ~1e-10 relative (summation orders differ); each backend
is bitwise deterministic for fixed inputs.

Status codes: 0 = converged, 1 = iteration budget exhausted,
2 = diverged (non-finite iterate), with the offending iteration reported.
"""
from __future__ import annotations

import os

import numpy as np

STATUS_CONVERGED = 0
STATUS_MAX_ITER = 1
STATUS_DIVERGED = 2

_env = os.environ.get("SWIFT_SIM_NO_NUMBA", "").strip()
_numba_wanted = _env in ("", "0")

if _numba_wanted:
    try:
        from numba import njit

        HAS_NUMBA = True
    except ImportError:  # pragma: no cover - numba present in normal installs
        HAS_NUMBA = False
else:
    HAS_NUMBA = False


def backend_name() -> str:
    return "numba" if HAS_NUMBA else "numpy"


def _gamp_csr_py(
    y,
    indptr,
    indices,
    data,
    n_cols,
    rho,
    slab,
    noise_var,
    max_iter,
    tol,
    damping,
    log_prior_odds,
):
    """Reference CSR iteration; numba-compiled when the backend is active."""
    n_rows = y.size
    nnz = data.size
    abs2 = np.empty(nnz)
    for k in range(nnz):
        abs2[k] = data[k].real * data[k].real + data[k].imag * data[k].imag

    v = np.zeros(n_cols, dtype=np.complex128)
    vv = np.ones(n_cols)
    s = np.zeros(n_rows, dtype=np.complex128)
    sv = np.zeros(n_rows)

    z = np.zeros(n_rows, dtype=np.complex128)
    zv = np.zeros(n_rows)
    rnum = np.zeros(n_cols, dtype=np.complex128)
    denom = np.zeros(n_cols)

    residuals = np.zeros(max_iter)
    support = np.zeros(max_iter, dtype=np.int64)

    d = damping
    status = STATUS_MAX_ITER
    iters = max_iter
    for it in range(max_iter):
        # output linear step
        for i in range(n_rows):
            acc = 0.0 + 0.0j
            accv = 0.0
            for k in range(indptr[i], indptr[i + 1]):
                j = indices[k]
                acc += data[k] * v[j]
                accv += abs2[k] * vv[j]
            z[i] = acc
            zv[i] = accv
        # output nonlinear step (AWGN posterior on z)
        bad = False
        for i in range(n_rows):
            p = z[i] - zv[i] * s[i]
            pv = zv[i] + noise_var
            if pv <= 0.0:
                # degenerate AWGN posterior (zero predicted variance, zero
                # noise); complex division would raise rather than overflow
                bad = True
                break
            g = (y[i] - p) / pv
            gv = 1.0 / pv
            s[i] = (1.0 - d) * s[i] + d * g
            sv[i] = (1.0 - d) * sv[i] + d * gv
            if not (np.isfinite(s[i].real) and np.isfinite(s[i].imag) and np.isfinite(sv[i])):
                bad = True
        if bad:
            status = STATUS_DIVERGED
            iters = it + 1
            break
        # input linear step
        for j in range(n_cols):
            rnum[j] = 0.0 + 0.0j
            denom[j] = 0.0
        for i in range(n_rows):
            for k in range(indptr[i], indptr[i + 1]):
                j = indices[k]
                rnum[j] += np.conj(data[k]) * s[i]
                denom[j] += abs2[k] * sv[i]
        # input nonlinear step (Bernoulli-Gaussian posterior)
        diff2 = 0.0
        norm2 = 0.0
        nnz_post = 0
        for j in range(n_cols):
            if denom[j] > 0.0:
                rv = 1.0 / denom[j]
                r = v[j] + rv * rnum[j]
                tot = rv + slab
                nu = rv * slab / tot
                gamma = r * (slab / tot)
                r2 = r.real * r.real + r.imag * r.imag
                t = log_prior_odds + np.log(tot / rv) - r2 * slab / (rv * tot)
                if t > 700.0:
                    t = 700.0
                pi = 1.0 / (1.0 + np.exp(t))
                g2 = gamma.real * gamma.real + gamma.imag * gamma.imag
                v_new = pi * gamma
                vv_new = pi * (nu + (1.0 - pi) * g2)
                if pi > 0.5:
                    nnz_post += 1
            else:
                # column never sensed: posterior equals the prior
                v_new = 0.0 + 0.0j
                vv_new = rho * slab
            v_post = (1.0 - d) * v[j] + d * v_new
            vv_post = (1.0 - d) * vv[j] + d * vv_new
            dv = v_post - v[j]
            diff2 += dv.real * dv.real + dv.imag * dv.imag
            norm2 += v_post.real * v_post.real + v_post.imag * v_post.imag
            v[j] = v_post
            vv[j] = vv_post
        if not (np.isfinite(diff2) and np.isfinite(norm2)):
            status = STATUS_DIVERGED
            iters = it + 1
            break
        residuals[it] = np.sqrt(diff2 / norm2) if norm2 > 0.0 else 0.0
        support[it] = nnz_post
        if diff2 <= tol * tol * norm2:
            status = STATUS_CONVERGED
            iters = it + 1
            break
    return v, vv, iters, status, residuals[:iters], support[:iters]


if HAS_NUMBA:
    _gamp_csr = njit(cache=True)(_gamp_csr_py)
else:
    _gamp_csr = _gamp_csr_py


def gamp_numpy(y, A_eff, rho, slab, noise_var, max_iter, tol, damping, log_prior_odds):
    """Dense-matrix GAMP pass, vectorized numpy throughout."""
    n_rows, n_cols = A_eff.shape
    abs2 = A_eff.real**2 + A_eff.imag**2
    Ah = A_eff.conj().T
    abs2_T = abs2.T

    v = np.zeros(n_cols, dtype=np.complex128)
    vv = np.ones(n_cols)
    s = np.zeros(n_rows, dtype=np.complex128)
    sv = np.zeros(n_rows)

    residuals = np.zeros(max_iter)
    support = np.zeros(max_iter, dtype=np.int64)
    d = damping
    status = STATUS_MAX_ITER
    iters = max_iter
    for it in range(max_iter):
        z = A_eff @ v
        zv = abs2 @ vv
        p = z - zv * s
        pv = zv + noise_var
        if np.any(pv <= 0.0):
            # degenerate AWGN posterior (zero predicted variance, zero noise)
            status = STATUS_DIVERGED
            iters = it + 1
            break
        g = (y - p) / pv
        gv = 1.0 / pv
        s = (1.0 - d) * s + d * g
        sv = (1.0 - d) * sv + d * gv
        if not np.all(np.isfinite(s)) or not np.all(np.isfinite(sv)):
            status = STATUS_DIVERGED
            iters = it + 1
            break
        denom = abs2_T @ sv
        rnum = Ah @ s
        sensed = denom > 0.0
        v_new = np.zeros(n_cols, dtype=np.complex128)
        vv_new = np.full(n_cols, rho * slab)
        pi = np.zeros(n_cols)
        if np.any(sensed):
            rv = 1.0 / denom[sensed]
            r = v[sensed] + rv * rnum[sensed]
            tot = rv + slab
            nu = rv * slab / tot
            gamma = r * (slab / tot)
            r2 = r.real**2 + r.imag**2
            t = log_prior_odds + np.log(tot / rv) - r2 * slab / (rv * tot)
            pis = 1.0 / (1.0 + np.exp(np.minimum(t, 700.0)))
            g2 = gamma.real**2 + gamma.imag**2
            v_new[sensed] = pis * gamma
            vv_new[sensed] = pis * (nu + (1.0 - pis) * g2)
            pi[sensed] = pis
        v_post = (1.0 - d) * v + d * v_new
        vv_post = (1.0 - d) * vv + d * vv_new
        diff2 = float(np.sum(np.abs(v_post - v) ** 2))
        norm2 = float(np.sum(np.abs(v_post) ** 2))
        v, vv = v_post, vv_post
        if not (np.isfinite(diff2) and np.isfinite(norm2)):
            status = STATUS_DIVERGED
            iters = it + 1
            break
        residuals[it] = np.sqrt(diff2 / norm2) if norm2 > 0.0 else 0.0
        support[it] = int(np.count_nonzero(pi > 0.5))
        if diff2 <= tol * tol * norm2:
            status = STATUS_CONVERGED
            iters = it + 1
            break
    return v, vv, iters, status, residuals[:iters], support[:iters]


def gamp_csr(y, indptr, indices, data, n_cols, rho, slab, noise_var, max_iter, tol, damping, log_prior_odds):
    return _gamp_csr(
        y,
        indptr,
        indices,
        data,
        n_cols,
        rho,
        slab,
        noise_var,
        max_iter,
        tol,
        damping,
        log_prior_odds,
    )
