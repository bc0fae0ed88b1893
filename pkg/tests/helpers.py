"""Reference oracles used by the tests: slow, brute-force, or quadrature
implementations that the fast library code is checked against."""
import itertools

import numpy as np

from swift_sim import (
    BeamSelection,
    DataBeamSelection,
    GampConfig,
    GampPrior,
    MeasurementLedger,
    PathSet,
    PilotConfig,
    achievable_rate,
    assemble_channel,
    build_codebook,
    gamp_estimate,
    rng_fork,
    select_beams,
    vec,
    virtual_channel,
)
from swift_sim.measurement import draw_pilot_phases, sensing_block, simulate_measurement
from swift_sim.session import fpa_ue_weights


def quadrature_posterior_mean_var(r, r_var, rho, slab, n_nodes=90):
    """Posterior mean/variance of v given r = v + CN(0, r_var) under the
    spike-and-slab prior (1-rho) delta_0 + rho CN(0, slab), by 2-D
    Gauss-Hermite quadrature over the slab component.

    Densities use the circular convention CN(x; 0, c) = exp(-|x|^2/c)/(pi c).
    """
    nodes, weights = np.polynomial.hermite.hermgauss(n_nodes)
    # substitute v = sqrt(slab)*(x + iy): the Gauss-Hermite weight exp(-x^2)
    # then absorbs the slab density exactly (up to the 1/pi constant)
    vx = np.sqrt(slab) * nodes
    v = vx[:, None] + 1j * vx[None, :]
    w2 = weights[:, None] * weights[None, :] / np.pi

    lik = np.exp(-np.abs(r - v) ** 2 / r_var) / (np.pi * r_var)
    slab_mass = rho * np.sum(w2 * lik)
    spike_mass = (1.0 - rho) * np.exp(-abs(r) ** 2 / r_var) / (np.pi * r_var)
    z = spike_mass + slab_mass

    mean = rho * np.sum(w2 * lik * v) / z
    second = rho * np.sum(w2 * lik * np.abs(v) ** 2) / z
    return mean, second - abs(mean) ** 2


def brute_force_mmse(y, A_eff, rho, slab, noise_var):
    """Exact Bernoulli-Gaussian MMSE estimate by enumerating every support
    pattern and integrating the Gaussians in closed form.

    y = A_eff v + CN(0, noise_var I); v_j zero outside the support, CN(0, slab)
    on it.  Only feasible for a handful of columns.
    """
    m, n = A_eff.shape
    log_terms = []
    means = []
    eye = np.eye(m)
    for pattern in itertools.product([0, 1], repeat=n):
        s = np.flatnonzero(pattern)
        k = s.size
        cov = noise_var * eye
        if k:
            As = A_eff[:, s]
            cov = cov + slab * (As @ As.conj().T)
        sign, logdet = np.linalg.slogdet(cov)
        assert sign.real > 0
        solve_y = np.linalg.solve(cov, y)
        log_ev = -logdet - np.real(np.vdot(y, solve_y))  # up to the pi^-m constant
        log_prior = k * np.log(rho) + (n - k) * np.log(1.0 - rho)
        mean = np.zeros(n, dtype=np.complex128)
        if k:
            mean[s] = slab * (A_eff[:, s].conj().T @ solve_y)
        log_terms.append(log_prior + log_ev)
        means.append(mean)
    log_terms = np.asarray(log_terms)
    w = np.exp(log_terms - log_terms.max())
    w /= w.sum()
    return np.tensordot(w, np.asarray(means), axes=1)


def bg_vector(n, rho, slab, rng):
    active = rng.random(n) < rho
    v = np.zeros(n, dtype=np.complex128)
    k = int(active.sum())
    v[active] = np.sqrt(slab / 2) * (rng.standard_normal(k) + 1j * rng.standard_normal(k))
    return v


def tiny_instance(seed, rho=0.25, slab=1.0, noise=0.1, m=8, n=4):
    """Benign 8x4 instance: dense i.i.d. Gaussian sensing matrix, the regime
    where the loop's posterior approximation is quantitatively accurate.
    (Tiny 0/1 selection matrices leave an intrinsic ~15% gap to the exact
    posterior regardless of convergence settings.)"""
    rng = rng_fork(seed, 0)
    A = np.sqrt(1 / (2 * m)) * (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n)))
    v = bg_vector(n, rho, slab, rng)
    y = A @ v + np.sqrt(noise / 2) * (rng.standard_normal(m) + 1j * rng.standard_normal(m))
    return y, A, v


def full_span_recovery_trial(t, n_bs=16, n_ue=8, r_bs=8, r_ue=4, n_slots=32):
    """One noiseless on-grid recovery trial at the exhaustive-equivalent slot
    budget (n_bs*n_ue/r_ue random-beam slots, redrawn until every pair is
    covered).  Returns (support_exact, nmse) of the estimate."""
    f_bs, w_ue = build_codebook(n_bs), build_codebook(n_ue)
    pilot = PilotConfig(power=1.0, noise_power=0.0)
    prior = GampPrior(rho=2 / (n_bs * n_ue), slab=float(n_bs * n_ue))
    thr = 0.1 * np.sqrt(n_bs * n_ue)
    rng = rng_fork(100 + t, 0)
    bs_cols = rng.integers(0, n_bs, size=2)
    ue_cols = rng.integers(0, n_ue, size=2)
    gains = np.sqrt(0.5) * (rng.standard_normal(2) + 1j * rng.standard_normal(2))
    paths = PathSet(2, np.arccos(-1 + 2 * bs_cols / n_bs),
                    np.arccos(-1 + 2 * ue_cols / n_ue), gains)
    H = assemble_channel(paths, n_bs, n_ue)
    v_true = vec(virtual_channel(H, f_bs, w_ue))
    pick = rng_fork(100 + t, 1)
    while True:
        sels = [BeamSelection(bs_indices=select_beams(np.ones(n_bs), r_bs, pick),
                              ue_indices=select_beams(np.ones(n_ue), r_ue, pick))
                for _ in range(n_slots)]
        counts = np.zeros((n_ue, n_bs), dtype=np.int64)
        for sel in sels:
            counts[np.ix_(sel.ue_indices, sel.bs_indices)] += 1
        if counts.min() >= 1:
            break
    ledger = MeasurementLedger(n_bs=n_bs, n_ue=n_ue, capacity_rows=n_slots * r_ue)
    noise_rng = rng_fork(100 + t, 2)
    for sel in sels:
        pilots = draw_pilot_phases(r_bs, pick)
        y = simulate_measurement(H, sel, pilot, f_bs, w_ue, noise_rng, pilots=pilots)
        ledger.append(sel, pilots, y)
    res = gamp_estimate(ledger.stacked_y, ledger.stacked_A, prior,
                        pilot.noise_power, scale=np.sqrt(pilot.power / r_bs),
                        cfg=GampConfig())
    nmse = float(np.linalg.norm(res.v_hat - v_true) ** 2 / np.linalg.norm(v_true) ** 2)
    support_exact = bool(np.array_equal(np.abs(res.v_hat) >= thr, np.abs(v_true) >= thr))
    return support_exact, nmse


def gaussian_prior_normal_eq_residual(seed=30):
    """Relative residual of the rho=1 estimate in the normal equations of the
    linear-MMSE problem (full-span orthogonal sensing, pure-Gaussian prior)."""
    rng = rng_fork(seed, 0)
    n_bs, n_ue, noise, slab = 8, 4, 0.01, 1.0
    sels = [
        BeamSelection(bs_indices=np.array([i]), ue_indices=np.array([2 * g, 2 * g + 1]))
        for i in range(n_bs)
        for g in range(n_ue // 2)
    ]
    A = stacked_block_oracle(sels, n_bs, n_ue)
    v = np.sqrt(slab / 2) * (rng.standard_normal(32) + 1j * rng.standard_normal(32))
    y = A @ v + np.sqrt(noise / 2) * (rng.standard_normal(A.shape[0]) + 1j * rng.standard_normal(A.shape[0]))
    res = gamp_estimate(y, A, GampPrior(rho=1.0, slab=slab), noise,
                        cfg=GampConfig(damping=1.0, max_iterations=200, tol=1e-12))
    lhs = (slab * A.conj().T @ A + noise * np.eye(32)) @ res.v_hat
    rhs = slab * A.conj().T @ y
    return float(np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs))


def best_rate_by_enumeration(H_true, f_bs, w_ue, power, noise_power, k_max):
    """Maximum achievable rate over every distinct-row/distinct-column beam
    pairing of size 1..k_max (genie bound, exhaustive)."""
    n_bs, n_ue = f_bs.n_antennas, w_ue.n_antennas
    best = 0.0
    for k in range(1, k_max + 1):
        for bs_combo in itertools.permutations(range(n_bs), k):
            for ue_combo in itertools.combinations(range(n_ue), k):
                sel = DataBeamSelection(pairs=tuple(zip(bs_combo, ue_combo)))
                best = max(best, achievable_rate(H_true, sel, f_bs, w_ue, power, noise_power))
    return best


def slots_until_full_span(n_bs, n_ue, r_bs, r_ue, adaptation, bs_rng, ue_rng, cap=10_000):
    """Simulate only the beam-count dynamics (no measurements) and return the
    slot at which every (UE, BS) pair has been probed at least once."""
    from swift_sim.session import BsBeamScheduler

    mode = "uniform" if adaptation == "uniform" else "fpa"
    sched = BsBeamScheduler(n_bs, r_bs, mode, bs_rng)
    pair_counts = np.zeros((n_ue, n_bs), dtype=np.int64)
    for slot in range(1, cap + 1):
        if adaptation == "uniform":
            ue_w = np.ones(n_ue)
        else:
            ue_w = fpa_ue_weights(pair_counts, sched.peek()[0])
        bs_sel, _ = sched.next_slot()
        ue_sel = select_beams(ue_w, r_ue, ue_rng)
        pair_counts[np.ix_(ue_sel, bs_sel)] += 1
        if np.all(pair_counts > 0):
            return slot
    raise AssertionError("span not reached within cap")


def single_path(n_bs, n_ue, bs_col, ue_col, gain=1.0 + 0.0j):
    """One on-grid path aimed exactly at codebook columns (bs_col, ue_col)."""
    from swift_sim import PathSet

    aod = np.arccos(-1.0 + 2.0 * bs_col / n_bs)
    aoa = np.arccos(-1.0 + 2.0 * ue_col / n_ue)
    return PathSet(num_paths=1, aod=np.array([aod]), aoa=np.array([aoa]),
                   gains=np.array([gain], dtype=complex))


def random_uniform_selection(n_bs, n_ue, r_bs, r_ue, rng):
    bs = select_beams(np.ones(n_bs), r_bs, rng)
    ue = select_beams(np.ones(n_ue), r_ue, rng)
    return BeamSelection(bs_indices=bs, ue_indices=ue)


def ledger_from_slots(n_bs, n_ue, selections, pilot_symbol=1.0 + 0.0j):
    """Assemble a ledger with the given selections and zero observations
    (for tests that only care about the stacked sensing matrix)."""
    r_ue = selections[0].ue_indices.size
    led = MeasurementLedger(n_bs=n_bs, n_ue=n_ue, capacity_rows=len(selections) * r_ue)
    for sel in selections:
        s = np.full(sel.bs_indices.size, pilot_symbol, dtype=np.complex128)
        y = np.zeros(sel.ue_indices.size, dtype=np.complex128)
        led.append(sel, s, y)
    return led


def stacked_block_oracle(selections, n_bs, n_ue, pilot_symbol=1.0 + 0.0j):
    blocks = [
        sensing_block(sel, np.full(sel.bs_indices.size, pilot_symbol, dtype=np.complex128), n_bs, n_ue)
        for sel in selections
    ]
    return np.vstack(blocks)
