"""Monte Carlo experiment driver.

Runs seeded trials of each configured scheme over an SNR grid (single-user
mode) or a user-count grid (multi-user cell mode) and aggregates per-metric
means, standard errors, and completion-time CDFs into CSV-ready rows.

Reproducibility contract: every random draw comes from a stream forked as
rng_fork(master_seed, domain, trial, user), so outputs are a pure function
of (config, seed).  Schemes at the same grid point share channel, BS,
UE, and noise streams (common random numbers), which pairs the comparisons
the acceptance trends rely on; SNR points share the channel geometry too,
differing only in the gain scale.

SNR convention: SNR := P*sigma_R/N0.  Single-user sweeps set sigma_R to hit
the target with P/N0 fixed; the cell model derives sigma_R = d^-beta.
"""
from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .baselines import run_exhaustive, run_fnrb
from .channel import (
    ChannelRealization,
    assemble_channel,
    draw_cell_user,
    draw_paths,
    rescale_gains,
    virtual_channel,
)
from .codebook import build_codebook
from .config import ExperimentConfig, SchemeSpec
from .evaluation import (
    DataBeamSelection,
    achievable_rate,
    effective_rate,
    schedule_first_k,
    select_data_beams,
    shared_band_effective_rate,
)
from .gamp import GampPrior
from .measurement import PilotConfig
from .numerics import rng_fork, weighted_sample_without_replacement
from .session import (
    BsBeamScheduler,
    SwiftConfig,
    SystemGeometry,
    UserSession,
    run_single_session,
)

# rng stream domains (first fork id)
DOM_CHANNEL, DOM_BS, DOM_UE, DOM_NOISE, DOM_CELL, DOM_PICK = 0, 1, 2, 3, 4, 5


@dataclass(frozen=True)
class ResultRow:
    scheme: str
    sweep_var: str
    sweep_value: float
    metric: str
    mean: float
    stderr: float
    trials: int
    seed: int


@dataclass(frozen=True)
class CdfRow:
    scheme: str
    snr_db: float
    t_e: int
    cdf: float


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: list = field(default_factory=list)      # ResultRow
    cdf_rows: list = field(default_factory=list)  # CdfRow


@lru_cache(maxsize=16)
def _codebook(n: int):
    return build_codebook(n)


def _geometry(cfg: ExperimentConfig) -> SystemGeometry:
    return SystemGeometry(n_bs=cfg.n_bs, n_ue=cfg.n_ue, r_bs=cfg.r_bs, r_ue=cfg.r_ue)


def _prior(cfg: ExperimentConfig, sigma_r: float) -> GampPrior:
    # on-grid entry variance of the virtual channel; rho = expected activity
    rho = min(1.0, cfg.expected_paths / (cfg.n_bs * cfg.n_ue))
    return GampPrior(rho=rho, slab=cfg.n_bs * cfg.n_ue * sigma_r)


def _swift_cfg(cfg: ExperimentConfig, adaptation: str) -> SwiftConfig:
    return SwiftConfig(t_u=cfg.t_u, t_max=cfg.t_max, gamma=cfg.gamma, adaptation=adaptation)


def _bs_mode(adaptation: str) -> str:
    return "uniform" if adaptation == "uniform" else "fpa"


def _channel_for(cfg: ExperimentConfig, trial: int, user: int, sigma_r: float) -> ChannelRealization:
    rng = rng_fork(cfg.master_seed, DOM_CHANNEL, trial, user)
    paths = draw_paths(cfg.expected_paths, 1.0, cfg.n_bs, cfg.n_ue, rng, on_grid=cfg.on_grid)
    paths = rescale_gains(paths, 1.0, sigma_r)
    H = assemble_channel(paths, cfg.n_bs, cfg.n_ue)
    f_bs, w_ue = _codebook(cfg.n_bs), _codebook(cfg.n_ue)
    return ChannelRealization(paths=paths, H=H, H_v=virtual_channel(H, f_bs, w_ue), sigma_r=sigma_r)


def _rate_for_pairs(cfg: ExperimentConfig, channel: ChannelRealization, pairs) -> float:
    return achievable_rate(
        channel.H,
        DataBeamSelection(pairs=tuple(pairs)),
        _codebook(cfg.n_bs),
        _codebook(cfg.n_ue),
        cfg.power_watts,
        cfg.noise_watts,
    )


def _select_pairs(cfg: ExperimentConfig, v_hat, sigma_r: float) -> tuple:
    scale = float(np.sqrt(cfg.n_bs * cfg.n_ue * sigma_r))
    sel = select_data_beams(
        v_hat, cfg.gamma, scale, min(cfg.r_bs, cfg.r_ue), cfg.n_bs, cfg.n_ue
    )
    return sel.pairs


def _single_user_trial(cfg: ExperimentConfig, snr_db: float, trial: int) -> dict:
    """Run every configured scheme once on this trial's channel; returns
    {scheme: {metric: value}}."""
    sigma_r = (10.0 ** (snr_db / 10.0)) * cfg.noise_watts / cfg.power_watts
    channel = _channel_for(cfg, trial, 0, sigma_r)
    geom = _geometry(cfg)
    f_bs, w_ue = _codebook(cfg.n_bs), _codebook(cfg.n_ue)
    pilot = PilotConfig(power=cfg.power_watts, noise_power=cfg.noise_watts)
    prior = _prior(cfg, sigma_r)

    out: dict = {}
    for spec in cfg.scheme_specs():
        if spec.kind == "swift":
            mode = _bs_mode(spec.adaptation)
            scheduler = BsBeamScheduler(cfg.n_bs, cfg.r_bs, mode, rng_fork(cfg.master_seed, DOM_BS, trial, 0))
            predictor = BsBeamScheduler(cfg.n_bs, cfg.r_bs, mode, rng_fork(cfg.master_seed, DOM_BS, trial, 0))
            session = UserSession(
                0, channel, geom, f_bs, w_ue, pilot, prior, cfg.gamp,
                _swift_cfg(cfg, spec.adaptation), predictor,
                rng_fork(cfg.master_seed, DOM_UE, trial, 0),
                rng_fork(cfg.master_seed, DOM_NOISE, trial, 0),
            )
            event = run_single_session(session, scheduler)
            t_e, pairs = event.t_e, event.beam_pairs
        elif spec.kind == "es":
            result, t_e = run_exhaustive(
                channel, geom, f_bs, w_ue, pilot, prior, cfg.gamp,
                rng_fork(cfg.master_seed, DOM_NOISE, trial, 0),
                rng_fork(cfg.master_seed, DOM_BS, trial, 0),
            )
            pairs = _select_pairs(cfg, result.v_hat, sigma_r)
        else:  # fnrb
            scheduler = BsBeamScheduler(cfg.n_bs, cfg.r_bs, "uniform", rng_fork(cfg.master_seed, DOM_BS, trial, 0))
            result, t_e = run_fnrb(
                channel, geom, f_bs, w_ue, pilot, prior, cfg.gamp, spec.fnrb_slots,
                scheduler,
                rng_fork(cfg.master_seed, DOM_UE, trial, 0),
                rng_fork(cfg.master_seed, DOM_NOISE, trial, 0),
            )
            pairs = _select_pairs(cfg, result.v_hat, sigma_r)
        rate = _rate_for_pairs(cfg, channel, pairs)
        metrics = {"t_e_slots": float(t_e), "rate_opt": rate}
        for tc in cfg.t_c:
            metrics[f"effective_rate_tc{tc}"] = effective_rate(rate, t_e, tc)
        out[spec.name] = metrics
    return out


def _multi_user_trial(cfg: ExperimentConfig, num_users: int, trial: int) -> dict:
    """One cell trial: place users, run each scheme's pilot phase, schedule
    the first n_s completers, and average their shared-band rates."""
    geom = _geometry(cfg)
    f_bs, w_ue = _codebook(cfg.n_bs), _codebook(cfg.n_ue)
    pilot = PilotConfig(power=cfg.power_watts, noise_power=cfg.noise_watts)

    users = [
        draw_cell_user(u, cfg.cell_radius_m, cfg.pathloss_exp,
                       rng_fork(cfg.master_seed, DOM_CELL, trial, u), d_min=cfg.d_min_m)
        for u in range(num_users)
    ]
    channels = [_channel_for(cfg, trial, u, users[u].sigma_r) for u in range(num_users)]
    priors = [_prior(cfg, users[u].sigma_r) for u in range(num_users)]

    out: dict = {}
    for spec in cfg.scheme_specs():
        completions: list = []  # (user_id, t_e, pairs)
        if spec.kind == "swift":
            mode = _bs_mode(spec.adaptation)
            scheduler = BsBeamScheduler(cfg.n_bs, cfg.r_bs, mode, rng_fork(cfg.master_seed, DOM_BS, trial, 0))
            sessions = []
            for u in range(num_users):
                predictor = BsBeamScheduler(cfg.n_bs, cfg.r_bs, mode, rng_fork(cfg.master_seed, DOM_BS, trial, 0))
                sessions.append(UserSession(
                    u, channels[u], geom, f_bs, w_ue, pilot, priors[u], cfg.gamp,
                    _swift_cfg(cfg, spec.adaptation), predictor,
                    rng_fork(cfg.master_seed, DOM_UE, trial, u),
                    rng_fork(cfg.master_seed, DOM_NOISE, trial, u),
                ))
            # lockstep over slots; the BS stops pilots once n_s users are done,
            # so sessions still running past that point are simply abandoned
            while any(s.active for s in sessions) and len(completions) < cfg.n_s:
                bs_sel, bs_pilots = scheduler.next_slot()
                for s in sessions:
                    if not s.active:
                        continue
                    event = s.step(bs_sel, bs_pilots)
                    if event is not None:
                        completions.append((event.user_id, event.t_e, event.beam_pairs))
        elif spec.kind == "es":
            # the swept beam's pilot phases are broadcast: one shared stream
            for u in range(num_users):
                result, t_e = run_exhaustive(
                    channels[u], geom, f_bs, w_ue, pilot, priors[u], cfg.gamp,
                    rng_fork(cfg.master_seed, DOM_NOISE, trial, u),
                    rng_fork(cfg.master_seed, DOM_BS, trial, 0),
                )
                completions.append((u, t_e, _select_pairs(cfg, result.v_hat, users[u].sigma_r)))
        else:
            # one BS broadcast sequence, reconstructed per user from the
            # shared stream (each run_fnrb consumes its own replica)
            for u in range(num_users):
                replay = BsBeamScheduler(cfg.n_bs, cfg.r_bs, "uniform", rng_fork(cfg.master_seed, DOM_BS, trial, 0))
                result, t_e = run_fnrb(
                    channels[u], geom, f_bs, w_ue, pilot, priors[u], cfg.gamp, spec.fnrb_slots,
                    replay,
                    rng_fork(cfg.master_seed, DOM_UE, trial, u),
                    rng_fork(cfg.master_seed, DOM_NOISE, trial, u),
                )
                completions.append((u, t_e, _select_pairs(cfg, result.v_hat, users[u].sigma_r)))

        if spec.kind == "fnrb":
            # these schemes get no completion-order signal: serve n_s users
            # picked uniformly at random
            k = min(cfg.n_s, num_users)
            pick_rng = rng_fork(cfg.master_seed, DOM_PICK, trial, 0)
            picked = weighted_sample_without_replacement(np.ones(num_users), k, pick_rng)
            scheduled = sorted(int(i) for i in picked)
            pilot_end = spec.fnrb_slots
        else:
            scheduled, pilot_end = schedule_first_k(
                [(uid, t) for uid, t, _ in completions], cfg.n_s
            )
        by_user = {uid: pairs for uid, _, pairs in completions}
        rates = [
            _rate_for_pairs(cfg, channels[uid], by_user.get(uid, ()))
            for uid in scheduled
        ]
        metrics = {"pilot_end_slots": float(pilot_end)}
        for tc in cfg.t_c:
            per_user = [
                shared_band_effective_rate(r, pilot_end, len(scheduled), tc) for r in rates
            ]
            metrics[f"per_user_effective_rate_tc{tc}"] = float(np.mean(per_user))
        out[spec.name] = metrics
    return out


def _trial_task(args):
    cfg, sweep_value, trial = args
    if cfg.mode == "single_user":
        return sweep_value, trial, _single_user_trial(cfg, sweep_value, trial)
    return sweep_value, trial, _multi_user_trial(cfg, int(sweep_value), trial)


def run_experiment(cfg: ExperimentConfig, threads: int = 1, progress=None) -> ExperimentResult:
    """Run the full sweep; deterministic for fixed (config, seed).

    `threads` > 1 distributes trials over processes; aggregation order is
    independent of scheduling, so results are identical either way.
    """
    cfg.validate()
    sweep_var = "snr_db" if cfg.mode == "single_user" else "num_users"
    sweep_values = list(cfg.snr_grid_db) if cfg.mode == "single_user" else list(cfg.user_counts)
    trials = cfg.resolved_trials

    tasks = [(cfg, v, t) for v in sweep_values for t in range(trials)]
    outcomes: dict = {}
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for sweep_value, trial, data in pool.map(_trial_task, tasks, chunksize=8):
                outcomes[(sweep_value, trial)] = data
                if progress:
                    progress(len(outcomes), len(tasks))
    else:
        for task in tasks:
            sweep_value, trial, data = _trial_task(task)
            outcomes[(sweep_value, trial)] = data
            if progress:
                progress(len(outcomes), len(tasks))

    result = ExperimentResult(config=cfg)
    scheme_names = [s.name for s in cfg.scheme_specs()]
    metric_names: list = []
    if cfg.mode == "single_user":
        metric_names = ["t_e_slots", "rate_opt"] + [f"effective_rate_tc{tc}" for tc in cfg.t_c]
    else:
        metric_names = ["pilot_end_slots"] + [f"per_user_effective_rate_tc{tc}" for tc in cfg.t_c]

    for scheme in scheme_names:
        for v in sweep_values:
            per_trial = [outcomes[(v, t)][scheme] for t in range(trials)]
            for metric in metric_names:
                vals = np.array([m[metric] for m in per_trial], dtype=np.float64)
                stderr = float(np.std(vals, ddof=1) / np.sqrt(vals.size)) if vals.size > 1 else 0.0
                result.rows.append(ResultRow(
                    scheme=scheme, sweep_var=sweep_var, sweep_value=float(v),
                    metric=metric, mean=float(np.mean(vals)), stderr=stderr,
                    trials=trials, seed=cfg.master_seed,
                ))
            if cfg.mode == "single_user":
                t_samples = np.array([m["t_e_slots"] for m in per_trial])
                for t in range(cfg.t_u, cfg.t_max + 1, cfg.t_u):
                    result.cdf_rows.append(CdfRow(
                        scheme=scheme, snr_db=float(v), t_e=t,
                        cdf=float(np.mean(t_samples <= t)),
                    ))
    return result


def write_results(result: ExperimentResult, out_dir: str) -> dict:
    """Write results.csv, cdf.csv, and the resolved config sidecar.

    Returns the written paths.  Output is byte-deterministic for a fixed
    (config, seed): floats are serialized with repr (shortest round trip).
    """
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "results": os.path.join(out_dir, "results.csv"),
        "cdf": os.path.join(out_dir, "cdf.csv"),
        "config": os.path.join(out_dir, "config.json"),
    }
    try:
        with open(paths["results"], "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["scheme", "sweep_var", "sweep_value", "metric", "mean", "stderr", "trials", "seed"])
            for r in result.rows:
                sweep = str(int(r.sweep_value)) if r.sweep_var == "num_users" else repr(float(r.sweep_value))
                w.writerow([r.scheme, r.sweep_var, sweep, r.metric,
                            repr(float(r.mean)), repr(float(r.stderr)), r.trials, r.seed])
        with open(paths["cdf"], "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["scheme", "snr_db", "t_e", "cdf"])
            for r in result.cdf_rows:
                w.writerow([r.scheme, repr(float(r.snr_db)), r.t_e, repr(float(r.cdf))])
        with open(paths["config"], "w") as fh:
            fh.write(result.config.to_json())
            fh.write("\n")
    except OSError as e:
        raise OSError(f"failed writing results under {out_dir}: {e}") from e
    return paths
