"""Reference training schemes: an exhaustive beam sweep and fixed-duration
uniform random beamforming.  Both produce a single estimate from their full
ledger and reuse the same evaluation path as the adaptive sessions, so
comparisons isolate the training policy.
"""
from __future__ import annotations

import numpy as np

from .channel import ChannelRealization
from .codebook import Codebook
from .gamp import GampConfig, GampPrior, GampResult, gamp_estimate
from .measurement import (
    BeamSelection,
    MeasurementLedger,
    PilotConfig,
    draw_pilot_phases,
    select_beams,
    simulate_measurement,
)
from .numerics import RngStream
from .session import BsBeamScheduler, SystemGeometry


def run_exhaustive(
    channel: ChannelRealization,
    geom: SystemGeometry,
    f_bs: Codebook,
    w_ue: Codebook,
    pilot: PilotConfig,
    prior: GampPrior,
    gamp_cfg: GampConfig,
    noise_rng: RngStream,
    pilot_rng: RngStream,
):
    """Deterministic sweep: one BS beam at a time against every group of
    r_ue consecutive UE beams; every (BS, UE) pair is measured exactly once.

    Returns (estimate, t_e) with t_e = n_bs*n_ue/r_ue slots.  The single
    active BS beam carries the full transmit power; its pilot phase is
    drawn fresh per slot from the broadcast stream.
    """
    if geom.n_ue % geom.r_ue != 0:
        raise ValueError("exhaustive sweep needs n_ue divisible by r_ue")
    groups = geom.n_ue // geom.r_ue
    t_e = geom.n_bs * groups
    ledger = MeasurementLedger(n_bs=geom.n_bs, n_ue=geom.n_ue, capacity_rows=t_e * geom.r_ue)
    for i in range(geom.n_bs):
        for g in range(groups):
            sel = BeamSelection(
                bs_indices=np.array([i], dtype=np.int64),
                ue_indices=np.arange(g * geom.r_ue, (g + 1) * geom.r_ue, dtype=np.int64),
            )
            pilots = draw_pilot_phases(1, pilot_rng)
            y = simulate_measurement(channel.H, sel, pilot, f_bs, w_ue, noise_rng, pilots=pilots)
            ledger.append(sel, pilots, y)
    result = gamp_estimate(
        ledger.stacked_y,
        ledger.stacked_A,
        prior,
        pilot.noise_power,
        scale=np.sqrt(pilot.power / 1.0),
        cfg=gamp_cfg,
    )
    return result, t_e


def run_fnrb(
    channel: ChannelRealization,
    geom: SystemGeometry,
    f_bs: Codebook,
    w_ue: Codebook,
    pilot: PilotConfig,
    prior: GampPrior,
    gamp_cfg: GampConfig,
    fixed_slots: int,
    bs_scheduler: BsBeamScheduler,
    ue_rng: RngStream,
    noise_rng: RngStream,
):
    """Uniform random beam selection for exactly `fixed_slots` slots, one
    estimate at the end — no adaptation, no early stop.

    The BS selections come from the shared scheduler so multi-user trials
    broadcast one sequence, exactly like the adaptive schemes.
    """
    if fixed_slots < 1:
        raise ValueError("need at least one slot")
    ledger = MeasurementLedger(
        n_bs=geom.n_bs, n_ue=geom.n_ue, capacity_rows=fixed_slots * geom.r_ue
    )
    ue_weights = np.ones(geom.n_ue)
    for _ in range(fixed_slots):
        bs_sel, pilots = bs_scheduler.next_slot()
        ue_sel = select_beams(ue_weights, geom.r_ue, ue_rng)
        sel = BeamSelection(bs_indices=bs_sel, ue_indices=ue_sel)
        y = simulate_measurement(channel.H, sel, pilot, f_bs, w_ue, noise_rng, pilots=pilots)
        ledger.append(sel, pilots, y)
    result = gamp_estimate(
        ledger.stacked_y,
        ledger.stacked_A,
        prior,
        pilot.noise_power,
        scale=np.sqrt(pilot.power / geom.r_bs),
        cfg=gamp_cfg,
    )
    return result, fixed_slots
