"""Per-user adaptive estimation sessions and the BS beam scheduler.

A session consumes one BS broadcast per slot (beam selection plus pilot
symbols), draws its own combining beams, records the measurement, and every
`t_u` slots re-estimates the virtual channel, binarizes it, and stops when
two consecutive binarized estimates agree (or the slot budget runs out).
Beam-probability adaptation:

* uniform — all beams equally likely on both sides;
* fpa — weights inversely proportional to usage counts, with never-used
  beams forced into the selection first;
* pepa — fpa until every (BS, UE) beam pair has been probed at least once,
  then UE weights proportional to the predicted received power of each
  combining beam under the upcoming BS transmission.

The BS draw sequence is a pure function of its stream, usage counts, and
mode, so each user reconstructs it locally with a replica scheduler and
never needs side information.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelRealization
from .codebook import Codebook
from .evaluation import select_data_beams
from .gamp import GampConfig, GampPrior, GampResult, gamp_estimate
from .measurement import (
    BeamSelection,
    MeasurementLedger,
    PilotConfig,
    draw_pilot_phases,
    select_beams,
    simulate_measurement,
)
from .numerics import RngStream, unvec

CONTINUE = "continue"
COMPLETE = "complete"
TIMEOUT = "timeout"

ADAPTATIONS = ("uniform", "fpa", "pepa")


@dataclass(frozen=True)
class SystemGeometry:
    n_bs: int
    n_ue: int
    r_bs: int
    r_ue: int

    def __post_init__(self):
        if not (1 <= self.r_bs <= self.n_bs):
            raise ValueError("need 1 <= r_bs <= n_bs")
        if not (1 <= self.r_ue <= self.n_ue):
            raise ValueError("need 1 <= r_ue <= n_ue")


@dataclass(frozen=True)
class SwiftConfig:
    t_u: int
    t_max: int
    gamma: float
    adaptation: str = "fpa"

    def __post_init__(self):
        if not (1 <= self.t_u <= self.t_max):
            raise ValueError("need 1 <= t_u <= t_max")
        if self.t_max % self.t_u != 0:
            raise ValueError("t_max must be a multiple of t_u")
        if not (0 < self.gamma < 1):
            raise ValueError("gamma must lie in (0, 1)")
        if self.adaptation not in ADAPTATIONS:
            raise ValueError(f"adaptation must be one of {ADAPTATIONS}")


def binarize(v_hat, gamma: float, scale: float) -> np.ndarray:
    """Support indicator of the estimate: bit = 0 iff |v_i| < gamma*scale."""
    if gamma <= 0 or scale <= 0:
        raise ValueError("gamma and scale must be positive")
    return (np.abs(np.asarray(v_hat)) >= gamma * scale).astype(np.uint8)


def check_stopping(bits_now, bits_prev, slot: int, cfg: SwiftConfig) -> str:
    """Stop when two consecutive binarized estimates agree on a non-empty
    support, else time out at t_max.

    An all-zero pair does not complete: a user that has detected nothing has
    no beam indices to feed back, so it keeps measuring (deep fades ride out
    to the t_max guard instead of declaring an empty channel "converged").
    """
    if (
        bits_prev is not None
        and np.any(bits_now)
        and np.array_equal(bits_now, bits_prev)
    ):
        return COMPLETE
    if slot >= cfg.t_max:
        return TIMEOUT
    return CONTINUE


def fpa_bs_weights(use_counts) -> np.ndarray:
    """BS weights 1/count; never-used beams get +inf (forced first)."""
    counts = np.asarray(use_counts, dtype=np.float64)
    w = np.empty_like(counts)
    used = counts > 0
    w[used] = 1.0 / counts[used]
    w[~used] = np.inf
    return w


def fpa_ue_weights(pair_counts, next_bs_indices) -> np.ndarray:
    """UE weights 1/min pair count against the upcoming BS beams."""
    mins = np.min(np.asarray(pair_counts, dtype=np.float64)[:, next_bs_indices], axis=1)
    w = np.empty_like(mins)
    used = mins > 0
    w[used] = 1.0 / mins[used]
    w[~used] = np.inf
    return w


def pepa_ue_weights(v_hat, next_bs_indices, s_next, power: float, r_bs: int, n_bs: int, n_ue: int) -> np.ndarray:
    """Predicted per-beam received power under the upcoming BS transmission.

    weight_n = (P/R_BS) * |(H_v_hat q)_n|^2 with q the pilot-scaled indicator
    of the upcoming BS beams.
    """
    H_v = unvec(np.asarray(v_hat), n_ue, n_bs)
    q = np.zeros(n_bs, dtype=np.complex128)
    q[np.asarray(next_bs_indices)] = np.asarray(s_next, dtype=np.complex128)
    pred = H_v @ q
    return (power / r_bs) * (pred.real**2 + pred.imag**2)


class BsBeamScheduler:
    """Draws each slot's BS beam selection and pilot symbols from one stream.

    mode "uniform" keeps flat weights; mode "fpa" re-weights by usage with
    forcing.  Pilot symbols are fresh random phases every slot (the pilot
    sequence is pre-agreed, so users know it).  Construction draws the first
    slot, so `peek` always exposes the upcoming (selection, pilots) pair;
    `next_slot` consumes it, updates the usage counts, and draws the
    following one.  Two schedulers built with identical arguments and stream
    state produce identical sequences — users exploit this to predict BS
    draws.
    """

    def __init__(self, n_bs: int, r_bs: int, mode: str, rng: RngStream):
        if mode not in ("uniform", "fpa"):
            raise ValueError("BS adaptation mode must be 'uniform' or 'fpa'")
        self.n_bs = n_bs
        self.r_bs = r_bs
        self.mode = mode
        self.rng = rng
        self.use_counts = np.zeros(n_bs, dtype=np.int64)
        self._upcoming = self._draw()

    def _draw(self) -> tuple:
        if self.mode == "uniform":
            weights = np.ones(self.n_bs)
        else:
            weights = fpa_bs_weights(self.use_counts)
        sel = select_beams(weights, self.r_bs, self.rng)
        return sel, draw_pilot_phases(self.r_bs, self.rng)

    def peek(self) -> tuple:
        return self._upcoming

    def next_slot(self) -> tuple:
        sel, pilots = self._upcoming
        self.use_counts[sel] += 1
        self._upcoming = self._draw()
        return sel, pilots


@dataclass(frozen=True)
class FeedbackEvent:
    """What a user reports when its estimation phase ends."""

    user_id: int
    t_e: int
    status: str  # COMPLETE or TIMEOUT
    beam_pairs: tuple  # ((bs_index, ue_index), ...)


@dataclass
class SessionDiagnostics:
    estimates: int = 0
    gamp_iterations: int = 0
    full_span_slot: int | None = None


class UserSession:
    """One user's measurement/estimation loop over a fixed channel."""

    def __init__(
        self,
        user_id: int,
        channel: ChannelRealization,
        geom: SystemGeometry,
        f_bs: Codebook,
        w_ue: Codebook,
        pilot: PilotConfig,
        prior: GampPrior,
        gamp_cfg: GampConfig,
        swift: SwiftConfig,
        bs_predictor: BsBeamScheduler,
        ue_rng: RngStream,
        noise_rng: RngStream,
    ):
        self.user_id = user_id
        self.channel = channel
        self.geom = geom
        self.f_bs = f_bs
        self.w_ue = w_ue
        self.pilot = pilot
        self.prior = prior
        self.gamp_cfg = gamp_cfg
        self.swift = swift
        self.predictor = bs_predictor
        self.ue_rng = ue_rng
        self.noise_rng = noise_rng

        # binarization compares |v_hat| against gamma * active-entry std; with
        # off-grid channels this keeps the declared support to the few path
        # peaks instead of the leakage tail
        self.threshold_scale = float(np.sqrt(prior.slab))
        self.ledger = MeasurementLedger(
            n_bs=geom.n_bs, n_ue=geom.n_ue, capacity_rows=swift.t_max * geom.r_ue
        )
        self.pair_counts = np.zeros((geom.n_ue, geom.n_bs), dtype=np.int64)
        self.full_span_reached = False
        self.slot = 0
        self.status = CONTINUE
        self.t_e: int | None = None
        self.bits_prev: np.ndarray | None = None
        self.last_result: GampResult | None = None
        self.diagnostics = SessionDiagnostics()
        self._ue_weights = self._weights_for_upcoming_slot()

    @property
    def active(self) -> bool:
        return self.status == CONTINUE

    def _weights_for_upcoming_slot(self) -> np.ndarray:
        mode = self.swift.adaptation
        if mode == "uniform":
            return np.ones(self.geom.n_ue)
        next_bs, s_next = self.predictor.peek()
        if mode == "pepa" and self.full_span_reached and self.last_result is not None:
            w = pepa_ue_weights(
                self.last_result.v_hat, next_bs, s_next,
                self.pilot.power, self.geom.r_bs, self.geom.n_bs, self.geom.n_ue,
            )
            n_pos = int(np.count_nonzero(w > 0))
            if n_pos >= self.geom.r_ue:
                return w
            if n_pos > 0:
                # fewer energetic rows than RF chains: measure all of them
                # (forced via infinite weight) and fill the remaining chains
                # by the forcing rule
                fill = fpa_ue_weights(self.pair_counts, next_bs)
                fill[w > 0] = np.inf
                return fill
            # all-zero power prediction: forcing weights for this slot
        return fpa_ue_weights(self.pair_counts, next_bs)

    def step(self, bs_selection: np.ndarray, pilots: np.ndarray) -> FeedbackEvent | None:
        """Advance one slot under the given BS selection and pilot symbols;
        returns the feedback event on the slot the session ends."""
        if not self.active:
            raise RuntimeError("session already ended")
        predicted_sel, predicted_pilots = self.predictor.next_slot()
        if not (np.array_equal(predicted_sel, bs_selection)
                and np.array_equal(predicted_pilots, pilots)):
            raise RuntimeError("UE prediction of the BS selection diverged")
        self.slot += 1

        ue_sel = select_beams(self._ue_weights, self.geom.r_ue, self.ue_rng)
        sel = BeamSelection(bs_indices=bs_selection, ue_indices=ue_sel)
        y = simulate_measurement(
            self.channel.H, sel, self.pilot, self.f_bs, self.w_ue, self.noise_rng,
            pilots=pilots,
        )
        self.ledger.append(sel, pilots, y)

        self.pair_counts[np.ix_(ue_sel, bs_selection)] += 1
        if not self.full_span_reached and np.all(self.pair_counts > 0):
            self.full_span_reached = True
            self.diagnostics.full_span_slot = self.slot

        event = None
        if self.slot % self.swift.t_u == 0:
            result = gamp_estimate(
                self.ledger.stacked_y,
                self.ledger.stacked_A,
                self.prior,
                self.pilot.noise_power,
                scale=np.sqrt(self.pilot.power / self.geom.r_bs),
                cfg=self.gamp_cfg,
            )
            self.last_result = result
            self.diagnostics.estimates += 1
            self.diagnostics.gamp_iterations += result.iterations
            bits = binarize(result.v_hat, self.swift.gamma, self.threshold_scale)
            outcome = check_stopping(bits, self.bits_prev, self.slot, self.swift)
            # estimates made before every beam pair has been measured carry
            # coefficients with no data behind them (infinite posterior
            # variance); they are provisional and never retained for the
            # stability comparison
            self.bits_prev = bits if self.full_span_reached else None
            if outcome != CONTINUE:
                self.status = outcome
                self.t_e = self.slot
                event = self._feedback(outcome)
        elif self.slot >= self.swift.t_max:  # unreachable while t_max % t_u == 0
            self.status = TIMEOUT
            self.t_e = self.slot
            event = self._feedback(TIMEOUT)

        if self.active:
            self._ue_weights = self._weights_for_upcoming_slot()
        return event

    def _feedback(self, status: str) -> FeedbackEvent:
        k_max = min(self.geom.r_bs, self.geom.r_ue)
        if self.last_result is None:
            pairs = ()
        else:
            selection = select_data_beams(
                self.last_result.v_hat, self.swift.gamma, self.threshold_scale,
                k_max, self.geom.n_bs, self.geom.n_ue,
            )
            pairs = selection.pairs
        return FeedbackEvent(user_id=self.user_id, t_e=self.t_e, status=status, beam_pairs=pairs)


def run_single_session(session: UserSession, scheduler: BsBeamScheduler) -> FeedbackEvent:
    """Drive one session to completion against a live BS scheduler."""
    event = None
    while session.active:
        sel, pilots = scheduler.next_slot()
        event = session.step(sel, pilots)
    if event is None:
        raise RuntimeError("session was not active")
    return event
