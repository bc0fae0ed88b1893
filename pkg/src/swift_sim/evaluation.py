"""Turning estimates into rates: data-beam selection, achievable and
effective rate, first-k feedback scheduling, and empirical CDFs.

Rates are always evaluated against the TRUE channel with the selection the
user derived from its estimate, so estimation errors show up as rate loss
rather than being rewarded.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .codebook import Codebook
from .numerics import ComplexMatrix, unvec


@dataclass(frozen=True)
class DataBeamSelection:
    """Distinct-row/distinct-column (bs, ue) beam pairs, strongest first."""

    pairs: tuple  # ((bs_index, ue_index), ...)

    @property
    def k(self) -> int:
        return len(self.pairs)

    def bs_indices(self) -> list:
        return [p[0] for p in self.pairs]

    def ue_indices(self) -> list:
        return [p[1] for p in self.pairs]


def select_data_beams(
    v_hat, gamma: float, scale: float, k_max: int, n_bs: int, n_ue: int
) -> DataBeamSelection:
    """Greedy data-beam choice from the estimated virtual channel.

    Entries below gamma*scale are ignored; remaining entries are taken in
    decreasing magnitude, skipping any that reuses a BS column or UE row,
    until k_max pairs are found.  May be empty (blocked channel).
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    H_v = unvec(np.asarray(v_hat), n_ue, n_bs)
    mag = np.abs(H_v)
    ue_idx, bs_idx = np.nonzero(mag >= gamma * scale)
    if ue_idx.size == 0:
        return DataBeamSelection(pairs=())
    order = np.argsort(-mag[ue_idx, bs_idx], kind="stable")
    used_bs = set()
    used_ue = set()
    pairs = []
    for t in order:
        b, u = int(bs_idx[t]), int(ue_idx[t])
        if b in used_bs or u in used_ue:
            continue
        pairs.append((b, u))
        used_bs.add(b)
        used_ue.add(u)
        if len(pairs) == k_max:
            break
    return DataBeamSelection(pairs=tuple(pairs))


def achievable_rate(
    H_true: ComplexMatrix,
    sel: DataBeamSelection,
    f_bs: Codebook,
    w_ue: Codebook,
    power: float,
    noise_power: float,
) -> float:
    """log2 det(I + P/(N0 k) W_d^H H F_d F_d^H H^H W_d): equal power split
    over the k selected beam pairs, evaluated on the true channel."""
    k = sel.k
    if k == 0:
        return 0.0
    F_d = f_bs.matrix[:, sel.bs_indices()]
    W_d = w_ue.matrix[:, sel.ue_indices()]
    M = W_d.conj().T @ H_true @ F_d
    G = M @ M.conj().T
    eig = np.linalg.eigvalsh(G)
    eig = np.clip(eig, 0.0, None)
    c = power / (noise_power * k)
    return float(np.sum(np.log2(1.0 + c * eig)))


def effective_rate(rate_opt: float, t_e_slots: float, t_c: int) -> float:
    """Training-time-discounted rate, floored at zero once T_E reaches T_c."""
    if t_c <= 0:
        raise ValueError("coherence budget must be positive")
    return max(0.0, rate_opt * (1.0 - t_e_slots / t_c))


def schedule_first_k(feedback_times, n_s: int):
    """Pick the n_s users with the smallest completion times.

    `feedback_times` is a sequence of (user_id, t_e).  Ties break by user
    id.  Returns (selected user ids, pilot_end), where pilot_end is the
    largest t_e among the selected users — the slot at which the BS stops
    broadcasting pilots.  Fewer than n_s users means everyone is scheduled.
    """
    if n_s < 1:
        raise ValueError("need n_s >= 1")
    entries = sorted(((int(t), int(u)) for u, t in feedback_times))
    chosen = entries[:n_s]
    if not chosen:
        raise ValueError("no completed users to schedule")
    pilot_end = max(t for t, _ in chosen)
    return [u for _, u in chosen], pilot_end


def shared_band_effective_rate(rate_opt: float, pilot_end: int, n_s: int, t_c: int) -> float:
    """Scheduled user's rate when the post-pilot airtime T_c - pilot_end is
    split equally among the n_s scheduled users."""
    if t_c <= 0 or n_s < 1:
        raise ValueError("invalid airtime split")
    share = max(0.0, (t_c - pilot_end) / (n_s * t_c))
    return rate_opt * share


def empirical_cdf(samples):
    """Right-continuous empirical CDF: returns (values, probabilities)."""
    s = np.asarray(samples, dtype=np.float64)
    if s.size == 0:
        raise ValueError("need at least one sample")
    values, counts = np.unique(s, return_counts=True)
    probs = np.cumsum(counts) / s.size
    return values, probs


@dataclass
class UserOutcome:
    """Evaluated end state of one user in one trial."""

    user_id: int
    t_e: int
    status: str
    beam_pairs: tuple
    rate_opt: float


@dataclass
class TrialResult:
    """One trial's evaluated outcomes plus the scheduling verdict."""

    users: list = field(default_factory=list)   # UserOutcome
    scheduled_ids: list = field(default_factory=list)
    pilot_end: int = 0
