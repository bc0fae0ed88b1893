"""Pilot measurement simulation and the linear model it induces.

Each training slot transmits one pilot through a random subset of BS
codebook beams while the UE combines with a random subset of its own
codebook beams.  Because both codebooks are unitary, the slot's measurement
is an exact linear observation of the vectorized virtual channel; the
per-slot sensing block is a Kronecker product of 0/1 selection matrices
(scaled by the pilot symbols), which this module constructs exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .codebook import Codebook
from .numerics import (
    ComplexMatrix,
    ComplexVector,
    RngStream,
    complex_gaussian,
    weighted_sample_without_replacement,
)


@dataclass(frozen=True)
class BeamSelection:
    """Beam indices used in one slot (draw order, distinct)."""

    bs_indices: np.ndarray
    ue_indices: np.ndarray


@dataclass(frozen=True)
class PilotConfig:
    """Link parameters for pilot slots (linear units: watts)."""

    power: float        # total transmit power P
    noise_power: float  # post-combining noise variance N0
    pilot_symbol: complex = 1.0 + 0.0j

    def __post_init__(self):
        if self.power <= 0:
            raise ValueError("power must be positive")
        if self.noise_power < 0:
            raise ValueError("noise power must be non-negative")


def draw_pilot_phases(k: int, rng: RngStream) -> ComplexVector:
    """Unit-modulus pilot symbols with i.i.d. uniform phases.

    Satisfies the pilot power constraint E[s sᴴ] = I exactly and keeps the
    stacked sensing matrix zero-mean across slots, which the estimator needs
    for stable message passing (constant pilots leave a rank-one mean
    component that destabilizes it).
    """
    if k < 1:
        raise ValueError("need at least one pilot symbol")
    return np.exp(2j * np.pi * rng.uniform(0.0, 1.0, size=k))


def select_beams(weights, k: int, rng: RngStream) -> np.ndarray:
    """Weighted draw of k distinct beam indices.

    Entries with weight +inf are force-included before any weighted draw
    (used for never-probed beams): if more than k are infinite, k of them
    are chosen uniformly; otherwise all infinite entries are taken (ascending
    index order) and the remainder drawn from the finite weights.
    """
    w = np.asarray(weights, dtype=np.float64)
    forced = np.flatnonzero(np.isinf(w))
    if forced.size >= k:
        pick = weighted_sample_without_replacement(np.ones(forced.size), k, rng)
        return forced[pick]
    rest = w.copy()
    rest[forced] = 0.0
    drawn = weighted_sample_without_replacement(rest, k - forced.size, rng)
    return np.concatenate([forced, drawn])


def simulate_measurement(
    H: ComplexMatrix,
    sel: BeamSelection,
    cfg: PilotConfig,
    f_bs: Codebook,
    w_ue: Codebook,
    rng: RngStream,
    pilots: ComplexVector | None = None,
) -> ComplexVector:
    """One slot's received pilot vector (one entry per UE combining beam).

    The transmit power splits evenly over the active BS beams; combining
    with orthonormal UE beams keeps the noise white with variance N0.
    `pilots` carries the slot's per-chain symbols; omitted, every chain
    sends the constant `cfg.pilot_symbol`.
    """
    F_m = f_bs.matrix[:, sel.bs_indices]
    W_m = w_ue.matrix[:, sel.ue_indices]
    if pilots is None:
        s_m = np.full(sel.bs_indices.size, cfg.pilot_symbol, dtype=np.complex128)
    else:
        s_m = np.asarray(pilots, dtype=np.complex128)
        if s_m.size != sel.bs_indices.size:
            raise ValueError("one pilot symbol per active BS beam")
    scale = np.sqrt(cfg.power / sel.bs_indices.size)
    y = scale * (W_m.conj().T @ H @ (F_m @ s_m))
    y += complex_gaussian(0.0, cfg.noise_power, rng, size=y.size)
    return y


def sensing_block(
    sel: BeamSelection, s_m: ComplexVector, n_bs: int, n_ue: int
) -> ComplexMatrix:
    """Sensing rows of one slot against the vectorized virtual channel.

    With unitary codebooks the beam-domain cross products reduce to exact
    0/1 selection matrices, so the block is kron(s^T on selected BS columns,
    UE row selector): row r has nonzeros exactly at columns
    bs_index*n_ue + ue_indices[r], each equal to the pilot symbol.
    """
    s_m = np.asarray(s_m, dtype=np.complex128)
    if s_m.size != sel.bs_indices.size:
        raise ValueError("one pilot symbol per active BS beam")
    q = np.zeros((1, n_bs), dtype=np.complex128)
    q[0, sel.bs_indices] = s_m
    sel_w = np.zeros((sel.ue_indices.size, n_ue), dtype=np.complex128)
    sel_w[np.arange(sel.ue_indices.size), sel.ue_indices] = 1.0
    return np.kron(q, sel_w)


@dataclass
class SlotRecord:
    slot: int
    selection: BeamSelection
    pilots: ComplexVector
    received: ComplexVector


@dataclass
class MeasurementLedger:
    """Append-only record of a user's pilot slots with the stacked model.

    `stacked_y` and `stacked_A` always satisfy
    y = sqrt(P/R_BS) * A @ vec(H_v) + noise for the slots recorded so far.
    Storage is preallocated to the session horizon so views are cheap.
    """

    n_bs: int
    n_ue: int
    capacity_rows: int
    slots: list = field(default_factory=list)
    _rows: int = 0

    def __post_init__(self):
        n_cols = self.n_bs * self.n_ue
        self._y = np.zeros(self.capacity_rows, dtype=np.complex128)
        self._A = np.zeros((self.capacity_rows, n_cols), dtype=np.complex128)

    def append(self, sel: BeamSelection, pilots: ComplexVector, y: ComplexVector) -> None:
        r = sel.ue_indices.size
        if y.size != r:
            raise ValueError("one received sample per UE combining beam")
        if self._rows + r > self.capacity_rows:
            raise ValueError("ledger capacity exceeded")
        block = sensing_block(sel, pilots, self.n_bs, self.n_ue)
        self._A[self._rows : self._rows + r, :] = block
        self._y[self._rows : self._rows + r] = y
        self.slots.append(SlotRecord(len(self.slots) + 1, sel, np.asarray(pilots), y))
        self._rows += r

    @property
    def num_slots(self) -> int:
        return len(self.slots)

    @property
    def stacked_y(self) -> ComplexVector:
        return self._y[: self._rows]

    @property
    def stacked_A(self) -> ComplexMatrix:
        return self._A[: self._rows]

    def beam_pair_counts(self) -> np.ndarray:
        """How often each (ue, bs) virtual-channel entry has been probed.

        Returned as an (n_ue, n_bs) integer matrix; its column-major
        flattening aligns with the sensing-matrix column order.
        """
        counts = np.zeros((self.n_ue, self.n_bs), dtype=np.int64)
        for rec in self.slots:
            counts[np.ix_(rec.selection.ue_indices, rec.selection.bs_indices)] += 1
        return counts

    def to_record(self) -> dict:
        return {
            "n_bs": self.n_bs,
            "n_ue": self.n_ue,
            "slots": [
                {
                    "slot": rec.slot,
                    "bs": [int(i) for i in rec.selection.bs_indices],
                    "ue": [int(i) for i in rec.selection.ue_indices],
                    "y_re": [float(v.real) for v in rec.received],
                    "y_im": [float(v.imag) for v in rec.received],
                }
                for rec in self.slots
            ],
        }
