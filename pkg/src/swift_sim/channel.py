"""Sparse geometric mmWave channel realizations.

A channel is a random rank-<=L sum of outer products of receive/transmit
array responses; L is Poisson, per-path gains are circular complex Gaussians
with variance sigma_R, and angles are uniform (either continuous, or drawn
from the codebook grid for on-grid studies).  The virtual (beamspace)
channel is the unitary projection onto the codebook bases.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codebook import Codebook, steering_vector
from .numerics import ComplexMatrix, RngStream, complex_gaussian, poisson_sample


@dataclass
class PathSet:
    """Geometry and gains of the propagation paths of one realization."""

    num_paths: int
    aod: np.ndarray    # departure angles, radians
    aoa: np.ndarray    # arrival angles, radians
    gains: np.ndarray  # complex per-path gains

    def to_record(self) -> dict:
        return {
            "num_paths": int(self.num_paths),
            "aod": [float(a) for a in self.aod],
            "aoa": [float(a) for a in self.aoa],
            "gains_re": [float(g.real) for g in self.gains],
            "gains_im": [float(g.imag) for g in self.gains],
        }

    @staticmethod
    def from_record(rec: dict) -> "PathSet":
        gains = np.asarray(rec["gains_re"], dtype=np.float64) + 1j * np.asarray(
            rec["gains_im"], dtype=np.float64
        )
        return PathSet(
            num_paths=int(rec["num_paths"]),
            aod=np.asarray(rec["aod"], dtype=np.float64),
            aoa=np.asarray(rec["aoa"], dtype=np.float64),
            gains=gains,
        )


def draw_paths(
    expected_paths: float,
    sigma_r: float,
    n_bs: int,
    n_ue: int,
    rng: RngStream,
    on_grid: bool = False,
) -> PathSet:
    """Draw L ~ Poisson(expected_paths) paths with CN(0, sigma_r) gains.

    Off-grid angles are uniform on [0, 2*pi); on-grid angles are uniform
    over the codebook steering angles (so each path lands exactly on one
    virtual-channel entry).
    """
    L = poisson_sample(expected_paths, rng)
    if on_grid:
        bs_idx = rng.integers(0, n_bs, size=L)
        ue_idx = rng.integers(0, n_ue, size=L)
        aod = np.arccos(-1.0 + 2.0 * bs_idx / n_bs)
        aoa = np.arccos(-1.0 + 2.0 * ue_idx / n_ue)
    else:
        aod = rng.random(L) * 2.0 * np.pi
        aoa = rng.random(L) * 2.0 * np.pi
    gains = complex_gaussian(0.0, sigma_r, rng, size=L)
    return PathSet(num_paths=L, aod=aod, aoa=aoa, gains=gains)


def assemble_channel(paths: PathSet, n_bs: int, n_ue: int) -> ComplexMatrix:
    """Antenna-domain channel: sqrt(N_BS*N_UE) * sum_l g_l a_ue(aoa) a_bs(aod)^H."""
    H = np.zeros((n_ue, n_bs), dtype=np.complex128)
    for l in range(paths.num_paths):
        a_ue = steering_vector(paths.aoa[l], n_ue)
        a_bs = steering_vector(paths.aod[l], n_bs)
        H += paths.gains[l] * np.outer(a_ue, a_bs.conj())
    return np.sqrt(n_bs * n_ue) * H


def virtual_channel(H: ComplexMatrix, f_bs: Codebook, w_ue: Codebook) -> ComplexMatrix:
    """Beamspace image W^H H F of the antenna-domain channel."""
    return w_ue.matrix.conj().T @ H @ f_bs.matrix


@dataclass
class ChannelRealization:
    """One user's channel: paths plus cached antenna/beamspace matrices."""

    paths: PathSet
    H: ComplexMatrix
    H_v: ComplexMatrix
    sigma_r: float


def draw_channel(
    expected_paths: float,
    sigma_r: float,
    f_bs: Codebook,
    w_ue: Codebook,
    rng: RngStream,
    on_grid: bool = False,
) -> ChannelRealization:
    paths = draw_paths(expected_paths, sigma_r, f_bs.n_antennas, w_ue.n_antennas, rng, on_grid)
    H = assemble_channel(paths, f_bs.n_antennas, w_ue.n_antennas)
    return ChannelRealization(
        paths=paths, H=H, H_v=virtual_channel(H, f_bs, w_ue), sigma_r=sigma_r
    )


def rescale_gains(paths: PathSet, sigma_r_old: float, sigma_r_new: float) -> PathSet:
    """Reuse a realization's geometry and unit-law gains at a new gain variance.

    Keeping angles and the normalized gains fixed while moving sigma_r gives
    paired (common-random-number) channels across SNR sweep points.
    """
    scale = np.sqrt(sigma_r_new / sigma_r_old)
    return PathSet(paths.num_paths, paths.aod.copy(), paths.aoa.copy(), paths.gains * scale)


@dataclass(frozen=True)
class CellUser:
    """A user placed in the cell: distance-dependent average path power."""

    user_id: int
    distance: float
    sigma_r: float


def draw_cell_user(
    user_id: int, cell_radius: float, pathloss_exp: float, rng: RngStream, d_min: float = 10.0
) -> CellUser:
    """Place a user uniformly in distance on [d_min, cell_radius]; sigma_R = d^-beta."""
    d = d_min + rng.random() * (cell_radius - d_min)
    return CellUser(user_id=user_id, distance=d, sigma_r=d ** (-pathloss_exp))
