"""Beam codebooks for half-wavelength uniform linear arrays.

A codebook for an N-antenna array has N columns; column n (0-based) is the
array response steered at arccos(-1 + 2n/N), so the columns form a unitary
matrix whose entries all lie on the circle of radius 1/sqrt(N) with phases
drawn from the N-point quantized set {pi*(-1 + 2n/N)}.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .numerics import ComplexMatrix, ComplexVector


def steering_vector(angle: float, n_antennas: int) -> ComplexVector:
    """Array response of a half-wavelength ULA at the given physical angle.

    Entry k is exp(j*pi*k*cos(angle))/sqrt(N), k = 0..N-1.
    """
    if n_antennas < 1:
        raise ValueError("need at least one antenna")
    k = np.arange(n_antennas)
    return np.exp(1j * np.pi * k * np.cos(angle)) / np.sqrt(n_antennas)


@dataclass(frozen=True)
class Codebook:
    """Unitary beam codebook: matrix columns are steered array responses."""

    n_antennas: int
    matrix: ComplexMatrix  # (n_antennas, n_antennas)
    angles: np.ndarray     # physical steering angle per column

    def column(self, n: int) -> ComplexVector:
        return self.matrix[:, n]


def build_codebook(n_antennas: int) -> Codebook:
    """Codebook whose n-th column is steered at arccos(-1 + 2n/N)."""
    if n_antennas < 1:
        raise ValueError("need at least one antenna")
    n = np.arange(n_antennas)
    angles = np.arccos(-1.0 + 2.0 * n / n_antennas)
    cols = [steering_vector(a, n_antennas) for a in angles]
    return Codebook(n_antennas=n_antennas, matrix=np.stack(cols, axis=1), angles=angles)


def codebook_to_csv(cb: Codebook, path: str) -> None:
    """Debug dump: one row per (column, antenna) with real/imag parts."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["column", "antenna", "re", "im"])
        for n in range(cb.n_antennas):
            for k in range(cb.n_antennas):
                v = cb.matrix[k, n]
                w.writerow([n, k, repr(float(v.real)), repr(float(v.imag))])
