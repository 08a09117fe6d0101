"""Rayleigh fading channel draws, AWGN and the received-signal model."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .modem import TxVector


@dataclass(frozen=True)
class SnrSpec:
    """SNR in dB relative to ``energy_ref``.

    ``energy_ref`` defaults to the unit average symbol energy, so the noise
    variance is ``10^(-snr_db/10)``. With power normalisation on every scheme
    radiates unit mean energy per channel use and the two readings coincide.
    ``snr_db = inf`` gives a noiseless link.
    """

    snr_db: float
    energy_ref: float = 1.0

    @property
    def sigma_n_sq(self) -> float:
        if math.isinf(self.snr_db) and self.snr_db > 0:
            return 0.0
        return self.energy_ref / 10.0 ** (self.snr_db / 10.0)


def complex_normal(rng: np.random.Generator, shape, var: float = 1.0) -> np.ndarray:
    """Circularly symmetric complex Gaussian, ``var`` total (``var/2`` per
    component). Real parts are drawn before imaginary parts."""
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return math.sqrt(var / 2.0) * (re + 1j * im)


def sample_channel(n_r: int, n_t: int, sigma_h_sq: float = 1.0, rng: np.random.Generator | None = None) -> np.ndarray:
    """One ``n_r x n_t`` channel matrix with i.i.d. CN(0, sigma_h_sq) entries."""
    if n_r < 1 or n_t < 1:
        raise ValueError("channel dimensions must be >= 1")
    if sigma_h_sq <= 0:
        raise ValueError("channel variance must be positive")
    rng = rng if rng is not None else np.random.default_rng()
    return complex_normal(rng, (n_r, n_t), sigma_h_sq)


def transmit(h: np.ndarray, s: TxVector, snr: SnrSpec, rng: np.random.Generator | None = None) -> np.ndarray:
    """``y = sum_k h[:, k] s_k + n`` over the active antennas only."""
    n_r, n_t = h.shape
    if s.n_t != n_t:
        raise ValueError(f"transmit vector has {s.n_t} antennas, channel has {n_t}")
    y = np.zeros(n_r, dtype=complex)
    for ant, sym in s.entries:
        if not (1 <= ant <= n_t):
            raise ValueError(f"antenna {ant} outside 1..{n_t}")
        y += h[:, ant - 1] * (sym * s.scale)
    var = snr.sigma_n_sq
    if var > 0:
        rng = rng if rng is not None else np.random.default_rng()
        y += complex_normal(rng, n_r, var)
    return y
