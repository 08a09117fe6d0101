"""Pairwise error probabilities and the union bound on the bit error rate
of CQSM over i.i.d. Rayleigh fading with ``n_r`` receive antennas."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
from scipy.special import erfc

from .channel import SnrSpec
from .modem import SchemeConfig, codebook, hypothesis, spectral_efficiency

ABEP_MAX_BITS = 16


def q_function(x):
    """Gaussian tail probability ``Q(x) = erfc(x / sqrt 2) / 2``."""
    out = 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))
    return float(out) if np.ndim(x) == 0 else out


@dataclass(frozen=True)
class HypothesisPair:
    """Transmitted ``(alpha, beta, x_a, x_b)`` against the detected
    ``(alpha_hat, beta_hat, x_a_hat, x_b_hat)``. Antennas 1-based; symbols
    as radiated (including any power scaling)."""

    alpha: int
    beta: int
    alpha_hat: int
    beta_hat: int
    x_a: complex
    x_b: complex
    x_a_hat: complex
    x_b_hat: complex

    def swapped(self) -> "HypothesisPair":
        return HypothesisPair(
            self.alpha_hat, self.beta_hat, self.alpha, self.beta,
            self.x_a_hat, self.x_b_hat, self.x_a, self.x_b,
        )

    @property
    def cross_coincident(self) -> bool:
        """True for the one pattern the twelve-row table does not model: all
        four listed equalities fail, yet ``alpha = beta_hat`` or ``beta =
        alpha_hat`` (two columns shared across the tuples)."""
        a, b, ah, bh = self.alpha, self.beta, self.alpha_hat, self.beta_hat
        if a == b or ah == bh or a == ah or b == bh:
            return False
        return a == bh or b == ah


def zeta_row(p: HypothesisPair) -> int:
    """Row (1..12) of the closed-form table selected by the antenna-index
    equalities ``alpha = beta``, ``alpha_hat = beta_hat``, ``alpha =
    alpha_hat``, ``beta = beta_hat``."""
    key = (p.alpha == p.beta, p.alpha_hat == p.beta_hat, p.alpha == p.alpha_hat, p.beta == p.beta_hat)
    rows = {
        (False, False, False, False): 1,
        (False, False, True, False): 2,
        (False, False, False, True): 3,
        (False, False, True, True): 4,
        (True, False, False, False): 5,
        (True, False, True, False): 6,
        (True, False, False, True): 7,
        (False, True, False, False): 8,
        (False, True, True, False): 9,
        (False, True, False, True): 10,
        (True, True, False, False): 11,
        (True, True, True, True): 12,
    }
    try:
        return rows[key]
    except KeyError:
        raise ValueError(f"inconsistent antenna equalities {key}") from None


def expected_zeta_table(p: HypothesisPair, sigma_h_sq: float, sigma_n_sq: float) -> float:
    """Mean per-receive-antenna ``zeta`` from the twelve-row closed form.

    Exact whenever :attr:`HypothesisPair.cross_coincident` is false; use
    :func:`expected_zeta` for arbitrary pairs.
    """
    xa, xb, ya, yb = p.x_a, p.x_b, p.x_a_hat, p.x_b_hat
    row = zeta_row(p)
    sq = lambda z: abs(z) ** 2  # noqa: E731
    body = {
        1: sq(xa) + sq(xb) + sq(ya) + sq(yb),
        2: sq(xa - ya) + sq(xb) + sq(yb),
        3: sq(xb - yb) + sq(xa) + sq(ya),
        4: sq(xa - ya) + sq(xb - yb),
        5: sq(xa + xb) + sq(ya) + sq(yb),
        6: sq(xa + xb - ya) + sq(yb),
        7: sq(xa + xb - yb) + sq(ya),
        8: sq(ya + yb) + sq(xa) + sq(xb),
        9: sq(xa - ya - yb) + sq(xb),
        10: sq(xb - ya - yb) + sq(xa),
        11: sq(xa + xb) + sq(ya + yb),
        12: sq(xa + xb - ya - yb),
    }[row]
    return sigma_h_sq / (2.0 * sigma_n_sq) * body


def expected_zeta(p: HypothesisPair, sigma_h_sq: float, sigma_n_sq: float) -> float:
    """Mean of ``zeta = ||g - g_hat||^2 / (2 sigma_n^2)`` per receive
    antenna, for any antenna pattern.

    ``g - g_hat`` collapses onto the distinct antennas; each receive branch is
    then CN(0, sigma_h^2 * sum_k |d_k|^2). Agrees with
    :func:`expected_zeta_table` wherever the table applies.
    """
    d: dict[int, complex] = {}
    for ant, c in ((p.alpha, p.x_a), (p.beta, p.x_b), (p.alpha_hat, -p.x_a_hat), (p.beta_hat, -p.x_b_hat)):
        d[ant] = d.get(ant, 0j) + c
    return sigma_h_sq / (2.0 * sigma_n_sq) * sum(abs(v) ** 2 for v in d.values())


def _log_comb(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def average_pep(zeta_bar, n_r: int):
    """Average of ``Q(sqrt(zeta))`` over Rayleigh fading with ``n_r``
    branches of mean ``zeta_bar`` each. Accepts scalars or arrays."""
    if n_r < 1:
        raise ValueError("n_r must be >= 1")
    zb = np.asarray(zeta_bar, dtype=float)
    if np.any(zb < 0):
        raise ValueError("zeta_bar must be non-negative")
    half = zb / 2.0
    with np.errstate(invalid="ignore"):
        mu = np.where(np.isinf(half), 1.0, np.sqrt(half / (1.0 + half)))
    gamma = 0.5 * (1.0 - mu)
    # 1 - gamma = (1 + mu)/2, computed this way to avoid cancellation
    one_minus = 0.5 * (1.0 + mu)
    total = np.zeros_like(zb)
    if n_r <= 64:
        for k in range(n_r):
            total = total + math.comb(n_r - 1 + k, k) * one_minus**k
        with np.errstate(under="ignore"):
            out = gamma**n_r * total
    else:
        with np.errstate(divide="ignore", under="ignore"):
            lg = np.log(gamma)
            l1 = np.log(one_minus)
            for k in range(n_r):
                total = total + np.exp(n_r * lg + _log_comb(n_r - 1 + k, k) + k * l1)
        out = total
    return float(out) if np.ndim(zeta_bar) == 0 else out


def pairs_for(cfg: SchemeConfig, i: int, k: int) -> HypothesisPair:
    """Pair between CQSM messages ``i`` (sent) and ``k`` (decided), symbols
    scaled as radiated."""
    if cfg.scheme != "CQSM":
        raise ValueError("hypothesis pairs are defined for CQSM")
    sc = 1 / math.sqrt(2.0) if cfg.normalize_power else 1.0
    hi, hk = hypothesis(i, cfg), hypothesis(k, cfg)
    return HypothesisPair(
        hi.antennas[0], hi.antennas[1], hk.antennas[0], hk.antennas[1],
        hi.symbols[0] * sc, hi.symbols[1] * sc, hk.symbols[0] * sc, hk.symbols[1] * sc,
    )


def _check_abep_size(cfg: SchemeConfig) -> int:
    m = spectral_efficiency(cfg)
    if m > ABEP_MAX_BITS:
        raise ValueError(
            f"union bound over 2^{m} hypotheses needs {4**m:.3g} pair evaluations; "
            f"limit is M <= {ABEP_MAX_BITS}"
        )
    return m


def abep_bound(cfg: SchemeConfig, snr: SnrSpec, n_r: int, sigma_h_sq: float = 1.0) -> float:
    """Union bound on the bit error probability: Hamming-weighted average
    PEPs over all ordered message pairs, divided by ``M 2^M``.

    Uses the radiated codebook, so it shares the simulator's power
    convention. Cost ``O(4^M)``.
    """
    m = _check_abep_size(cfg)
    x = codebook(cfg)
    n = x.shape[0]
    s2 = snr.sigma_n_sq
    ids = np.arange(n)
    total = 0.0
    for i in range(n):
        dist = np.sum(np.abs(x[i] - x) ** 2, axis=1)
        with np.errstate(divide="ignore"):
            zb = sigma_h_sq * dist / (2.0 * s2) if s2 > 0 else np.where(dist > 0, np.inf, 0.0)
        pep = average_pep(zb, n_r)
        pep[i] = 0.0
        e = np.bitwise_count(ids ^ i)
        total += float(np.dot(pep, e))
    return total / (n * m)


def abep_bound_pairs(cfg: SchemeConfig, snr: SnrSpec, n_r: int, sigma_h_sq: float = 1.0) -> float:
    """Same bound assembled pair by pair from :func:`expected_zeta`
    (CQSM only, slow; kept as a cross-check)."""
    m = _check_abep_size(cfg)
    n = 1 << m
    total = 0.0
    for i in range(n):
        for k in range(n):
            if k == i:
                continue
            zb = expected_zeta(pairs_for(cfg, i, k), sigma_h_sq, snr.sigma_n_sq)
            total += average_pep(zb, n_r) * bin(i ^ k).count("1")
    return total / (n * m)


def abep_curve(cfg: SchemeConfig, snr_grid: Iterable[float], n_r: int, sigma_h_sq: float = 1.0,
               energy_ref: Optional[float] = None) -> list[tuple[float, float]]:
    ref = 1.0 if energy_ref is None else energy_ref
    return [(float(s), abep_bound(cfg, SnrSpec(s, ref), n_r, sigma_h_sq)) for s in snr_grid]
