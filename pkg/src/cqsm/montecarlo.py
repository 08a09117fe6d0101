"""Deterministic Monte Carlo BER estimation.

Trials (channel uses) are grouped in fixed-size blocks. Block ``b`` of SNR
point ``i`` draws everything it needs (messages, channel, noise) from its
own stream, seeded by ``SeedSequence(master_seed, spawn_key=(i, b))``.
Blocks are reduced in index order and the stopping rule is checked after
each block, so the result does not depend on how many workers evaluated
them or in which order they finished.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .channel import SnrSpec, complex_normal
from .detector import detect_batch
from .modem import SchemeConfig, antenna_indices, codebook, spectral_efficiency

DEFAULT_BLOCK = 4096
# spawn_key slot used by streams that are not tied to an SNR point
_AUX_STREAM = 2**31


@dataclass
class SimConfig:
    """One simulation campaign.

    The stopping rule per SNR point is whichever comes first of
    ``target_error_events`` bit errors or ``max_trials`` channel uses,
    checked at block boundaries. Once a point's BER falls below
    ``max_ber_floor`` (when positive) the remaining SNR points are skipped.
    Sweeps use ``snr_grid[0]`` as the fixed operating point.
    """

    scheme: SchemeConfig
    n_r: int
    snr_grid: Sequence[float]
    theta_grid: Optional[Sequence[float]] = None
    master_seed: int = 0
    max_trials: int = 1_000_000
    target_error_events: int = 200
    max_ber_floor: float = 0.0
    block_size: int = DEFAULT_BLOCK
    sigma_h_sq: float = 1.0
    energy_ref: float = 1.0

    def __post_init__(self):
        if self.n_r < 1:
            raise ValueError("n_r must be >= 1")
        if len(self.snr_grid) == 0:
            raise ValueError("snr_grid is empty")
        if self.theta_grid is not None and len(self.theta_grid) == 0:
            raise ValueError("theta_grid is empty")
        if self.max_trials < 1 or self.block_size < 1:
            raise ValueError("max_trials and block_size must be >= 1")


@dataclass(frozen=True)
class BerPoint:
    snr_db: float
    bit_errors: int
    bits_simulated: int
    trials: int = 0

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_simulated if self.bits_simulated else float("nan")

    @property
    def std_error(self) -> float:
        p = self.ber
        return math.sqrt(p * (1 - p) / self.bits_simulated) if self.bits_simulated else float("nan")


@dataclass
class SweepResult:
    thetas: list
    points: list
    theta_opt: float
    plateau: list = field(default_factory=list)

    @property
    def ber(self) -> list:
        return [p.ber for p in self.points]


def block_stream(master_seed: int, stream: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(master_seed, spawn_key=(stream, block))))


def _ber_block(scheme: SchemeConfig, n_r: int, sigma_n_sq: float, sigma_h_sq: float,
               master_seed: int, stream: int, block: int, n: int) -> tuple[int, int]:
    rng = block_stream(master_seed, stream, block)
    x = codebook(scheme)
    msgs = rng.integers(0, x.shape[0], size=n)
    h = complex_normal(rng, (n, n_r, scheme.n_t), sigma_h_sq)
    noise = complex_normal(rng, (n, n_r), 1.0)
    y = (h @ x[msgs][:, :, None])[:, :, 0] + math.sqrt(sigma_n_sq) * noise
    idx, _ = detect_batch(y, h, scheme)
    errors = int(np.bitwise_count(idx ^ msgs).sum())
    return errors, n * spectral_efficiency(scheme)


def _call(job):
    fn, args, n = job
    return fn(*args, n)


def estimate_error_rate(
    block_fn: Callable[..., tuple[int, int]],
    args: tuple,
    block_size: int,
    max_trials: int,
    target_error_events: int,
    pool: Optional[ProcessPoolExecutor] = None,
    workers: int = 1,
) -> tuple[int, int, int]:
    """Run ``block_fn(*args, block_index, n)`` over consecutive blocks until
    the stopping rule fires. Returns ``(errors, bits, trials)``.

    ``block_fn`` must be a pure function of its arguments; it returns
    ``(errors, bits)`` for ``n`` trials.
    """
    errors = bits = trials = 0
    block = 0
    while trials < max_trials and errors < target_error_events:
        wave = []
        t = trials
        for b in range(block, block + max(workers, 1)):
            n = min(block_size, max_trials - t)
            if n <= 0:
                break
            wave.append((block_fn, (*args, b), n))
            t += n
        results = list(pool.map(_call, wave)) if pool is not None else [_call(j) for j in wave]
        for (_, _, n), (e, nb) in zip(wave, results):
            errors += e
            bits += nb
            trials += n
            block += 1
            if errors >= target_error_events:
                break
    return errors, bits, trials


class _Pool:
    def __init__(self, workers: int):
        self.workers = max(int(workers), 1)
        self.pool = ProcessPoolExecutor(self.workers) if self.workers > 1 else None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        if self.pool is not None:
            self.pool.shutdown()


def _point(cfg: SimConfig, scheme: SchemeConfig, snr_db: float, stream: int, pool: _Pool) -> BerPoint:
    s2 = SnrSpec(snr_db, cfg.energy_ref).sigma_n_sq
    e, b, t = estimate_error_rate(
        _ber_block,
        (scheme, cfg.n_r, s2, cfg.sigma_h_sq, cfg.master_seed, stream),
        cfg.block_size,
        cfg.max_trials,
        cfg.target_error_events,
        pool.pool,
        pool.workers,
    )
    return BerPoint(float(snr_db), e, b, t)


def run_ber_curve(cfg: SimConfig, workers: int = 1) -> list[BerPoint]:
    out = []
    with _Pool(workers) as pool:
        for i, snr in enumerate(cfg.snr_grid):
            p = _point(cfg, cfg.scheme, snr, i, pool)
            out.append(p)
            if cfg.max_ber_floor > 0 and p.ber < cfg.max_ber_floor:
                break
    return out


def sweep_rotation(cfg: SimConfig, workers: int = 1) -> SweepResult:
    """BER against rotation angle at ``snr_grid[0]``.

    Every angle reuses the same random streams. When the trial budget rather
    than the error target ends each point, all angles see identical
    messages, channels and noise. The plateau holds every angle whose BER is
    within one combined standard error of the minimum.
    """
    if cfg.scheme.scheme != "CQSM":
        raise ValueError("rotation sweeps need a CQSM scheme")
    if not cfg.theta_grid:
        raise ValueError("sweep needs a theta grid")
    pts = []
    with _Pool(workers) as pool:
        for th in cfg.theta_grid:
            pts.append(_point(cfg, cfg.scheme.replace(theta=float(th)), cfg.snr_grid[0], 0, pool))
    bers = np.array([p.ber for p in pts])
    k = int(np.argmin(bers))
    best = pts[k]
    plateau = [
        float(th) for th, p in zip(cfg.theta_grid, pts)
        if p.ber - best.ber <= math.hypot(p.std_error, best.std_error)
    ]
    return SweepResult([float(t) for t in cfg.theta_grid], pts, float(cfg.theta_grid[k]), plateau)


def empirical_probabilities(cfg: SimConfig, trials: int) -> tuple[float, float]:
    """Fraction of uniformly random CQSM messages whose two symbols share an
    antenna, and its complement."""
    if cfg.scheme.scheme != "CQSM":
        raise ValueError("collision probabilities are defined for CQSM")
    rng = block_stream(cfg.master_seed, _AUX_STREAM, 0)
    m = spectral_efficiency(cfg.scheme)
    msgs = rng.integers(0, 1 << m, size=trials)
    a, b = antenna_indices(msgs, cfg.scheme)
    hits = int(np.count_nonzero(a == b))
    return hits / trials, (trials - hits) / trials


def snr_at_ber(points: Sequence[BerPoint], target: float) -> float:
    """SNR where the curve crosses ``target``, interpolating log10(BER)
    linearly between the first bracketing pair of points."""
    for p, q in zip(points, points[1:]):
        if p.ber >= target >= q.ber and q.ber > 0:
            lp, lq = math.log10(p.ber), math.log10(q.ber)
            if lp == lq:
                return p.snr_db
            return p.snr_db + (math.log10(target) - lp) * (q.snr_db - p.snr_db) / (lq - lp)
    raise ValueError(f"BER curve does not cross {target:g}")
