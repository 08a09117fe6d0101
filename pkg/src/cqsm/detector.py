"""Exhaustive maximum-likelihood detection.

Hypotheses are enumerated in message order (hypothesis ``k`` is the
transmit vector of bit block ``k``), so ties resolve to the lowest bit
block. Three routes compute the same argmin:

* ``reference`` evaluates ``||g||^2 - 2 Re{y^H g}`` hypothesis by
  hypothesis with counted real arithmetic;
* ``direct`` evaluates ``||y - g||^2`` (no counters);
* :func:`detect_batch` is the vectorised route used by the simulator.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .modem import (
    Hypothesis,
    SchemeConfig,
    codebook,
    demap,
    hypothesis,
    int_to_bits,
    modulate,
    spectral_efficiency,
)


@dataclass(frozen=True)
class ComplexityReport:
    real_multiplications: int
    real_additions: int


def complexity_count(n_r: int, m: int) -> ComplexityReport:
    """Real operations of the expanded ML metric over ``2^m`` hypotheses."""
    if n_r < 1 or m < 1:
        raise ValueError("n_r and m must be >= 1")
    return ComplexityReport((4 * n_r + 1) * 2**m, (4 * n_r - 1) * 2**m)


@dataclass(frozen=True)
class DetectionResult:
    index: int
    hypothesis: Hypothesis
    metric: float
    bits: list
    ops: Optional[ComplexityReport] = None
    # cost of forming g = sum h_k x_k, outside the expanded-metric count
    formation_ops: Optional[ComplexityReport] = None

    @property
    def alpha(self) -> int:
        return self.hypothesis.antennas[0]

    @property
    def beta(self) -> Optional[int]:
        a = self.hypothesis.antennas
        return a[1] if len(a) > 1 else None

    @property
    def symbols(self) -> tuple:
        return self.hypothesis.symbols

    @property
    def total_ops(self) -> Optional[ComplexityReport]:
        if self.ops is None:
            return None
        return ComplexityReport(
            self.ops.real_multiplications + self.formation_ops.real_multiplications,
            self.ops.real_additions + self.formation_ops.real_additions,
        )


class _Counter:
    def __init__(self):
        self.mul = 0
        self.add = 0

    def dot(self, u: np.ndarray, v: np.ndarray) -> float:
        self.mul += u.size
        self.add += u.size - 1
        return float(np.dot(u, v))

    def scale(self, c: float, u: np.ndarray) -> np.ndarray:
        self.mul += u.size
        return c * u

    def sub(self, a: float, b: float) -> float:
        self.add += 1
        return a - b


def _check_dims(y: np.ndarray, h: np.ndarray, cfg: SchemeConfig) -> None:
    if h.ndim != 2 or h.shape[1] != cfg.n_t:
        raise ValueError(f"channel must be n_r x {cfg.n_t}, got shape {h.shape}")
    if y.shape != (h.shape[0],):
        raise ValueError(f"received vector must have length {h.shape[0]}, got shape {y.shape}")


@lru_cache(maxsize=64)
def _terms(cfg: SchemeConfig) -> tuple:
    """Per hypothesis, the radiated (antenna index, coefficient) pairs."""
    m = spectral_efficiency(cfg)
    out = []
    for k in range(1 << m):
        tx = modulate(int_to_bits(k, m), cfg)
        out.append(tuple((ant - 1, complex(sym * tx.scale)) for ant, sym in tx.entries))
    return tuple(out)


def _realify(z: np.ndarray) -> np.ndarray:
    return np.concatenate([z.real, z.imag])


def _detect_reference(y: np.ndarray, h: np.ndarray, cfg: SchemeConfig) -> DetectionResult:
    n_r = h.shape[0]
    formation = _Counter()
    table = _Counter()
    y_r = _realify(y)
    best_k, best = -1, np.inf
    for k, terms in enumerate(_terms(cfg)):
        g_re = np.zeros(n_r)
        g_im = np.zeros(n_r)
        for j, (col, c) in enumerate(terms):
            hr, hi = h[:, col].real, h[:, col].imag
            # (hr + j hi)(cr + j ci): 4 n_r mults, 2 n_r adds
            tr = formation.scale(c.real, hr) - formation.scale(c.imag, hi)
            ti = formation.scale(c.imag, hr) + formation.scale(c.real, hi)
            formation.add += 2 * n_r
            if j:
                formation.add += 2 * n_r
            g_re = g_re + tr
            g_im = g_im + ti
        g = np.concatenate([g_re, g_im])
        energy = table.dot(g, g)                    # 2 n_r mul, 2 n_r - 1 add
        corr = 2.0 * table.dot(y_r, g)              # 2 n_r + 1 mul, 2 n_r - 1 add
        table.mul += 1
        metric = table.sub(energy, corr)            # 1 add
        if metric < best:
            best_k, best = k, metric
    hyp = hypothesis(best_k, cfg)
    return DetectionResult(
        best_k,
        hyp,
        best,
        demap(hyp, cfg),
        ComplexityReport(table.mul, table.add),
        ComplexityReport(formation.mul, formation.add),
    )


def _detect_direct(y: np.ndarray, h: np.ndarray, cfg: SchemeConfig) -> DetectionResult:
    best_k, best = -1, np.inf
    for k, x in enumerate(codebook(cfg)):
        r = y - h @ x
        metric = float(np.vdot(r, r).real)
        if metric < best:
            best_k, best = k, metric
    hyp = hypothesis(best_k, cfg)
    return DetectionResult(best_k, hyp, best, demap(hyp, cfg))


def _detect_fast(y: np.ndarray, h: np.ndarray, cfg: SchemeConfig) -> DetectionResult:
    idx, met = detect_batch(y[None, :], h[None, :, :], cfg)
    k = int(idx[0])
    hyp = hypothesis(k, cfg)
    return DetectionResult(k, hyp, float(met[0]), demap(hyp, cfg))


_PATHS = {"reference": _detect_reference, "direct": _detect_direct, "fast": _detect_fast}


def ml_detect(y: np.ndarray, h: np.ndarray, cfg: SchemeConfig, path: str = "reference") -> DetectionResult:
    y = np.asarray(y, dtype=complex)
    h = np.asarray(h, dtype=complex)
    _check_dims(y, h, cfg)
    try:
        fn = _PATHS[path]
    except KeyError:
        raise ValueError(f"unknown detection path {path!r}") from None
    return fn(y, h, cfg)


def ml_detect_cqsm(y, h, cfg: SchemeConfig, path: str = "reference") -> DetectionResult:
    if cfg.scheme != "CQSM":
        raise ValueError(f"expected a CQSM config, got {cfg.scheme}")
    return ml_detect(y, h, cfg, path)


def ml_detect_qsm(y, h, cfg: SchemeConfig, path: str = "reference") -> DetectionResult:
    if cfg.scheme != "QSM":
        raise ValueError(f"expected a QSM config, got {cfg.scheme}")
    return ml_detect(y, h, cfg, path)


def ml_detect_generic(y, h, cfg: SchemeConfig, path: str = "reference") -> DetectionResult:
    if cfg.scheme not in ("SM", "GSM"):
        raise ValueError(f"expected an SM or GSM config, got {cfg.scheme}")
    return ml_detect(y, h, cfg, path)


# --- vectorised route -------------------------------------------------------
#
# ||y - Hx||^2 - ||y||^2 = x^H A x - 2 Re{z^H x} with A = H^H H, z = H^H y.
# Splitting A and z into real features turns the metric of every hypothesis
# into one real matrix product whose width does not depend on n_r.


@lru_cache(maxsize=64)
def _codebook_features(cfg: SchemeConfig) -> np.ndarray:
    x = codebook(cfg)
    n_t = cfg.n_t
    iu, ju = np.triu_indices(n_t, k=1)
    cross = np.conj(x[:, iu]) * x[:, ju]
    feats = np.concatenate(
        [np.abs(x) ** 2, 2 * cross.real, -2 * cross.imag, -2 * x.real, -2 * x.imag], axis=1
    )
    return np.ascontiguousarray(feats.T)


def _trial_features(y: np.ndarray, h: np.ndarray) -> np.ndarray:
    n_t = h.shape[2]
    hh = np.conj(np.swapaxes(h, 1, 2))
    a = hh @ h
    z = (hh @ y[:, :, None])[:, :, 0]
    iu, ju = np.triu_indices(n_t, k=1)
    diag = np.einsum("bii->bi", a).real
    off = a[:, iu, ju]
    return np.concatenate([diag, off.real, off.imag, z.real, z.imag], axis=1)


def detect_batch(y: np.ndarray, h: np.ndarray, cfg: SchemeConfig) -> tuple[np.ndarray, np.ndarray]:
    """ML decisions for a batch: ``y`` is ``(B, n_r)``, ``h`` is
    ``(B, n_r, n_t)``. Returns hypothesis indices and the metric
    ``||y - Hx||^2 - ||y||^2`` at the decision."""
    if h.ndim != 3 or h.shape[2] != cfg.n_t or y.shape != h.shape[:2]:
        raise ValueError(f"batch shapes do not match: y {y.shape}, h {h.shape}, n_t {cfg.n_t}")
    met = _trial_features(y, h) @ _codebook_features(cfg)
    idx = np.argmin(met, axis=1)
    return idx, met[np.arange(idx.size), idx]
