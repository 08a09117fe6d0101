"""Bit-to-transmit-vector mapping for SM, GSM, QSM and CQSM.

Every scheme maps an M-bit block (MSB first) to a sparse transmit vector.
The integer value of the bit block is also the hypothesis index used by
the detectors and the union bound, so ``codebook(cfg)[m]`` is the dense
transmit vector of message ``m``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .constellation import (
    ALPHABETS,
    DUPLICATE_TOL,
    SignalSet,
    canonical_kind,
    effective_set,
    min_distance,
    rotate_set,
)

SCHEMES = ("SM", "GSM", "QSM", "CQSM")

# per-axis Gray labels for the 16QAM square: 00 -> -3, 01 -> -1, 11 -> 1, 10 -> 3
_QAM4_LEVEL = {0: -3.0, 1: -1.0, 3: 1.0, 2: 3.0}


def _inverse_gray(g: int) -> int:
    n = 0
    while g:
        n ^= g
        g >>= 1
    return n


def bit_alphabet(kind: str) -> SignalSet:
    """Unit-power alphabet ordered by bit label: ``symbols[i]`` carries the
    ``q``-bit word with integer value ``i`` (MSB first).

    QPSK uses ``((2 b1 - 1) - j (2 b2 - 1)) / sqrt(2)``, so ``[1 1]`` is
    ``(1 - j)/sqrt(2)`` and ``[0 1]`` is ``(-1 - j)/sqrt(2)``. BPSK maps
    0 -> -1. PSK8 and QAM16 are Gray labelled.
    """
    k = canonical_kind(kind)
    q = ALPHABETS[k]
    if k == "BPSK":
        pts = [-1.0, 1.0]
    elif k == "QPSK":
        pts = [complex(2 * (i >> 1) - 1, -(2 * (i & 1) - 1)) for i in range(4)]
    elif k == "PSK8":
        pts = [np.exp(1j * _inverse_gray(i) * np.pi / 4) for i in range(8)]
    else:
        pts = [complex(_QAM4_LEVEL[i >> 2], _QAM4_LEVEL[i & 3]) for i in range(16)]
    pts = np.asarray(pts, dtype=complex) * lattice_scale(k)
    re, im = pts.real.copy(), pts.imag.copy()
    re[np.abs(re) < 1e-15] = 0.0
    im[np.abs(im) < 1e-15] = 0.0
    return SignalSet(re + 1j * im, label=k, bits_per_symbol=q, base=k)


def lattice_scale(kind: str) -> float:
    """Factor taking the integer-lattice points (e.g. ``1 - j``) to unit
    average power."""
    k = canonical_kind(kind)
    return {"BPSK": 1.0, "QPSK": 1 / math.sqrt(2), "PSK8": 1.0, "QAM16": 1 / math.sqrt(10)}[k]


@dataclass(frozen=True)
class SchemeConfig:
    scheme: str
    n_t: int
    alphabet: str = "QPSK"
    n_u: int = 1
    theta: float = math.pi / 6
    normalize_power: bool = True
    # lets the unrotated illustration (theta = 0) through validation
    allow_degenerate: bool = False

    def __post_init__(self):
        s = self.scheme.upper()
        if s not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        object.__setattr__(self, "scheme", s)
        object.__setattr__(self, "alphabet", canonical_kind(self.alphabet))
        if s == "SM":
            if self.n_t < 1 or self.n_t & (self.n_t - 1):
                raise ValueError(f"SM needs a power-of-two n_t, got {self.n_t}")
        elif s == "GSM":
            if not (1 <= self.n_u < self.n_t):
                raise ValueError(f"GSM needs 1 <= n_u < n_t, got n_u={self.n_u}, n_t={self.n_t}")
        else:
            if self.n_t < 2 or self.n_t & (self.n_t - 1):
                raise ValueError(f"{s} needs a power-of-two n_t >= 2, got {self.n_t}")
        if s == "QSM":
            a = bit_alphabet(self.alphabet).symbols
            if np.any(np.abs(a.real) < DUPLICATE_TOL) or np.any(np.abs(a.imag) < DUPLICATE_TOL):
                raise ValueError(f"QSM needs symbols with nonzero real and imaginary parts; {self.alphabet} has points on an axis")
        if s == "CQSM" and not self.allow_degenerate:
            if not (0.0 < self.theta < math.pi / 2):
                raise ValueError(f"CQSM rotation must lie in (0, pi/2), got {self.theta}")
            a = bit_alphabet(self.alphabet)
            if min_distance(effective_set(a, rotate_set(a, self.theta))) == 0.0:
                raise ValueError(
                    f"rotation {math.degrees(self.theta):.4g} deg makes the {self.alphabet} "
                    "effective set ambiguous"
                )

    @property
    def q(self) -> int:
        return ALPHABETS[self.alphabet]

    @property
    def antenna_bits(self) -> int:
        if self.scheme == "GSM":
            return int(math.floor(math.log2(math.comb(self.n_t, self.n_u))))
        return int(math.log2(self.n_t))

    @property
    def omega_a(self) -> SignalSet:
        return bit_alphabet(self.alphabet)

    @property
    def omega_b(self) -> SignalSet:
        return rotate_set(self.omega_a, self.theta)

    def replace(self, **kw) -> "SchemeConfig":
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        d.update(kw)
        return SchemeConfig(**d)


def spectral_efficiency(cfg: SchemeConfig) -> int:
    if cfg.scheme in ("SM", "GSM"):
        return cfg.q + cfg.antenna_bits
    if cfg.scheme == "QSM":
        return cfg.q + 2 * cfg.antenna_bits
    return 2 * cfg.q + 2 * cfg.antenna_bits


@dataclass(frozen=True)
class TxVector:
    """Sparse transmit vector. ``entries`` hold integer-lattice symbols (``1 - j`` style
    values) keyed by 1-based antenna; the radiated
    vector is ``entries * scale``."""

    n_t: int
    entries: tuple
    scale: float = 1.0

    def __post_init__(self):
        for ant, _ in self.entries:
            if not (1 <= ant <= self.n_t):
                raise ValueError(f"antenna {ant} outside 1..{self.n_t}")

    def dense(self, scaled: bool = True) -> np.ndarray:
        x = np.zeros(self.n_t, dtype=complex)
        for ant, sym in self.entries:
            x[ant - 1] += sym
        return x * self.scale if scaled else x

    @property
    def energy(self) -> float:
        return float(sum(abs(s) ** 2 for _, s in self.entries)) * self.scale**2


@dataclass(frozen=True)
class Hypothesis:
    """Detected (or transmitted) indices and symbols in unit-power units.

    CQSM: antennas ``(alpha, beta)``, symbols ``(s_a, s_b)`` with ``s_b`` in
    the rotated set. QSM: antennas ``(l_re, l_im)``, symbols ``(s,)``.
    SM: ``(k,)``, ``(s,)``. GSM: the active combination, ``(s,)``.
    Antennas are 1-based.
    """

    antennas: tuple
    symbols: tuple
    index: Optional[int] = field(default=None, compare=False)


def bits_to_int(bits: Sequence[int]) -> int:
    v = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"bits must be 0/1, got {b!r}")
        v = (v << 1) | int(b)
    return v


def int_to_bits(v: int, m: int) -> list[int]:
    return [(v >> (m - 1 - i)) & 1 for i in range(m)]


def _check_bits(bits: Sequence[int], cfg: SchemeConfig, scheme: str) -> int:
    if cfg.scheme != scheme:
        raise ValueError(f"config is for {cfg.scheme}, not {scheme}")
    m = spectral_efficiency(cfg)
    if len(bits) != m:
        raise ValueError(f"{scheme} with this config carries {m} bits per channel use, got {len(bits)}")
    return bits_to_int(bits)


def _split(v: int, widths: Sequence[int]) -> list[int]:
    out = []
    shift = sum(widths)
    for w in widths:
        shift -= w
        out.append((v >> shift) & ((1 << w) - 1))
    return out


def _lattice(cfg: SchemeConfig) -> np.ndarray:
    return cfg.omega_a.symbols / lattice_scale(cfg.alphabet)


def _collect(n_t: int, pairs) -> tuple:
    acc: dict[int, complex] = {}
    for ant, sym in pairs:
        acc[ant] = acc.get(ant, 0j) + complex(sym)
    return tuple(sorted(acc.items()))


def gsm_combinations(n_t: int, n_u: int) -> list[tuple]:
    """Lexicographic antenna combinations (1-based), truncated to a power
    of two."""
    combos = list(itertools.combinations(range(1, n_t + 1), n_u))
    usable = 1 << int(math.floor(math.log2(len(combos))))
    return combos[:usable]


def sm_modulate(bits: Sequence[int], cfg: SchemeConfig) -> TxVector:
    v = _check_bits(bits, cfg, "SM")
    si, k = _split(v, [cfg.q, cfg.antenna_bits])
    sym = _lattice(cfg)[si]
    return TxVector(cfg.n_t, ((k + 1, complex(sym)),), lattice_scale(cfg.alphabet))


def gsm_modulate(bits: Sequence[int], cfg: SchemeConfig) -> TxVector:
    v = _check_bits(bits, cfg, "GSM")
    si, ci = _split(v, [cfg.q, cfg.antenna_bits])
    sym = complex(_lattice(cfg)[si])
    combo = gsm_combinations(cfg.n_t, cfg.n_u)[ci]
    scale = lattice_scale(cfg.alphabet) / math.sqrt(cfg.n_u)
    return TxVector(cfg.n_t, tuple((a, sym) for a in combo), scale)


def qsm_modulate(bits: Sequence[int], cfg: SchemeConfig) -> TxVector:
    v = _check_bits(bits, cfg, "QSM")
    si, l_re, l_im = _split(v, [cfg.q, cfg.antenna_bits, cfg.antenna_bits])
    s = _lattice(cfg)[si]
    entries = _collect(cfg.n_t, [(l_re + 1, s.real), (l_im + 1, 1j * s.imag)])
    return TxVector(cfg.n_t, entries, lattice_scale(cfg.alphabet))


def qsm_components(bits: Sequence[int], cfg: SchemeConfig) -> tuple[np.ndarray, np.ndarray]:
    """The real-part and imaginary-part vectors before they are combined."""
    v = _check_bits(bits, cfg, "QSM")
    si, l_re, l_im = _split(v, [cfg.q, cfg.antenna_bits, cfg.antenna_bits])
    s = _lattice(cfg)[si]
    s_re = np.zeros(cfg.n_t)
    s_im = np.zeros(cfg.n_t)
    s_re[l_re] = s.real
    s_im[l_im] = s.imag
    return s_re, s_im


def cqsm_modulate(bits: Sequence[int], cfg: SchemeConfig) -> TxVector:
    v = _check_bits(bits, cfg, "CQSM")
    ia, ib, alpha, beta = _split(v, [cfg.q, cfg.q, cfg.antenna_bits, cfg.antenna_bits])
    lat = _lattice(cfg)
    s_a = lat[ia]
    s_b = lat[ib] * np.exp(1j * cfg.theta)
    entries = _collect(cfg.n_t, [(alpha + 1, s_a), (beta + 1, s_b)])
    scale = lattice_scale(cfg.alphabet)
    if cfg.normalize_power:
        scale /= math.sqrt(2.0)
    return TxVector(cfg.n_t, entries, scale)


_MODULATORS = {"SM": sm_modulate, "GSM": gsm_modulate, "QSM": qsm_modulate, "CQSM": cqsm_modulate}


def modulate(bits: Sequence[int], cfg: SchemeConfig) -> TxVector:
    return _MODULATORS[cfg.scheme](bits, cfg)


def hypothesis(index: int, cfg: SchemeConfig) -> Hypothesis:
    """Antenna indices and unit-power symbols carried by message ``index``."""
    a = cfg.omega_a.symbols
    nb = cfg.antenna_bits
    if cfg.scheme == "CQSM":
        ia, ib, al, be = _split(index, [cfg.q, cfg.q, nb, nb])
        return Hypothesis((al + 1, be + 1), (complex(a[ia]), complex(cfg.omega_b.symbols[ib])), index)
    if cfg.scheme == "QSM":
        si, lr, li = _split(index, [cfg.q, nb, nb])
        return Hypothesis((lr + 1, li + 1), (complex(a[si]),), index)
    si, k = _split(index, [cfg.q, nb])
    if cfg.scheme == "SM":
        return Hypothesis((k + 1,), (complex(a[si]),), index)
    return Hypothesis(gsm_combinations(cfg.n_t, cfg.n_u)[k], (complex(a[si]),), index)


def _symbol_index(sym: complex, symbols: np.ndarray, what: str) -> int:
    d = np.abs(symbols - sym)
    i = int(np.argmin(d))
    if d[i] > 1e-9:
        raise ValueError(f"{what} {sym!r} is not a member of the configured set")
    return i


def demap(hyp: Hypothesis, cfg: SchemeConfig) -> list[int]:
    """Bits carried by a hypothesis; exact inverse of :func:`modulate`."""
    nb = cfg.antenna_bits
    m = spectral_efficiency(cfg)
    for ant in hyp.antennas:
        if not (1 <= ant <= cfg.n_t):
            raise ValueError(f"antenna {ant} outside 1..{cfg.n_t}")
    a = cfg.omega_a.symbols
    if cfg.scheme == "CQSM":
        alpha, beta = hyp.antennas
        s_a, s_b = hyp.symbols
        ia = _symbol_index(s_a, a, "symbol")
        ib = _symbol_index(s_b, cfg.omega_b.symbols, "rotated symbol")
        v = (((ia << cfg.q) | ib) << 2 * nb) | ((alpha - 1) << nb) | (beta - 1)
    elif cfg.scheme == "QSM":
        lr, li = hyp.antennas
        si = _symbol_index(hyp.symbols[0], a, "symbol")
        v = (si << 2 * nb) | ((lr - 1) << nb) | (li - 1)
    elif cfg.scheme == "SM":
        (k,) = hyp.antennas
        si = _symbol_index(hyp.symbols[0], a, "symbol")
        v = (si << nb) | (k - 1)
    else:
        combos = gsm_combinations(cfg.n_t, cfg.n_u)
        combo = tuple(sorted(hyp.antennas))
        if combo not in combos:
            raise ValueError(f"antenna combination {combo} is not in the GSM codebook")
        si = _symbol_index(hyp.symbols[0], a, "symbol")
        v = (si << nb) | combos.index(combo)
    return int_to_bits(v, m)


def codebook(cfg: SchemeConfig) -> np.ndarray:
    """Dense radiated vectors for every message, shape ``(2^M, n_t)``; row
    ``m`` is ``modulate(int_to_bits(m, M)).dense()``."""
    return _codebook_cached(cfg).copy()


@lru_cache(maxsize=64)
def _codebook_cached(cfg: SchemeConfig) -> np.ndarray:
    m = spectral_efficiency(cfg)
    out = np.empty((1 << m, cfg.n_t), dtype=complex)
    for v in range(1 << m):
        out[v] = modulate(int_to_bits(v, m), cfg).dense()
    out.flags.writeable = False
    return out


def antenna_indices(messages: np.ndarray, cfg: SchemeConfig) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised 1-based ``(alpha, beta)`` of CQSM/QSM messages."""
    if cfg.scheme not in ("CQSM", "QSM"):
        raise ValueError("antenna pairs exist only for CQSM and QSM")
    nb = cfg.antenna_bits
    mask = (1 << nb) - 1
    messages = np.asarray(messages)
    return ((messages >> nb) & mask) + 1, (messages & mask) + 1
