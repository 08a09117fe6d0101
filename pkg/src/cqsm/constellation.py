"""Signal constellations: source alphabets, rotation, Minkowski sums and
the rotation-angle search that maximises the minimum distance of the
effective received-symbol set."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

ALPHABETS = {"BPSK": 1, "QPSK": 2, "PSK8": 3, "QAM16": 4}
_ALIASES = {"8PSK": "PSK8", "16QAM": "QAM16"}

# two symbols closer than this are treated as the same point
DUPLICATE_TOL = 1e-9


def canonical_kind(kind: str) -> str:
    k = kind.upper()
    k = _ALIASES.get(k, k)
    if k not in ALPHABETS:
        raise ValueError(
            f"unsupported alphabet {kind!r}; expected one of {sorted(ALPHABETS)}"
        )
    return k


@dataclass(frozen=True)
class SignalSet:
    """Ordered finite set (multiset, for derived sets) of complex symbols.

    ``label`` is ``"BPSK"``, ``"QPSK"``, ``"PSK8"``, ``"QAM16"`` for source
    alphabets, ``"Rotated(<base>,<theta>)"``, ``"Union"`` or
    ``"MinkowskiSum"`` otherwise. ``bits_per_symbol`` is only set on source
    alphabets (and on rotations of them, which keep the cardinality).
    """

    symbols: np.ndarray
    label: str
    bits_per_symbol: Optional[int] = None
    base: Optional[str] = None
    theta: Optional[float] = None

    def __post_init__(self):
        arr = np.array(self.symbols, dtype=complex).ravel()
        if not np.all(np.isfinite(arr)):
            raise ValueError("signal set contains non-finite symbols")
        arr.flags.writeable = False
        object.__setattr__(self, "symbols", arr)

    def __len__(self) -> int:
        return self.symbols.size

    def __iter__(self):
        return iter(self.symbols.tolist())

    def __getitem__(self, i):
        return self.symbols[i]

    @property
    def mean_power(self) -> float:
        return float(np.mean(np.abs(self.symbols) ** 2))

    def to_csv_rows(self, set_label: Optional[str] = None) -> list[tuple]:
        lab = set_label if set_label is not None else self.label
        return [(i, float(s.real), float(s.imag), lab) for i, s in enumerate(self.symbols)]


def make_alphabet(kind: str) -> SignalSet:
    """Unit-average-power source alphabet in geometric order.

    BPSK ``{1, -1}``; QPSK ``e^{j i pi/2}``; PSK8 ``e^{j i pi/4}``;
    QAM16 the ``{-3,-1,1,3}^2`` grid (real part major) scaled by
    ``1/sqrt(10)``. The bit labelling used by the modem lives in
    :func:`cqsm.modem.bit_alphabet`.
    """
    k = canonical_kind(kind)
    if k == "BPSK":
        pts = np.array([1.0, -1.0], dtype=complex)
    elif k == "QPSK":
        pts = np.exp(1j * np.arange(4) * np.pi / 2)
    elif k == "PSK8":
        pts = np.exp(1j * np.arange(8) * np.pi / 4)
    else:
        lv = np.array([-3.0, -1.0, 1.0, 3.0])
        pts = (lv[:, None] + 1j * lv[None, :]).ravel() / math.sqrt(10.0)
    # exact zeros instead of 6e-17 residue from exp()
    re, im = pts.real.copy(), pts.imag.copy()
    re[np.abs(re) < 1e-15] = 0.0
    im[np.abs(im) < 1e-15] = 0.0
    pts = re + 1j * im
    return SignalSet(pts, label=k, bits_per_symbol=ALPHABETS[k], base=k)


def rotate_set(s: SignalSet, theta: float) -> SignalSet:
    if len(s) == 0:
        raise ValueError("cannot rotate an empty set")
    base = s.base or s.label
    return SignalSet(
        s.symbols * np.exp(1j * theta),
        label=f"Rotated({base},{theta!r})",
        bits_per_symbol=s.bits_per_symbol,
        base=base,
        theta=float(theta),
    )


def minkowski_sum(a: SignalSet, b: SignalSet) -> SignalSet:
    """All pairwise sums ``a_i + b_k``, ``a``-major, duplicates kept."""
    if len(a) == 0 or len(b) == 0:
        raise ValueError("Minkowski sum needs two non-empty sets")
    return SignalSet((a.symbols[:, None] + b.symbols[None, :]).ravel(), label="MinkowskiSum")


def union(*sets: SignalSet) -> SignalSet:
    return SignalSet(np.concatenate([s.symbols for s in sets]), label="Union")


def effective_set(omega_a: SignalSet, omega_b: SignalSet) -> SignalSet:
    """Received-symbol multiset ``A | B | (A (+) B)``; size ``2*2^q + 4^q``."""
    out = union(omega_a, omega_b, minkowski_sum(omega_a, omega_b))
    return SignalSet(out.symbols, label="Union")


def min_distance(s: SignalSet | Sequence[complex]) -> float:
    pts = s.symbols if isinstance(s, SignalSet) else np.asarray(s, dtype=complex)
    if pts.size < 2:
        raise ValueError("minimum distance needs at least two symbols")
    d = np.abs(pts[:, None] - pts[None, :])
    iu = np.triu_indices(pts.size, k=1)
    m = float(d[iu].min())
    return 0.0 if m < DUPLICATE_TOL else m


def dmin_effective(kind: str, theta: float) -> float:
    a = make_alphabet(kind)
    return min_distance(effective_set(a, rotate_set(a, theta)))


def optimize_rotation(
    kind: str,
    lo: float = 0.0,
    hi: float = math.pi / 2,
    step: float = math.radians(0.1),
    rel_tol: float = 1e-6,
) -> tuple[list[float], float]:
    """Grid search of the max-min distance of the effective set.

    Returns every grid angle within ``rel_tol`` (relative) of the best
    distance, together with that distance. Angles in radians.
    """
    if not (0.0 <= lo < hi <= math.pi / 2 + 1e-12):
        raise ValueError(f"need 0 <= lo < hi <= pi/2, got [{lo}, {hi}]")
    if step <= 0:
        raise ValueError("step must be positive")
    thetas, dmins = angle_grid_distances(kind, lo, hi, step)
    best = float(dmins.max())
    keep = dmins >= best * (1.0 - rel_tol)
    return [float(t) for t in thetas[keep]], best


def angle_grid_distances(kind: str, lo: float, hi: float, step: float) -> tuple[np.ndarray, np.ndarray]:
    # integer-indexed grid so 0.1 deg steps land on exact decimal angles
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    if n < 1:
        raise ValueError("empty angle grid")
    thetas = lo + step * np.arange(n)
    a = make_alphabet(kind)
    dmins = np.array([min_distance(effective_set(a, rotate_set(a, t))) for t in thetas])
    return thetas, dmins


def qpsk_appendix_distances(theta: float) -> tuple[float, float]:
    """The two competing QPSK distances: sum-set point to ``1`` and ``1`` to
    its rotated image."""
    d1 = math.sqrt(max(3.0 - 2.0 * math.sin(theta) - 2.0 * math.cos(theta), 0.0))
    d2 = math.sqrt(max(2.0 - 2.0 * math.cos(theta), 0.0))
    return d1, d2


def qpsk_analytic_optimum() -> float:
    # d1 = d2  <=>  sin(theta) = 1/2
    return math.pi / 6


def minkowski_subset_polar(i: int, theta: float) -> tuple[float, float]:
    """Polar form ``(r_i, phi_i)`` of the first element of the i-th shifted
    QPSK subset of the sum set, ``i`` in 1..4."""
    if i == 1:
        return math.sqrt(2 + 2 * math.cos(theta)), theta / 2
    if i == 2:
        return math.sqrt(max(2 - 2 * math.sin(theta), 0.0)), theta / 2 + math.pi / 4
    if i == 3:
        return math.sqrt(2 + 2 * math.sin(theta)), theta / 2 - math.pi / 4
    if i == 4:
        return math.sqrt(max(2 - 2 * math.cos(theta), 0.0)), theta / 2 - math.pi / 2
    raise ValueError(f"subset index must be 1..4, got {i}")
