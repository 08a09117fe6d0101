import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from cqsm.analysis import (
    ABEP_MAX_BITS,
    HypothesisPair,
    abep_bound,
    abep_bound_pairs,
    abep_curve,
    average_pep,
    expected_zeta,
    expected_zeta_table,
    pairs_for,
    q_function,
    zeta_row,
)
from cqsm.channel import SnrSpec
from cqsm.modem import SchemeConfig, spectral_efficiency

QPSK = [complex(a, b) / math.sqrt(2) for a in (-1, 1) for b in (-1, 1)]

# one antenna pattern per row, none cross-coincident (alpha, beta, alpha_hat, beta_hat)
ROW_PATTERNS = {
    1: (1, 2, 3, 4),
    2: (1, 2, 1, 3),
    3: (1, 2, 3, 2),
    4: (1, 2, 1, 2),
    5: (1, 1, 2, 3),
    6: (1, 1, 1, 2),
    7: (1, 1, 2, 1),
    8: (1, 2, 3, 3),
    9: (1, 2, 1, 1),
    10: (1, 2, 2, 2),
    11: (1, 1, 2, 2),
    12: (1, 1, 1, 1),
}


def gauss_tail(x):
    """Oracle: integrate the standard normal density from x to infinity."""
    val, _ = integrate.quad(lambda t: math.exp(-t * t / 2) / math.sqrt(2 * math.pi), x, math.inf, epsabs=1e-14)
    return val


def random_pair(rng, pattern, symbols=QPSK):
    s = [complex(rng.choice(symbols)) for _ in range(4)]
    return HypothesisPair(*pattern, *s)


def zeta_mc(p, n_t, sigma_h_sq, sigma_n_sq, h):
    """Oracle: per-antenna mean of (g - g_hat)^H (g - g_hat) / (2 sigma_n^2)
    with g built column by column from channel draws ``h`` (draws x n_t)."""
    g = h[:, p.alpha - 1] * p.x_a + h[:, p.beta - 1] * p.x_b
    gh = h[:, p.alpha_hat - 1] * p.x_a_hat + h[:, p.beta_hat - 1] * p.x_b_hat
    return float(np.mean(np.abs(g - gh) ** 2) / (2 * sigma_n_sq))


class TestQ:
    def test_zero(self):
        assert q_function(0.0) == 0.5

    def test_one_against_quadrature(self):
        assert q_function(1.0) == pytest.approx(gauss_tail(1.0), abs=1e-12)
        assert q_function(1.0) == pytest.approx(0.158655, abs=1e-6)

    @pytest.mark.parametrize("x", [0.3, 2.0, 4.5, 7.0])
    def test_against_quadrature(self, x):
        assert q_function(x) == pytest.approx(gauss_tail(x), rel=1e-9)

    @given(st.floats(-30, 30))
    def test_complement(self, x):
        assert q_function(x) + q_function(-x) == pytest.approx(1.0, abs=1e-15)

    def test_vector(self):
        out = q_function(np.array([0.0, 1.0]))
        assert isinstance(out, np.ndarray) and out[0] == 0.5


class TestAveragePep:
    @pytest.mark.parametrize("n_r", [1, 2, 3, 4])
    def test_zero_gives_half(self, n_r):
        assert average_pep(0.0, n_r) == pytest.approx(0.5, abs=1e-15)

    def test_infinite(self):
        assert average_pep(math.inf, 3) == 0.0
        assert average_pep(1e12, 2) < 1e-20

    def test_single_branch_closed_form(self):
        # n_r = 1 collapses to gamma itself
        for z in (0.1, 1.0, 25.0):
            assert average_pep(z, 1) == pytest.approx(0.5 * (1 - math.sqrt(z / 2 / (1 + z / 2))), rel=1e-14)

    @pytest.mark.parametrize("zbar,n_r", [(1.0, 1), (4.0, 2), (10.0, 4), (30.0, 3)])
    def test_quadrature_oracle(self, zbar, n_r):
        # sum of n_r exponentials with mean zbar is Gamma(n_r, zbar)
        pdf = stats.gamma(n_r, scale=zbar).pdf
        val, _ = integrate.quad(lambda z: q_function(math.sqrt(z)) * pdf(z), 0, math.inf, epsabs=1e-14, limit=200)
        assert average_pep(zbar, n_r) == pytest.approx(val, rel=1e-7)

    @pytest.mark.parametrize("zbar,n_r", [(2.0, 1), (8.0, 2), (3.0, 3), (2.0, 4)])
    def test_monte_carlo_oracle(self, zbar, n_r):
        rng = np.random.default_rng(10)
        h = (rng.standard_normal((1_000_000, n_r)) + 1j * rng.standard_normal((1_000_000, n_r))) * math.sqrt(zbar / 2)
        zeta = np.sum(np.abs(h) ** 2, axis=1)
        q = q_function(np.sqrt(zeta))
        mc = float(np.mean(q))
        # the operating points keep the sampling error well inside the 3% band
        assert np.std(q) / math.sqrt(q.size) < 0.005 * mc
        assert average_pep(zbar, n_r) == pytest.approx(mc, rel=0.03)

    def test_large_n_r_branch_continuous(self):
        # log-gamma route above 64 branches lines up with the integer route below it
        z = np.array([0.01, 0.05, 0.2])
        a, b = average_pep(z, 64), average_pep(z, 65)
        assert np.all(b < a) and np.all(b > 0.5 * a)
        assert average_pep(0.0, 80) == pytest.approx(0.5, abs=1e-12)

    @settings(max_examples=100)
    @given(st.floats(0.01, 1e4), st.floats(1.001, 3.0), st.integers(1, 8))
    def test_monotone(self, z, factor, n_r):
        assert average_pep(z * factor, n_r) < average_pep(z, n_r)
        assert average_pep(z, n_r + 1) < average_pep(z, n_r)

    def test_array(self):
        out = average_pep(np.array([0.0, 1.0, np.inf]), 2)
        assert out.shape == (3,) and out[0] == pytest.approx(0.5) and out[2] == 0.0

    def test_rejects(self):
        with pytest.raises(ValueError):
            average_pep(1.0, 0)
        with pytest.raises(ValueError):
            average_pep(-1.0, 1)


class TestZeta:
    @pytest.mark.parametrize("row,pattern", sorted(ROW_PATTERNS.items()))
    def test_row_selection(self, row, pattern):
        p = random_pair(np.random.default_rng(row), pattern)
        assert zeta_row(p) == row
        assert not p.cross_coincident

    def test_row1_value(self):
        p = HypothesisPair(1, 2, 3, 4, 1, 1j, -1, -1j)
        assert expected_zeta(p, 1.0, 0.5) == pytest.approx(4.0)
        assert expected_zeta_table(p, 1.0, 0.5) == pytest.approx(4.0)

    def test_identical_pair_is_zero(self):
        p = HypothesisPair(2, 2, 2, 2, 1, 1j, 1, 1j)
        assert zeta_row(p) == 12
        assert expected_zeta(p, 1.0, 0.1) == 0.0

    def test_rows_cover_every_index_pattern(self):
        seen = set()
        for ants in itertools.product(range(1, 5), repeat=4):
            seen.add(zeta_row(HypothesisPair(*ants, 1, 1, 1, 1)))
        assert seen == set(range(1, 13))

    @pytest.mark.parametrize("row,pattern", sorted(ROW_PATTERNS.items()))
    def test_monte_carlo_per_row(self, row, pattern):
        rng = np.random.default_rng(100 + row)
        h = (rng.standard_normal((100_000, 4)) + 1j * rng.standard_normal((100_000, 4))) / math.sqrt(2)
        for _ in range(20):
            p = random_pair(rng, pattern)
            want = expected_zeta(p, 1.0, 0.05)
            got = zeta_mc(p, 4, 1.0, 0.05, h)
            if want == 0:
                assert got < 1e-20
            else:
                assert got == pytest.approx(want, rel=0.02)
                assert expected_zeta_table(p, 1.0, 0.05) == pytest.approx(want, rel=1e-12)

    def test_scales_with_variances(self):
        p = random_pair(np.random.default_rng(0), ROW_PATTERNS[5])
        base = expected_zeta(p, 1.0, 1.0)
        assert expected_zeta(p, 2.0, 0.25) == pytest.approx(8 * base)

    def test_table_equals_general_on_full_codebook(self):
        cfg = SchemeConfig("CQSM", 4, "QPSK", theta=math.radians(35))
        n = 1 << spectral_efficiency(cfg)
        rng = np.random.default_rng(1)
        checked = 0
        for i, k in zip(rng.integers(0, n, 4000), rng.integers(0, n, 4000)):
            p = pairs_for(cfg, int(i), int(k))
            if p.cross_coincident:
                continue
            assert expected_zeta_table(p, 1.0, 0.1) == pytest.approx(expected_zeta(p, 1.0, 0.1), rel=1e-12, abs=1e-15)
            checked += 1
        assert checked > 1000

    def test_cross_coincidence_flag(self):
        # legitimate shared columns inside a modelled row are not flagged
        assert not HypothesisPair(1, 1, 1, 2, 1, 1, 1, 1).cross_coincident
        assert not HypothesisPair(1, 2, 2, 2, 1, 1, 1, 1).cross_coincident
        assert HypothesisPair(1, 2, 3, 1, 1, 1, 1, 1).cross_coincident

    def test_table_misses_cross_coincidence(self):
        # beta = alpha_hat: the two signals share a column, which the first row ignores
        p = HypothesisPair(1, 2, 2, 3, 1, 1, 1, 1)
        assert p.cross_coincident and zeta_row(p) == 1
        rng = np.random.default_rng(3)
        h = (rng.standard_normal((100_000, 3)) + 1j * rng.standard_normal((100_000, 3))) / math.sqrt(2)
        mc = zeta_mc(p, 3, 1.0, 0.5, h)
        assert expected_zeta(p, 1.0, 0.5) == pytest.approx(2.0)
        assert mc == pytest.approx(2.0, rel=0.02)
        assert expected_zeta_table(p, 1.0, 0.5) == pytest.approx(4.0)

    @settings(max_examples=200)
    @given(
        st.tuples(*[st.integers(1, 4)] * 4),
        st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False), min_size=4, max_size=4),
    )
    def test_swap_symmetry(self, ants, syms):
        p = HypothesisPair(*ants, *syms)
        assert expected_zeta(p.swapped(), 1.0, 0.3) == pytest.approx(expected_zeta(p, 1.0, 0.3), rel=1e-12, abs=1e-12)
        if not p.cross_coincident:
            assert expected_zeta_table(p.swapped(), 1.0, 0.3) == pytest.approx(expected_zeta_table(p, 1.0, 0.3), rel=1e-12, abs=1e-12)

    def test_pairs_for_scaling(self):
        cfg = SchemeConfig("CQSM", 4, "QPSK")
        p = pairs_for(cfg, 0, 0)
        assert abs(p.x_a) == pytest.approx(1 / math.sqrt(2))
        q = pairs_for(cfg.replace(normalize_power=False), 0, 0)
        assert abs(q.x_a) == pytest.approx(1.0)

    def test_pairs_for_cqsm_only(self):
        with pytest.raises(ValueError):
            pairs_for(SchemeConfig("QSM", 4, "QPSK"), 0, 1)


def enumerate_bound_m2_oracle():
    """Direct enumeration for M = 2 at vanishing SNR: every PEP is 1/2."""
    m = 2
    total = 0.0
    for i, k in itertools.product(range(4), repeat=2):
        if i != k:
            total += 0.5 * bin(i ^ k).count("1") / m
    return total / 4


class TestAbep:
    def test_low_snr_limit_m2(self):
        assert enumerate_bound_m2_oracle() == 1.0
        cfg = SchemeConfig("SM", 2, "BPSK")
        assert spectral_efficiency(cfg) == 2
        assert abep_bound(cfg, SnrSpec(-200.0), 2) == pytest.approx(1.0, rel=1e-9)

    def test_low_snr_limit_general(self):
        cfg = SchemeConfig("QSM", 4, "QPSK")
        m = spectral_efficiency(cfg)
        assert abep_bound(cfg, SnrSpec(-200.0), 1) == pytest.approx(2 ** (m - 2), rel=1e-9)

    def test_vectorised_equals_pairwise(self):
        cfg = SchemeConfig("CQSM", 2, "QPSK", theta=math.radians(30))
        for snr in (0.0, 12.0):
            assert abep_bound(cfg, SnrSpec(snr), 2) == pytest.approx(abep_bound_pairs(cfg, SnrSpec(snr), 2), rel=1e-12)
        cfg = SchemeConfig("CQSM", 2, "BPSK", theta=math.radians(70), normalize_power=False)
        assert abep_bound(cfg, SnrSpec(10.0), 4) == pytest.approx(abep_bound_pairs(cfg, SnrSpec(10.0), 4), rel=1e-12)

    def test_monotone(self):
        cfg = SchemeConfig("CQSM", 4, "QPSK", theta=math.radians(35))
        curve = abep_curve(cfg, range(0, 21, 2), 4)
        vals = [v for _, v in curve]
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert all(v > 0 for v in vals)

    def test_noiseless(self):
        assert abep_bound(SchemeConfig("SM", 4, "QPSK"), SnrSpec(math.inf), 1) == 0.0

    def test_energy_ref(self):
        cfg = SchemeConfig("CQSM", 2, "QPSK")
        a = abep_curve(cfg, [10.0], 2, energy_ref=2.0)[0][1]
        b = abep_bound(cfg, SnrSpec(10.0 - 10 * math.log10(2.0)), 2)
        assert a == pytest.approx(b, rel=1e-12)

    def test_guard(self):
        cfg = SchemeConfig("CQSM", 32, "QAM16")
        assert spectral_efficiency(cfg) > ABEP_MAX_BITS
        with pytest.raises(ValueError, match="pair evaluations"):
            abep_bound(cfg, SnrSpec(10.0), 2)
