"""Long baseline runs (SM n_t=16 and GSM n_t=7, n_u=2 against CQSM at 8
bits/s/Hz). Deselected by default; run with ``pytest -m extended``."""

import math

import pytest

from cqsm.modem import SchemeConfig, spectral_efficiency
from cqsm.montecarlo import SimConfig, run_ber_curve, snr_at_ber

pytestmark = [pytest.mark.extended, pytest.mark.slow]

TRIALS = 2_000_000
CQSM = SchemeConfig("CQSM", 4, "QPSK", theta=math.radians(35.5), normalize_power=False)


def _crossing(cfg, grid):
    pts = run_ber_curve(SimConfig(cfg, 8, grid, max_trials=TRIALS, target_error_events=10**12))
    return snr_at_ber(pts, 1e-4)


@pytest.fixture(scope="module")
def cqsm_crossings():
    return _crossing(CQSM, [8.0, 9.0, 10.0, 11.0]), _crossing(CQSM.replace(normalize_power=True), [11.0, 12.0, 13.0, 14.0])


@pytest.mark.parametrize(
    "name,cfg,grid,target",
    [
        ("GSM 7/2 16QAM", SchemeConfig("GSM", 7, "QAM16", n_u=2), [12.0, 13.0, 14.0, 15.0], 4.5),
        ("SM 16 16QAM", SchemeConfig("SM", 16, "QAM16"), [12.0, 13.0, 14.0, 15.0], 7.1),
    ],
)
def test_baseline_gap(name, cfg, grid, target, cqsm_crossings, report):
    assert spectral_efficiency(cfg) == spectral_efficiency(CQSM) == 8
    s_cq, s_cqn = cqsm_crossings
    s = _crossing(cfg, grid)
    gap = s - s_cq
    ok = abs(gap - target) <= 1.0
    report(
        8, ok,
        f"extended: CQSM ahead of {name} by {gap:.2f} dB (target {target}+-1.0) at unit energy per symbol; "
        f"{s - s_cqn:.2f} dB at unit energy per channel use ({name} {s:.2f} dB)",
    )
    assert ok
