"""BER of SM, GSM, QSM and CQSM at 8 bits/s/Hz over a 4x8-style link, and
the SNR each needs for a target BER.

    python scripts/ber_comparison.py --nr 8 --trials 2000000 --workers 4

CQSM is simulated unnormalised (symbol energy as the SNR reference) unless
--normalize is given; see the README for the two conventions.
"""

import argparse
import math

from cqsm.cli import parse_grid
from cqsm.montecarlo import SimConfig, run_ber_curve, snr_at_ber
from cqsm.modem import SchemeConfig, spectral_efficiency


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nr", type=int, default=8)
    ap.add_argument("--snr", default="0:1:20", help="lo:step:hi in dB")
    ap.add_argument("--trials", type=int, default=1_000_000)
    ap.add_argument("--target-errors", type=int, default=1000)
    ap.add_argument("--target-ber", type=float, default=1e-4)
    ap.add_argument("--theta-deg", type=float, default=35.5)
    ap.add_argument("--normalize", action="store_true")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    grid = parse_grid(args.snr)
    schemes = {
        "SM 16x16QAM": SchemeConfig("SM", 16, "QAM16"),
        "GSM 7/2 16QAM": SchemeConfig("GSM", 7, "QAM16", n_u=2),
        "QSM 4 16QAM": SchemeConfig("QSM", 4, "QAM16"),
        "CQSM 4 QPSK": SchemeConfig("CQSM", 4, "QPSK", theta=math.radians(args.theta_deg),
                                    normalize_power=args.normalize),
    }
    crossings = {}
    for name, sch in schemes.items():
        cfg = SimConfig(sch, args.nr, grid, master_seed=args.seed, max_trials=args.trials,
                        target_error_events=args.target_errors, max_ber_floor=args.target_ber / 20)
        pts = run_ber_curve(cfg, workers=args.workers)
        print(f"# {name} ({spectral_efficiency(sch)} b/s/Hz)")
        for p in pts:
            print(f"  {p.snr_db:5.1f} dB  ber={p.ber:.3e}  (+/-{p.std_error:.1e}, {p.trials} uses)")
        try:
            crossings[name] = snr_at_ber(pts, args.target_ber)
        except ValueError:
            crossings[name] = math.nan
    ref = crossings["CQSM 4 QPSK"]
    print(f"\nSNR at BER {args.target_ber:g}:")
    for name, s in crossings.items():
        print(f"  {name:14s} {s:6.2f} dB   gap to CQSM {s - ref:+.2f} dB")


if __name__ == "__main__":
    main()
