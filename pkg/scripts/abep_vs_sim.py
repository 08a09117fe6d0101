"""Union bound on the CQSM bit error probability next to simulation.

    python scripts/abep_vs_sim.py --nt 4 --nr 4 --snr 0:2:24
"""

import argparse
import math

from cqsm.analysis import abep_curve
from cqsm.cli import parse_grid
from cqsm.montecarlo import SimConfig, run_ber_curve
from cqsm.modem import SchemeConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nt", type=int, default=4)
    ap.add_argument("--nr", type=int, default=4)
    ap.add_argument("--alphabet", default="QPSK")
    ap.add_argument("--theta-deg", type=float, default=35.0)
    ap.add_argument("--snr", default="0:2:20")
    ap.add_argument("--trials", type=int, default=500_000)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    grid = parse_grid(args.snr)
    sch = SchemeConfig("CQSM", args.nt, args.alphabet, theta=math.radians(args.theta_deg))
    bound = abep_curve(sch, grid, args.nr)
    sim = run_ber_curve(SimConfig(sch, args.nr, grid, master_seed=args.seed, max_trials=args.trials,
                                  target_error_events=1000), workers=args.workers)
    print(f"{'snr_db':>6s} {'bound':>10s} {'sim':>10s} {'ratio':>7s}")
    for (s, b), p in zip(bound, sim):
        print(f"{s:6.1f} {b:10.3e} {p.ber:10.3e} {b / p.ber if p.ber else math.inf:7.2f}")


if __name__ == "__main__":
    main()
