"""Optimum rotation angle and effective-set minimum distance per alphabet.

    python scripts/rotation_angles.py --step-deg 0.1
"""

import argparse
import math

from cqsm.constellation import ALPHABETS, optimize_rotation, qpsk_analytic_optimum


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--step-deg", type=float, default=0.1)
    args = ap.parse_args()
    print(f"{'alphabet':8s} {'dmin':>8s}  optima (deg)")
    for kind in ALPHABETS:
        angles, d = optimize_rotation(kind, step=math.radians(args.step_deg))
        deg = [round(math.degrees(a), 4) for a in angles]
        shown = f"{deg[0]:g}..{deg[-1]:g} ({len(deg)} angles)" if len(deg) > 8 else ", ".join(f"{a:g}" for a in deg)
        print(f"{kind:8s} {d:8.5f}  {shown}")
    print(f"QPSK closed form: {math.degrees(qpsk_analytic_optimum()):g} deg")


if __name__ == "__main__":
    main()
