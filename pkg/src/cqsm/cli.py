"""Command-line front end.

Every subcommand writes ``<command>.csv`` and ``<command>.manifest.json``
into ``--out-dir`` (default: ``$CQSM_OUT_DIR`` or the working directory).
Settings come from built-in defaults, then ``--config FILE`` (JSON object
keyed by option name, e.g. ``{"nt": 4, "snr": "0:2:20"}``), then flags.
``--from-manifest`` replays the resolved settings of an earlier run.
Angles are in degrees on the command line.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import __version__
from .analysis import abep_curve
from .artifacts import read_manifest, write_csv, write_manifest
from .constellation import (
    angle_grid_distances,
    make_alphabet,
    minkowski_sum,
    rotate_set,
)
from .detector import complexity_count
from .modem import SchemeConfig, spectral_efficiency
from .montecarlo import SimConfig, empirical_probabilities, run_ber_curve, sweep_rotation

OUT_DIR_ENV = "CQSM_OUT_DIR"

_SCHEME_DEFAULTS = {
    "scheme": "cqsm", "nt": 4, "nu": 2, "alphabet": "qpsk", "theta_deg": 30.0,
    "normalize": True, "energy_ref": 1.0,
}
_SIM_DEFAULTS = {
    "nr": 4, "seed": 0, "max_trials": 1_000_000, "target_errors": 200,
    "ber_floor": 0.0, "block_size": 4096,
}
DEFAULTS = {
    "angle-opt": {"alphabet": "qpsk", "step_deg": 0.1, "lo_deg": 0.0, "hi_deg": 90.0},
    "ber": {**_SCHEME_DEFAULTS, **_SIM_DEFAULTS, "snr": "0:2:20"},
    "sweep-theta": {**_SCHEME_DEFAULTS, **_SIM_DEFAULTS, "snr": "10", "theta": "0:2.5:90"},
    "abep": {**_SCHEME_DEFAULTS, "nr": 4, "snr": "0:2:20"},
    "constellation": {"alphabet": "qpsk", "theta_deg": 45.0},
    "complexity": {"nr": 8, "m": 8},
    "collisions": {"nt": 4, "alphabet": "qpsk", "theta_deg": 30.0, "trials": 1_000_000, "seed": 0},
}

CONVENTIONS = {
    "snr": "SNR_dB = 10 log10(energy_ref / sigma_n^2); energy_ref defaults to unit symbol energy",
    "channel": "i.i.d. CN(0, 1) entries, fresh realisation every channel use",
    "cqsm_normalize": "normalize=true scales CQSM vectors by 1/sqrt(2) (unit energy per channel use)",
    "angles": "degrees",
}


def parse_grid(text) -> list[float]:
    """``start:step:stop`` (inclusive), a comma list, or a single number."""
    if isinstance(text, (int, float)):
        return [float(text)]
    if isinstance(text, list):
        return [float(v) for v in text]
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid {text!r} must be start:step:stop")
        start, step, stop = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"grid {text!r} needs step > 0 and stop >= start")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 12) for i in range(n)]
    return [float(v) for v in text.split(",") if v.strip()]


def _add_scheme_args(p):
    p.add_argument("--scheme", choices=["sm", "gsm", "qsm", "cqsm"], type=str.lower)
    p.add_argument("--nt", type=int)
    p.add_argument("--nu", type=int, help="active antennas (GSM)")
    p.add_argument("--alphabet", type=str.lower)
    p.add_argument("--theta-deg", type=float, dest="theta_deg")
    p.add_argument("--normalize", dest="normalize", action="store_true", default=None)
    p.add_argument("--no-normalize", dest="normalize", action="store_false")
    p.add_argument("--energy-ref", type=float, dest="energy_ref")


def _add_sim_args(p):
    p.add_argument("--nr", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-trials", type=int, dest="max_trials")
    p.add_argument("--target-errors", type=int, dest="target_errors")
    p.add_argument("--ber-floor", type=float, dest="ber_floor")
    p.add_argument("--block-size", type=int, dest="block_size")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cqsm", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"cqsm {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", dest="out_dir")
    common.add_argument("--config", help="JSON file with option values")
    common.add_argument("--from-manifest", dest="from_manifest")
    common.add_argument("--workers", type=int, default=1)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("angle-opt", parents=[common], help="max-min distance rotation search")
    p.add_argument("--alphabet", type=str.lower)
    p.add_argument("--step-deg", type=float, dest="step_deg")
    p.add_argument("--lo-deg", type=float, dest="lo_deg")
    p.add_argument("--hi-deg", type=float, dest="hi_deg")

    p = sub.add_parser("ber", parents=[common], help="Monte Carlo BER curve")
    _add_scheme_args(p)
    _add_sim_args(p)
    p.add_argument("--snr", help="dB grid, start:step:stop or comma list")

    p = sub.add_parser("sweep-theta", parents=[common], help="BER against rotation angle")
    _add_scheme_args(p)
    _add_sim_args(p)
    p.add_argument("--snr", help="operating point in dB")
    p.add_argument("--theta", help="angle grid in degrees")

    p = sub.add_parser("abep", parents=[common], help="union bound on the BER")
    _add_scheme_args(p)
    p.add_argument("--nr", type=int)
    p.add_argument("--snr")

    p = sub.add_parser("constellation", parents=[common], help="export A, B and A (+) B")
    p.add_argument("--alphabet", type=str.lower)
    p.add_argument("--theta-deg", type=float, dest="theta_deg")

    p = sub.add_parser("complexity", parents=[common], help="ML detector operation count")
    p.add_argument("--nr", type=int)
    p.add_argument("--m", type=int)

    p = sub.add_parser("collisions", parents=[common], help="empirical Pr[alpha = beta] for CQSM")
    p.add_argument("--nt", type=int)
    p.add_argument("--alphabet", type=str.lower)
    p.add_argument("--theta-deg", type=float, dest="theta_deg")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    return ap


_META = {"command", "out_dir", "config", "from_manifest", "workers"}


def resolve(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS[args.command])
    if args.from_manifest:
        doc = read_manifest(args.from_manifest)
        if doc["command"] != args.command:
            raise ValueError(f"manifest is for {doc['command']!r}, not {args.command!r}")
        cfg.update(doc["config"])
    if args.config:
        extra = json.loads(Path(args.config).read_text())
        unknown = set(extra) - set(cfg)
        if unknown:
            raise ValueError(f"unknown config keys for {args.command}: {sorted(unknown)}")
        cfg.update(extra)
    for k, v in vars(args).items():
        if k not in _META and v is not None:
            cfg[k] = v
    return cfg


def _scheme(cfg: dict) -> SchemeConfig:
    return SchemeConfig(
        scheme=cfg["scheme"],
        n_t=int(cfg["nt"]),
        alphabet=cfg["alphabet"],
        n_u=int(cfg["nu"]),
        theta=math.radians(float(cfg["theta_deg"])),
        normalize_power=bool(cfg["normalize"]),
    )


def _sim(cfg: dict, snr_grid, theta_grid=None) -> SimConfig:
    return SimConfig(
        scheme=_scheme(cfg),
        n_r=int(cfg["nr"]),
        snr_grid=snr_grid,
        theta_grid=theta_grid,
        master_seed=int(cfg["seed"]),
        max_trials=int(cfg["max_trials"]),
        target_error_events=int(cfg["target_errors"]),
        max_ber_floor=float(cfg["ber_floor"]),
        block_size=int(cfg["block_size"]),
        energy_ref=float(cfg["energy_ref"]),
    )


def _ber_rows(points):
    return [(p.snr_db, p.bit_errors, p.bits_simulated, p.ber, p.std_error) for p in points]


def cmd_angle_opt(cfg, out, workers):
    lo, hi, step = (math.radians(float(cfg[k])) for k in ("lo_deg", "hi_deg", "step_deg"))
    if not (0.0 <= lo < hi <= math.pi / 2 + 1e-12) or step <= 0:
        raise ValueError("angle grid needs 0 <= lo < hi <= 90 and step > 0")
    thetas, dmins = angle_grid_distances(cfg["alphabet"], lo, hi, step)
    best = float(dmins.max())
    deg = [round(math.degrees(t), 9) for t in thetas]
    opt = [d for d, v in zip(deg, dmins) if v >= best * (1 - 1e-6)]
    path = write_csv(out / "angle-opt.csv", ["theta_deg", "dmin"], zip(deg, (float(v) for v in dmins)))
    if len(opt) > 6:
        shown = f"{opt[0]:g}..{opt[-1]:g} ({len(opt)} angles)"
    else:
        shown = ",".join(f"{d:g}" for d in opt)
    print(f"optima_deg={shown} dmin={best!r}")
    return [path]


def cmd_ber(cfg, out, workers):
    sim = _sim(cfg, parse_grid(cfg["snr"]))
    pts = run_ber_curve(sim, workers=workers)
    path = write_csv(out / "ber.csv", ["snr_db", "bit_errors", "bits", "ber", "std_err"], _ber_rows(pts))
    print(f"M={spectral_efficiency(sim.scheme)} points={len(pts)} -> {path}")
    return [path]


def cmd_sweep(cfg, out, workers):
    snr = parse_grid(cfg["snr"])
    thetas = [math.radians(t) for t in parse_grid(cfg["theta"])]
    # degenerate angles cannot be simulated; validate them up front
    for t in thetas:
        _scheme({**cfg, "theta_deg": math.degrees(t)})
    res = sweep_rotation(_sim(cfg, snr[:1], thetas), workers=workers)
    rows = [(round(math.degrees(t), 9), p.bit_errors, p.bits_simulated, p.ber, p.std_error)
            for t, p in zip(res.thetas, res.points)]
    path = write_csv(out / "sweep-theta.csv", ["theta_deg", "bit_errors", "bits", "ber", "std_err"], rows)
    plateau = ",".join(f"{math.degrees(t):g}" for t in res.plateau)
    print(f"theta_opt_deg={math.degrees(res.theta_opt):g} plateau_deg={plateau}")
    return [path]


def cmd_abep(cfg, out, workers):
    curve = abep_curve(_scheme(cfg), parse_grid(cfg["snr"]), int(cfg["nr"]), energy_ref=float(cfg["energy_ref"]))
    return [write_csv(out / "abep.csv", ["snr_db", "abep"], curve)]


def cmd_constellation(cfg, out, workers):
    a = make_alphabet(cfg["alphabet"])
    b = rotate_set(a, math.radians(float(cfg["theta_deg"])))
    c = minkowski_sum(a, b)
    rows = a.to_csv_rows("omega_a") + b.to_csv_rows("omega_b") + c.to_csv_rows("omega_c")
    return [write_csv(out / "constellation.csv", ["index", "re", "im", "set_label"], rows)]


def cmd_complexity(cfg, out, workers):
    rep = complexity_count(int(cfg["nr"]), int(cfg["m"]))
    print(f"mults={rep.real_multiplications} adds={rep.real_additions}")
    return [write_csv(out / "complexity.csv", ["n_r", "m", "mults", "adds"],
                      [(int(cfg["nr"]), int(cfg["m"]), rep.real_multiplications, rep.real_additions)])]


def cmd_collisions(cfg, out, workers):
    scheme = SchemeConfig("CQSM", int(cfg["nt"]), cfg["alphabet"], theta=math.radians(float(cfg["theta_deg"])))
    sim = SimConfig(scheme, 1, [0.0], master_seed=int(cfg["seed"]))
    p, q = empirical_probabilities(sim, int(cfg["trials"]))
    print(f"p_collision={p!r} expected={1 / scheme.n_t!r}")
    return [write_csv(out / "collisions.csv", ["n_t", "trials", "p_collision", "p_no_collision"],
                      [(scheme.n_t, int(cfg["trials"]), p, q)])]


COMMANDS = {
    "angle-opt": cmd_angle_opt, "ber": cmd_ber, "sweep-theta": cmd_sweep, "abep": cmd_abep,
    "constellation": cmd_constellation, "complexity": cmd_complexity, "collisions": cmd_collisions,
}


def run_cli(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        out = Path(args.out_dir or os.environ.get(OUT_DIR_ENV) or ".")
        if not out.is_dir():
            raise OSError(f"output directory {out} does not exist")
        if args.workers < 1:
            raise ValueError("--workers must be >= 1")
        paths = COMMANDS[args.command](cfg, out, args.workers)
        write_manifest(
            out / f"{args.command}.manifest.json", args.command, cfg,
            [p.name for p in paths], __version__, CONVENTIONS,
        )
    except (ValueError, OSError) as exc:
        print(f"cqsm {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
