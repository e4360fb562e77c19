"""Trace the friction hysteresis loop for a sinusoidal actuator motion.

Writes ``x_i,F`` pairs for each requested shape coefficient ``rho`` so the
loops can be overlaid, and prints the force range and transition width.
"""
from __future__ import annotations

import argparse
import dataclasses
from pathlib import Path

import numpy as np

from tsm_control.friction import FrictionParams, hysteresis_loop


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--amplitude", type=float, default=0.4)
    ap.add_argument("--freq", type=float, default=0.2, help="Hz")
    ap.add_argument("--cycles", type=int, default=3)
    ap.add_argument("--dt", type=float, default=1e-3)
    ap.add_argument("--rho", default="", help="comma-separated rho values (default: nominal only)")
    ap.add_argument("--out", type=Path, default=Path("loops"))
    args = ap.parse_args(argv)

    base = FrictionParams()
    rhos = [float(r) for r in args.rho.split(",")] if args.rho else [base.rho]
    args.out.mkdir(parents=True, exist_ok=True)
    for rho in rhos:
        p = dataclasses.replace(base, rho=rho)
        loop = hysteresis_loop(p, args.amplitude, args.freq, args.cycles, args.dt)
        path = args.out / f"loop_rho{rho:g}.csv"
        np.savetxt(path, loop, delimiter=",", header="x_i,F", comments="", fmt="%.10g")
        per_cycle = int(round(1.0 / (args.freq * args.dt)))
        last = loop[-per_cycle - 1:]
        print(f"rho={rho:<8g} F in [{last[:, 1].min():+.4f}, {last[:, 1].max():+.4f}]  -> {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
