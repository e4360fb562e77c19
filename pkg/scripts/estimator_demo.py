"""Compare the dead-zone velocity estimator with raw differencing.

A slow ramp is quantised by the encoder and fed to both estimators; the
peak and settled errors are printed for a range of slopes.
"""
from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from tsm_control.estimation import EstimatorParams, EstimatorState, estimate_velocity, quantize, raw_difference


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--slopes", default="0.5,0.05,0.01", help="ramp slopes in rad/s")
    ap.add_argument("--duration", type=float, default=5.0)
    ap.add_argument("--filter", choices=("backward", "tustin"), default="backward")
    ap.add_argument("--out", type=Path, default=None, help="optional CSV of the slowest ramp")
    args = ap.parse_args(argv)

    p = EstimatorParams(filter_disc=args.filter)
    t = np.arange(0.0, args.duration, p.T)
    print(f"T={p.T} tau={p.tau} K={p.K} cycles={p.cycles} deadband={p.deadband:.3e} rad")
    print(f"{'slope':>8}{'settled err %':>15}{'max v_est/slope':>17}{'max raw/slope':>15}")
    for slope in (float(s) for s in args.slopes.split(",")):
        x_enc = quantize(slope * t, p.encoder)
        x_est, v = estimate_velocity(x_enc, p, EstimatorState())
        raw = raw_difference(x_enc, p.T)
        settled = 100 * np.max(np.abs(v[t >= 1.0] - slope)) / slope
        print(f"{slope:>8g}{settled:>15.2f}{np.max(np.abs(v)) / slope:>17.3f}{np.max(np.abs(raw)) / slope:>15.2f}")
        if args.out is not None:
            np.savetxt(args.out, np.column_stack([t, slope * t, x_enc, x_est, v, raw]), delimiter=",",
                       header="t,x_true,x_enc,x_est,v_est,v_raw", comments="", fmt="%.10g")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
