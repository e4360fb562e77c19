"""Command line entry point: ``tsm-sim {run,certify,loop,sweep} CONFIG``.

Exit codes: 0 success, 1 configuration error, 2 divergence,
3 certification violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .engine import DivergenceError, run_scenario
from .friction import hysteresis_loop
from .scenario import ConfigError, ScenarioConfig, load_config, parse_value

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED, EXIT_CERTIFY = 0, 1, 2, 3

log = logging.getLogger("tsm_control")


def _out_dir(args, cfg: ScenarioConfig) -> Path:
    out = Path(args.out or cfg.output or "out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, allow_nan=True) + "\n")


def cmd_run(args, certify: bool = False) -> int:
    cfg = load_config(args.config)
    out = _out_dir(args, cfg)
    try:
        trace, metrics, report = run_scenario(cfg)
    except DivergenceError as exc:
        if exc.trace is not None:
            exc.trace.write_csv(out / f"{cfg.name}_trace.csv")
        log.error("%s", exc)
        return EXIT_DIVERGED
    trace.write_csv(out / f"{cfg.name}_trace.csv")
    _write_json(out / f"{cfg.name}_metrics.json", {"name": cfg.name, **metrics.to_dict()})
    log.info("%s: mse=%.6g rad^2 max|e_r|=%.6g rad", cfg.name, metrics.mse, metrics.max_abs_error)
    if certify or args.certify:
        _write_json(out / f"{cfg.name}_certificate.json", {"name": cfg.name, **report.to_dict()})
        log.info("%s: certificate %s (violations=%d, Psi=%.6g, rho=%.6g, radius=%.6g)",
                 cfg.name, "PASS" if report.passed else "FAIL", len(report.violations),
                 report.Psi, report.rho_cert, report.ultimate_bound)
        if not report.passed:
            return EXIT_CERTIFY
    return EXIT_OK


def cmd_loop(args) -> int:
    cfg = load_config(args.config)
    out = _out_dir(args, cfg)
    lp = cfg.loop
    try:
        pairs = hysteresis_loop(cfg.friction, lp.amplitude, lp.freq, lp.cycles, lp.dt,
                                zeta0=cfg.initial.zeta, scheme=cfg.sim.integrator)
    except ValueError as exc:
        raise ConfigError("loop", str(exc)) from None
    path = out / f"{cfg.name}_loop.csv"
    np.savetxt(path, pairs, fmt="%.17g", delimiter=",", header="x_i,F", comments="")
    log.info("wrote %d loop samples to %s", len(pairs), path)
    return EXIT_OK


def _sweep_one(cfg: ScenarioConfig) -> tuple[float, bool | None, str | None]:
    try:
        _, metrics, _ = run_scenario(cfg)
    except DivergenceError as exc:
        return float("nan"), None, str(exc)
    return metrics.mse, metrics.certify_pass, None


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    out = _out_dir(args, cfg)
    values = [parse_value(v.strip()) for v in args.values.split(",") if v.strip()]
    if not values:
        raise ConfigError("--values", "no values given")
    variants = [
        cfg.with_overrides({args.param: v, "name": f"{cfg.name}_{i}"}) for i, v in enumerate(values)
    ]
    for v in variants:
        v.validate()
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_one, variants))
    else:
        results = [_sweep_one(v) for v in variants]

    lines = [f"{args.param},mse,certify_pass"]
    diverged = False
    for value, (m, ok, err) in zip(values, results):
        lines.append(f"{value},{m:.17g},{ok}")
        if err:
            diverged = True
            log.error("%s=%s: %s", args.param, value, err)
    table = "\n".join(lines) + "\n"
    (out / f"{cfg.name}_sweep.csv").write_text(table)
    if not args.quiet:
        sys.stdout.write(table)
    return EXIT_DIVERGED if diverged else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="scenario JSON file")
    common.add_argument("--out", help="output directory (default: config 'output' or ./out)")
    common.add_argument("--certify", action="store_true", help="also write the stability report")
    common.add_argument("--quiet", action="store_true", help="suppress progress output")

    parser = argparse.ArgumentParser(prog="tsm-sim", description="Tendon-sheath adaptive control simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="simulate; write trace CSV and metrics JSON")
    sub.add_parser("certify", parents=[common], help="simulate and check the Lyapunov envelope")
    sub.add_parser("loop", parents=[common], help="write the friction hysteresis loop as CSV")
    sw = sub.add_parser("sweep", parents=[common], help="MSE table across one parameter")
    sw.add_argument("--param", required=True, help="dotted config key, e.g. gains.sigma")
    sw.add_argument("--values", required=True, help="comma-separated values")
    sw.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(message)s", force=True)
    handlers = {
        "run": cmd_run,
        "certify": lambda a: cmd_run(a, certify=True),
        "loop": cmd_loop,
        "sweep": cmd_sweep,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
