"""Command-line front end: ``solve``, ``certify``, ``sweep`` and ``rates``."""

from __future__ import annotations

import argparse
import logging
import sys

from . import harness
from .problems import DEFAULT_CORPUS
from .schedules import Method


def _add_run_args(p):
    p.add_argument("--config", help="INI file with an [experiment] section; flags override it")
    p.add_argument("--problem", help=f"corpus name, e.g. {', '.join(DEFAULT_CORPUS[:3])}")
    p.add_argument("--method", choices=[m.value for m in Method], type=str.upper)
    p.add_argument("--iters", type=int)
    p.add_argument("--step", type=float, help="gamma (AEG/APEG) or eta (others); default is the method's rule")
    p.add_argument("--x0", help="starting point, e.g. '1,0'")
    p.add_argument("--out", help="trace CSV path")
    p.add_argument("--record-every", type=int, dest="record_every")
    p.add_argument("--force", action="store_true", help="run even if the step is inadmissible")


def _build_config(args, certify):
    if args.config:
        cfg = harness.load_config(args.config)
    else:
        if not args.problem or not args.method:
            raise harness.ConfigError("--problem and --method are required without --config")
        cfg = harness.ExperimentConfig(problem=args.problem, method=args.method)
    for name, attr in (("problem", "problem"), ("method", "method"), ("iters", "iters"),
                       ("step", "step"), ("out", "output_path"), ("record_every", "record_every")):
        val = getattr(args, name)
        if val is not None:
            setattr(cfg, attr, val)
    if args.x0 is not None:
        cfg.x0 = harness.parse_vector(args.x0)
    if args.force:
        cfg.force = True
    if certify:
        cfg.certify = True
    return cfg


def _cmd_run(args, certify):
    try:
        cfg = _build_config(args, certify)
    except harness.ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return harness.EXIT_CONFIG
    res = harness.run_experiment(cfg)
    if res.status == harness.EXIT_CONFIG:
        print(f"error: {res.message}", file=sys.stderr)
        return res.status
    print(f"{cfg.method.upper()} on {cfg.problem}: {res.message}")
    if res.report is not None:
        sys.stdout.write(res.report.render())
    for path in res.files:
        print(f"wrote {path}")
    return res.status


def _cmd_sweep(args):
    try:
        sweep = harness.load_sweep(args.sweep_config)
    except harness.ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return harness.EXIT_CONFIG
    if args.out:
        sweep.output_dir = args.out
    if args.iters is not None:
        sweep.template.iters = args.iters
    results = harness.run_sweep(sweep, workers=args.workers)
    for cfg, status, msg in results:
        print(f"[{status}] {cfg.problem} {Method.parse(cfg.method).value}: {msg} -> {cfg.output_path}")
    return harness.sweep_status(results)


def _cmd_rates(args):
    status = harness.EXIT_OK
    for path in args.csv:
        try:
            fit = harness.fit_log_slope(harness.read_csv(path), args.tail, args.best_iterate)
        except (OSError, ValueError) as exc:
            print(f"{path}: error: {exc}", file=sys.stderr)
            status = harness.EXIT_CONFIG
            continue
        print(f"{path}: slope={fit.slope:.4f} intercept={fit.intercept:.4f} "
              f"r2={fit.r_squared:.4f} n={fit.n_points} tail={fit.tail_fraction:g}")
    return status


def build_parser():
    parser = argparse.ArgumentParser(
        prog="acceg", description="Accelerated extragradient solvers for co-hypomonotone inclusions.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run one method on one problem and write a trace")
    _add_run_args(p)
    p = sub.add_parser("certify", help="run and check the Lyapunov decrease and residual bound")
    _add_run_args(p)

    p = sub.add_parser("sweep", help="run a problems x methods grid from a [sweep] config")
    p.add_argument("sweep_config")
    p.add_argument("--out", help="override output_dir")
    p.add_argument("--iters", type=int)
    p.add_argument("--workers", type=int)

    p = sub.add_parser("rates", help="fit log-log slopes to existing trace CSVs")
    p.add_argument("csv", nargs="+")
    p.add_argument("--tail", type=float, default=0.5)
    p.add_argument("--best-iterate", action="store_true", dest="best_iterate")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors, matching the config-error code
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "solve":
        return _cmd_run(args, certify=False)
    if args.command == "certify":
        return _cmd_run(args, certify=True)
    if args.command == "sweep":
        return _cmd_sweep(args)
    return _cmd_rates(args)


if __name__ == "__main__":
    sys.exit(main())
