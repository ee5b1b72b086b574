"""Command-line entry point: sweep, invariants, ratios, plotdata."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys

from .errors import AccuracyError, ConfigError, EisensupError
from . import harness as H

log = logging.getLogger("eisensup")


def _parser():
    p = argparse.ArgumentParser(prog="eisensup", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (("sweep", "sup-norm ratio sweep"), ("invariants", "invariant suite"),
                        ("ratios", "constant-term, norm-bound and lattice ratio suite"),
                        ("plotdata", "plot CSVs from a sweep CSV")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", help="TOML configuration file")
        sp.add_argument("--out", default="eisensup-out", help="output directory")
        sp.add_argument("--seed", type=int, help="override the point-sampling seed")
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--tol", type=float, help="evaluator tolerance")
        if name == "invariants":
            sp.add_argument("--fault-psi", type=float, default=None,
                            help="multiply psi by (1 + value) to exercise the unitarity check")
        if name == "plotdata":
            sp.add_argument("--records", help="sweep CSV (default: <out>/supnorm.csv)")
    return p


def _config(args) -> H.HarnessConfig:
    cfg = H.load_config(args.config) if args.config else H.HarnessConfig()
    sweep = cfg.sweep
    if args.seed is not None:
        sweep = dataclasses.replace(sweep, points=H.PointSpec(sweep.points.count, sweep.points.y_max, args.seed))
    if args.tol is not None:
        sweep = dataclasses.replace(sweep, tol=args.tol)
    inv = cfg.invariants
    if getattr(args, "fault_psi", None) is not None:
        inv = dataclasses.replace(inv, psi_perturbation=args.fault_psi)
    if args.workers < 1:
        raise ConfigError("--workers must be at least 1")
    return H.HarnessConfig(sweep, inv, cfg.ratios)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = _config(args)
        os.makedirs(args.out, exist_ok=True)
        manifest = H.RunManifest(cfg.config_hash(), cfg.sweep.points.seed)
        if args.command == "sweep":
            summary = H.run_supnorm_sweep(cfg.sweep, args.out, args.workers)
            manifest.suites["sweep"] = summary.passed
            print(json.dumps(summary.as_dict(), sort_keys=True))
            code = H.EXIT_ACCURACY if summary.failed_rows else (H.EXIT_OK if summary.passed else H.EXIT_INVARIANT)
        elif args.command == "invariants":
            report = H.run_invariant_suite(cfg.invariants, args.out)
            manifest.suites["invariants"] = report.passed
            for r in report.results:
                print(f"{'PASS' if r.passed else 'FAIL'} {r.name} margin={r.margin:.3g} {r.detail}")
            code = H.EXIT_OK if report.passed else H.EXIT_INVARIANT
        elif args.command == "ratios":
            report = H.run_ratio_suite(cfg.ratios, args.out)
            manifest.suites["ratios"] = all(report.passed.values())
            for k, v in report.passed.items():
                print(f"{'PASS' if v else 'FAIL'} {k}")
            code = H.EXIT_OK if manifest.suites["ratios"] else H.EXIT_INVARIANT
        else:
            path = args.records or os.path.join(args.out, "supnorm.csv")
            try:
                records = H.read_records(path)
            except OSError as exc:
                raise ConfigError(f"cannot read records: {exc}") from None
            for p in H.emit_plot_data(records, args.out):
                print(p)
            code = H.EXIT_OK
        manifest.write(args.out)
        return code
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return H.EXIT_CONFIG
    except AccuracyError as exc:
        print(f"accuracy failure: {exc}", file=sys.stderr)
        return H.EXIT_ACCURACY
    except EisensupError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return H.EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
