"""Command-line interface: ``tqd trace``, ``tqd sweep`` and ``tqd verify``.

Exit codes: 0 on success, 1 on a fatal error (bad config, unrecoverable
numerical failure), 2 when a run completed but recorded divergence events
or per-size failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys

from .config import ConfigError, ExperimentConfig
from .dynamics import TraceRecord
from .errors import TQDError
from .experiments import build_model, run_fidelity_trace, run_size_sweep
from .verify import format_report, run_suite

logger = logging.getLogger("tqd")

CSV_HEADER = ("t", "fidelity", "min_gap", "adiabaticity", "norm_drift", "N", "protocol", "mode")
# spin count reported for the models without a size parameter
IMPLICIT_N = {"two_level": 1, "two_spin": 2}


def _num(x: float) -> str:
    return "%.12g" % x


def _row(record: TraceRecord, n, protocol: str, mode: str) -> list[str]:
    return [
        _num(record.t), _num(record.fidelity), _num(record.min_gap),
        _num(record.adiabaticity), _num(record.norm_drift), str(n), protocol, mode,
    ]


def _write_csv(path: str | None, rows: list[list[str]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(rows)
    data = buf.getvalue().encode("utf-8")
    if path is None or path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        with open(path, "wb") as fh:
            fh.write(data)


def _jobs(cli_value: int) -> int:
    env = os.environ.get("TQD_JOBS")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ConfigError(f"TQD_JOBS must be an integer, got {env!r}") from None
    else:
        value = cli_value
    if value < 1:
        raise ConfigError("the number of jobs must be >= 1")
    return value


def cmd_trace(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    rows = []
    status = 0
    for n in cfg.size_list():
        for sched in cfg.build_schedules():
            model = build_model(cfg.model, sched, n, cfg.sector)
            trace = run_fidelity_trace(
                model, sched, cfg.driver_mode, cfg.integrator, cfg.n_points, cfg.level, cfg.clamp_divergence
            )
            label = n if n is not None else IMPLICIT_N[cfg.model]
            for event in trace.events:
                logger.warning("N=%s %s: divergence clamped at %s", label, sched.name, event)
                status = 2
            rows.extend(_row(r, label, sched.name, cfg.driver_mode) for r in trace.records)
    _write_csv(args.output or cfg.output, rows)
    return status


def cmd_sweep(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    if not cfg.sizes:
        raise ConfigError("field 'sizes': a sweep needs at least one size")
    if len(set(cfg.sizes)) != len(cfg.sizes):
        raise ConfigError(f"field 'sizes': duplicate sizes in {list(cfg.sizes)}")
    sweep = run_size_sweep(
        cfg.model, cfg.build_schedules(), sorted(cfg.sizes), cfg.driver_mode, cfg.integrator,
        _jobs(args.jobs), cfg.sector, cfg.clamp_divergence, cfg.n_points,
    )
    rows = []
    status = 0
    for r in sweep:
        if r.error is not None:
            logger.error("N=%d %s failed: %s", r.N, r.protocol, r.error)
            rows.append(["nan", "error", "nan", "nan", "nan", str(r.N), r.protocol, r.mode])
            status = 2
            continue
        if r.events:
            status = 2
        rows.append(_row(r.record, r.N, r.protocol, r.mode))
    _write_csv(args.output or cfg.output, rows)
    return status


def cmd_verify(args) -> int:
    results = run_suite(args.seed, args.samples)
    sys.stdout.write(format_report(results))
    sys.stdout.flush()
    return 0 if all(r.passed for r in results) else 1


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tqd", description="Transitionless driving experiments.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("trace", help="fidelity time series for every configured size and protocol")
    p.add_argument("-c", "--config", required=True)
    p.add_argument("-o", "--output", help="CSV path (default: config 'output', else stdout)")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("sweep", help="final fidelity against system size")
    p.add_argument("-c", "--config", required=True)
    p.add_argument("-o", "--output")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers (env TQD_JOBS overrides)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the closed-form versus engine oracle suite")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--samples", type=_positive_int, default=100)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="tqd: %(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"tqd: config error: {exc}", file=sys.stderr)
        return 1
    except (TQDError, OSError) as exc:
        print(f"tqd: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
