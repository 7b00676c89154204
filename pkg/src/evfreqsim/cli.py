"""Command-line interface: run, sweep, compare and validate scenarios."""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .config import ScenarioConfig, load_config, preset, validate_config
from .errors import ConfigError, SimulationDiverged
from .metrics import BASELINE_LABEL, compare_strategies
from .runner import export, run, sweep

STRATEGIES = ("WO_V2G", "CS1", "CS2")


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="scenario YAML file")
    p.add_argument("--preset", choices=("paper", "desk"),
                   help="built-in scenario (ignored when --config is given)")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--strategy", choices=STRATEGIES,
                   help="override the scheduling strategy")
    p.add_argument("--out", help="output directory for exported artifacts")
    p.add_argument("--workers", type=int, default=1,
                   help="worker threads (never changes results)")


def _resolve_config(args) -> ScenarioConfig:
    if args.config:
        cfg = load_config(args.config)
    else:
        cfg = preset(args.preset or "desk")
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.strategy is not None:
        overrides["strategy"] = args.strategy
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    return cfg


def _print_summary(record):
    for key, value in sorted(record.metrics.to_kv().items()):
        print(f"{key}={value}")


def cmd_run(args) -> int:
    record = run(_resolve_config(args), workers=args.workers)
    _print_summary(record)
    if args.out:
        for path in export(record, args.out):
            print(f"wrote {path}")
    return 0


def cmd_sweep(args) -> int:
    values = [float(v) for v in args.values.split(",")]
    records = sweep(_resolve_config(args), args.axis, values,
                    workers=args.workers)
    print(f"axis={args.axis}")
    for value, record in zip(values, records):
        m = record.metrics
        print(f"{value}: ace.rms_mw={m.ace.rms:.6g} freq.rms_hz={m.freq_a.rms:.6g}"
              f" soc_dev.fleet_mean={m.soc_dev.fleet_mean:.6g}")
        if args.out:
            export(record, f"{args.out}/{args.axis.replace('.', '_')}={value}")
    return 0


def cmd_compare(args) -> int:
    base = _resolve_config(args)
    labels = {"WO_V2G": BASELINE_LABEL, "CS1": "CS1", "CS2": "CS2"}
    entries = []
    for strategy in STRATEGIES:
        record = run(dataclasses.replace(base, strategy=strategy),
                     workers=args.workers)
        entries.append((labels[strategy], record.metrics))
        if args.out:
            export(record, f"{args.out}/{strategy}")
    print(compare_strategies(entries))
    return 0


def cmd_validate(args) -> int:
    cfg = _resolve_config(args)
    validate_config(cfg)
    print(f"ok: strategy={cfg.strategy} seed={cfg.seed} "
          f"stations={cfg.fleet.n_stations} evs={cfg.fleet.n_stations * cfg.fleet.evs_per_station}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evfreqsim",
        description="Two-area frequency regulation with an EV fleet")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one scenario and print metrics")
    _add_common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run the scenario once per axis value")
    _add_common(p)
    p.add_argument("--axis", required=True,
                   help="dotted config path, e.g. policy.mu")
    p.add_argument("--values", required=True,
                   help="comma-separated numeric values")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", help="run all three strategies on one scenario")
    _add_common(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("validate", help="validate a scenario without running it")
    _add_common(p)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SimulationDiverged as exc:
        print(f"simulation diverged: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
