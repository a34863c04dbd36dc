"""``ecsvc`` command line: run, sweep, attack and demo.

Exit codes: 0 ok, 2 configuration error, 3 protocol abort (or an accepted
attack), 4 stalled simulation.
"""

from __future__ import annotations

import argparse
import sys

from . import experiments as X
from .errors import ConfigError
from .sim.scenario import load_scenario


def _write(path, text):
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from None


def cmd_run(config_path, out_path, trace_path=None, alerts_path=None) -> int:
    sc = load_scenario(config_path)
    row, res = X.run_scenario(sc)
    _write(out_path, X.rows_csv([row]))
    if res is not None:
        if trace_path:
            _write(trace_path, res.trace_csv())
        if alerts_path:
            _write(alerts_path, res.alerts_csv())
    return X.exit_code(row.status)


def cmd_sweep(spec_path, out_path, jobs: int = 1) -> int:
    spec = X.load_sweep(spec_path)
    rows = X.run_sweep(spec, jobs)
    _write(out_path, X.rows_csv(rows))
    return max((X.exit_code(r.status) for r in rows), default=0)


def cmd_attack(kind, config_path, out_path, dump_path=None) -> int:
    if kind not in ("replay", "tamper", "curious-sa"):
        raise ConfigError(f"unknown attack kind {kind!r}")
    sc = load_scenario(config_path)
    if kind == "curious-sa":
        row = X.curious_sa_row("attack", sc, dump_path)
    else:
        row = X.attack_row("attack", sc, kind)
    _write(out_path, X.rows_csv([row]))
    return X.exit_code(row.status)


def cmd_demo(out_path=None) -> int:
    text = X.demo_text()
    sys.stdout.write(text)
    if out_path:
        _write(out_path, text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ecsvc", description="EABEHP key-exchange experiments on a simulated CAN-FD bus")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate one scenario")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="result CSV")
    p.add_argument("--trace", help="optional event trace CSV")
    p.add_argument("--alerts", help="optional alert log CSV")

    p = sub.add_parser("sweep", help="vary one parameter over a list of values")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("attack", help="replay, tamper or honest-but-curious SA analysis")
    p.add_argument("--kind", required=True, choices=("replay", "tamper", "curious-sa"))
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dump", help="curious-sa: write the first run's SA view as hex")

    p = sub.add_parser("demo", help="print the worked tiny-group pipeline")
    p.add_argument("--out")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args.config, args.out, args.trace, args.alerts)
        if args.command == "sweep":
            if args.jobs < 1:
                raise ConfigError("--jobs must be at least 1")
            return cmd_sweep(args.spec, args.out, args.jobs)
        if args.command == "attack":
            return cmd_attack(args.kind, args.config, args.out, args.dump)
        return cmd_demo(args.out)
    except ConfigError as exc:
        print(f"ecsvc: configuration error: {exc}", file=sys.stderr)
        return X.EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
