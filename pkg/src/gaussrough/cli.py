"""Command line entry point.

Every subcommand reads a JSON config (--config), optionally overrides its
seed (--seed), and writes to --out; an output path ending in .json selects
JSON, anything else CSV.  Exit codes: 0 success, 2 configuration error,
3 numerical/data error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from .experiments import (
    ConfigError,
    ExperimentConfig,
    emit,
    load_config,
    run_2var_bound,
    run_convergence,
    run_lift,
    run_martingale_checks,
    run_pvar,
    run_rhovar,
    run_simulate,
    run_translation_check,
    run_uniform_modulus,
)
from .gaussian_process import DataError
from .path_lift import uniform_grid

_RECORD_RUNNERS = {
    "kl-converge": ("convergence", run_convergence),
    "uniform-modulus": ("uniform-modulus", run_uniform_modulus),
    "martingale-check": ("martingale", run_martingale_checks),
    "twovar-bound": ("twovar-bound", run_2var_bound),
    "translate-check": ("translation", run_translation_check),
    "pvar": ("pvar", run_pvar),
    "rhovar": ("rhovar", run_rhovar),
}


def _write_rows(path: str, header: list[str], rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    with open(path, "w") as fh:
        fh.write(buf.getvalue())


def _emit_paths(values: np.ndarray, n: int, out: str) -> None:
    times = uniform_grid(n).times
    rows = (
        [s, c, repr(float(times[t])), repr(float(values[s, c, t]))]
        for s in range(values.shape[0])
        for c in range(values.shape[1])
        for t in range(values.shape[2])
    )
    _write_rows(out, ["sample", "component", "time", "value"], rows)


def _emit_logs(logs: list[np.ndarray], n: int, out: str) -> None:
    times = uniform_grid(n).times

    def rows():
        for k, lv in enumerate(logs, start=1):
            samples, nodes = lv.shape[0], lv.shape[1]
            flat = lv.reshape(samples, nodes, -1)
            d = lv.shape[2]
            idx = [np.unravel_index(c, (d,) * k) for c in range(flat.shape[2])]
            names = ["L%d[%s]" % (k, ",".join(map(str, ix))) for ix in idx]
            for s in range(samples):
                for t in range(nodes):
                    for c, name in enumerate(names):
                        yield [s, repr(float(times[t])), name, repr(float(flat[s, t, c]))]

    _write_rows(out, ["sample", "time", "coordinate", "value"], rows())


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="gaussrough",
        description="Lifted-Gaussian-path experiments; see the README for config schemas.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("simulate", "lift", *_RECORD_RUNNERS):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON config file")
        sp.add_argument("--out", required=True, help="output path (.json for JSON, else CSV)")
        sp.add_argument("--seed", type=int, default=None, help="override the config seed")
    args = parser.parse_args(argv)

    try:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except OSError as err:
            raise ConfigError(f"cannot read config: {err}") from err
        except json.JSONDecodeError as err:
            raise ConfigError(f"config is not valid JSON: {err}") from err

        if args.command == "simulate":
            cfg = load_config("simulate", data, args.seed)
            _emit_paths(run_simulate(cfg), cfg.n, args.out)
        elif args.command == "lift":
            cfg = load_config("lift", data, args.seed)
            _emit_logs(run_lift(cfg), cfg.n, args.out)
        else:
            experiment, runner = _RECORD_RUNNERS[args.command]
            cfg = load_config(experiment, data, args.seed)
            records = runner(cfg)
            fmt = "json" if args.out.endswith(".json") else "csv"
            emit(records, fmt, args.out)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except DataError as err:
        print(f"data error: {err}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
