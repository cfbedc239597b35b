"""Command-line experiment runner.

Two subcommands:

* ``run``   — execute one experiment config and write line-delimited trial
              records (plus an optional CSV summary).
* ``sweep`` — rerun a config while varying one key over a list of values,
              one output file per value plus a combined summary CSV.

Exit code 0 means every trial executed; statistical failures are data in
the output, not process failures. CROWDPAC_PARALLELISM controls how many
worker processes run trials.
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import CrowdPacError
from .harness import (
    aggregate_trials,
    config_from_mapping,
    load_config,
    run_experiment,
    write_summary_csv,
    write_trials,
)


def _run_command(args) -> int:
    overrides = {}
    if args.seed is not None:
        overrides["experiment.seed"] = str(args.seed)
    if args.trials is not None:
        overrides["experiment.trials"] = str(args.trials)
    config = load_config(args.config, overrides)
    results = run_experiment(config)
    write_trials(args.out, config, results)
    if args.summary_csv:
        write_summary_csv(args.summary_csv, config,
                          aggregate_trials(results, eps=config.eps))
    n_errors = sum(1 for t in results if t.status != "ok")
    print(f"wrote {len(results)} trials to {args.out}"
          + (f" ({n_errors} with captured errors)" if n_errors else ""))
    return 0


def _sweep_command(args) -> int:
    key, _, value_text = args.vary.partition("=")
    key = key.strip()
    values = [v.strip() for v in value_text.split(",") if v.strip()]
    if not key or not values:
        print("sweep: --vary must look like section.key=v1,v2,...", file=sys.stderr)
        return 2
    base = load_config(args.config)
    mapping = dict(base.raw)
    if args.seed is not None:
        mapping["experiment.seed"] = str(args.seed)
    if args.trials is not None:
        mapping["experiment.trials"] = str(args.trials)
    os.makedirs(args.out, exist_ok=True)
    summary_lines = ["value,config_hash,n_trials,n_ok,mean_err,success_rate,"
                     "mean_cost_per_label,max_load,total_golden,exact_recovery_rate"]
    for value in values:
        arm = dict(mapping)
        arm[key] = value
        config = config_from_mapping(arm)
        results = run_experiment(config)
        stem = f"{key.replace('.', '_')}_{value.replace('.', 'p')}"
        write_trials(os.path.join(args.out, stem + ".out"), config, results)
        summary = aggregate_trials(results, eps=config.eps)
        cells = [value, config.config_hash, summary.n_trials, summary.n_ok,
                 summary.mean_err, summary.success_rate,
                 summary.mean_cost_per_label, summary.max_load,
                 summary.total_golden, summary.exact_recovery_rate]
        summary_lines.append(",".join(
            "-" if c is None else (format(c, ".12g") if isinstance(c, float) else str(c))
            for c in cells))
        print(f"{key}={value}: {summary.n_ok}/{summary.n_trials} ok, "
              f"success_rate={summary.success_rate:.3f}")
    summary_path = os.path.join(args.out, "sweep_summary.csv")
    with open(summary_path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(summary_lines) + "\n")
    print(f"wrote sweep summary to {summary_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crowdpac",
        description="Run crowd-labeling learning experiments from a config file.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one experiment config")
    run_p.add_argument("--config", required=True, help="path to the INI config")
    run_p.add_argument("--seed", type=int, default=None, help="master seed override")
    run_p.add_argument("--trials", type=int, default=None, help="trial count override")
    run_p.add_argument("--out", required=True, help="output path for trial records")
    run_p.add_argument("--summary-csv", default=None,
                       help="also write an aggregate CSV summary here")
    run_p.set_defaults(func=_run_command)

    sweep_p = sub.add_parser("sweep", help="run a config across values of one key")
    sweep_p.add_argument("--config", required=True)
    sweep_p.add_argument("--vary", required=True,
                         help="key and values, e.g. experiment.eps=0.1,0.05,0.02")
    sweep_p.add_argument("--out", required=True, help="output directory")
    sweep_p.add_argument("--seed", type=int, default=None)
    sweep_p.add_argument("--trials", type=int, default=None)
    sweep_p.set_defaults(func=_sweep_command)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CrowdPacError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
