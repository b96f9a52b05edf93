"""``charbound corollary1|propk|homgrowth --config <path> [--seed N] [--out <csv>] [--svg <svg>]``

Exit codes: 0 success, 2 configuration error, 3 a soundness contract failed
during the run.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

from . import lab

EXIT_OK, EXIT_CONFIG, EXIT_SOUNDNESS = 0, 2, 3


def _epilog(experiment: str) -> str:
    return (
        "CSV columns (in order): " + ", ".join(lab.columns(experiment)) + ".\n"
        "Floats carry 12 significant digits, booleans are 0/1, absent values are empty.\n"
        "Any config key may also be given as --<key> <value>; flags override the file."
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="charbound", description="Desk-scale character-map norm experiments.")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for exp in lab.EXPERIMENTS:
        sp = sub.add_parser(exp, epilog=_epilog(exp), formatter_class=argparse.RawDescriptionHelpFormatter)
        sp.add_argument("--config", help="flat key = value config file")
        sp.add_argument("-v", "--verbose", action="store_true")
        for f in dataclasses.fields(lab.SweepConfig):
            if f.name == "experiment":
                continue
            sp.add_argument(f"--{f.name}", dest=f.name, default=None, metavar=f.name.upper())
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        overrides = {
            f.name: lab.parse_value(f.name, getattr(args, f.name))
            for f in dataclasses.fields(lab.SweepConfig)
            if f.name != "experiment" and getattr(args, f.name) is not None
        }
        declared = {}
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                declared = lab.parse_config(fh.read())
        if declared.get("experiment", args.experiment) != args.experiment:
            raise lab.ConfigError(f"config declares experiment {declared['experiment']!r}, command is {args.experiment!r}")
        cfg = lab.load_config(args.config, experiment=args.experiment, **overrides)
    except (lab.ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    records = lab.run(cfg)
    text = lab.to_csv(records, cfg.experiment)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if cfg.svg:
        lab.write_svg(records, cfg.experiment, cfg.svg)

    fit = lab.summarize(records, cfg.experiment)
    if fit is not None:
        x, y = lab.CHART_AXES[cfg.experiment]
        print(f"fit log2({y}) ~ {fit.slope:.4f} * {x} + {fit.intercept:.4f}  (r2 = {fit.r2:.4f})", file=sys.stderr)
    total = sum(r.wall_time for r in records)
    print(f"{len(records)} records, {total:.2f} s of grid-point time", file=sys.stderr)

    bad = [(i, v) for i, r in enumerate(records) for v in r.violations]
    for i, v in bad:
        print(f"soundness violation in record {i}: {v}", file=sys.stderr)
    return EXIT_SOUNDNESS if bad else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
