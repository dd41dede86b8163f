"""Command line entry point: ``esfr-split <study> --config PATH --out DIR``."""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from esfr_split.harness import (
    STUDIES,
    ConfigError,
    ExperimentConfig,
    run_energy_study,
    run_ooa_study,
    run_sbp_check,
    write_energy_study,
    write_ooa_study,
    write_sbp_check,
)

logger = logging.getLogger("esfr_split")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="esfr-split",
        description="Energy, convergence and operator studies for split-form ESFR schemes.",
    )
    parser.add_argument("study", choices=STUDIES)
    parser.add_argument("--config", required=True, type=Path,
                        help="flat key = value configuration file")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override a configuration key")
    parser.add_argument("--out", required=True, type=Path, help="output directory")
    parser.add_argument("-q", "--quiet", action="store_true", help="only report errors")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(message)s",
    )

    try:
        cfg = ExperimentConfig.from_file(args.study, args.config, args.overrides)
    except ConfigError as exc:
        logger.error("%s", exc)
        return 2

    try:
        if cfg.study == "energy":
            result = run_energy_study(cfg)
            write_energy_study(result, cfg, args.out)
            for row in result.summary:
                print(",".join(row.as_csv()))
        elif cfg.study == "ooa":
            write_ooa_study(run_ooa_study(cfg), cfg, args.out)
        else:
            write_sbp_check(run_sbp_check(cfg), args.out)
    except OSError as exc:
        logger.error("cannot write results to %s: %s", args.out, exc)
        return 3

    logger.info("results written to %s", args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
