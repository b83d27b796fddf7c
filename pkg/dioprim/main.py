# Copyright (C) 2026 dioprim developers
#
# This file is part of dioprim.
#
# SPDX-License-Identifier:    LGPL-3.0-or-later
"""Command-line interface to dioprim.

Parse command-line arguments and configuration files, run an experiment
and write its tables, manifest and scripts to the output directory.

Exit codes: 0 on success, 2 on configuration or validation errors, 3
when an oracle check disagrees and 4 when a resource budget is exceeded.
"""

import argparse
import cProfile
import logging
from collections.abc import Sequence

from dioprim import __version__ as DIOPRIM_VERSION
from dioprim import experiments, formatting
from dioprim.arith import BudgetExceededError
from dioprim.options import (
    COMMANDS,
    DIOPRIM_DEFAULT_OPTIONS,
    check_options,
    get_options,
    read_config,
)

logger = logging.getLogger("dioprim")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MISMATCH = 3
EXIT_BUDGET = 4

parser = argparse.ArgumentParser(
    description="Metric diophantine approximation by primitive points (dioprim)"
)
parser.add_argument(
    "--version", action="version", version=f"%(prog)s (version {DIOPRIM_VERSION})"
)
parser.add_argument("--config", type=str, help="key=value configuration file, e.g. a manifest")
parser.add_argument("-p", "--profile", action="store_true", help="enable profiling")

# Add all options from dioprim option system
for opt_name, (arg_type, opt_val, opt_desc, choices) in DIOPRIM_DEFAULT_OPTIONS.items():
    if isinstance(opt_val, bool):
        parser.add_argument(
            f"--{opt_name}",
            action="store_true",
            default=None,
            help=f"{opt_desc} (default={opt_val})",
        )
    else:
        parser.add_argument(
            f"--{opt_name}", type=arg_type, choices=choices, help=f"{opt_desc} (default={opt_val})"
        )

parser.add_argument(
    "experiment", nargs="?", choices=COMMANDS, help="experiment to run (default: from --config)"
)


def _resolve(xargs: argparse.Namespace) -> dict:
    """Options from defaults, JSON files, --config and flags, in rising priority."""
    priority_options = {}
    if xargs.config is not None:
        priority_options.update(read_config(xargs.config))
    priority_options.update(
        {k: v for k, v in vars(xargs).items() if v is not None and k in DIOPRIM_DEFAULT_OPTIONS}
    )
    if xargs.experiment is not None:
        priority_options["command"] = xargs.experiment
    options = get_options(priority_options)
    check_options(options)
    if options["command"] not in COMMANDS:
        raise ValueError(f"No experiment given; choose one of {COMMANDS}")
    return options


def run(options: dict) -> int:
    """Run the experiment named by ``options["command"]`` and write its results."""
    result = experiments.run_experiment(str(options["command"]), options)
    formatting.write_results(result.tables, options, str(options["out"]), result.extra_files)
    return EXIT_MISMATCH if result.mismatches else EXIT_OK


def main(args: Sequence[str] | None = None) -> int:
    """Run dioprim from the command line."""
    logging.captureWarnings(capture=True)

    xargs = parser.parse_args(args)

    # Turn on profiling
    if xargs.profile:
        pr = cProfile.Profile()
        pr.enable()

    try:
        options = _resolve(xargs)
        status = run(options)
    except (ValueError, KeyError, TypeError, FileNotFoundError) as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except (BudgetExceededError, OverflowError) as e:
        logger.error(f"Resource limit: {e}")
        return EXIT_BUDGET
    except RuntimeError as e:
        logger.error(f"Check failed: {e}")
        return EXIT_MISMATCH
    finally:
        # Turn off profiling and write status to file
        if xargs.profile:
            pr.disable()
            pr.dump_stats("dioprim.profile")

    return status
