# Copyright (C) 2026 dioprim developers
#
# This file is part of dioprim.
#
# SPDX-License-Identifier:    LGPL-3.0-or-later
"""Options."""

from __future__ import annotations

import functools
import json
import logging
import os
import os.path
import pprint
import typing
from pathlib import Path

import numpy as np
import numpy.typing as npt

logger = logging.getLogger("dioprim")

OptionValue = int | float | str | bool

COMMANDS = ("sieve", "density", "enumerate", "dichotomy", "measure", "orbit", "fiber")

DIOPRIM_DEFAULT_OPTIONS: dict[str, tuple[type, OptionValue, str, tuple[str, ...] | None]] = {
    "verbosity": (
        int,
        30,
        "logger verbosity, follows standard library levels, i.e. INFO=20, DEBUG=10, etc.",
        None,
    ),
    "command": (str, "", "experiment to run when no command is given on the command line.", None),
    "seed": (int, 0, "root seed; every random stream is derived from it.", None),
    "threads": (int, 1, "number of worker threads.", None),
    "budget": (int, 10**8, "cap on enumerated points and Monte Carlo samples.", None),
    "out": (str, ".", "output directory.", None),
    "m": (int, 1, "number of columns of Theta (length of q).", None),
    "n": (int, 1, "number of rows of Theta (length of p).", None),
    "partition": (str, "", "partition, e.g. 'm=3 n=1 pi={1,2}/{3,4}'; empty is trivial.", None),
    "psi": (str, "", "approximating function, e.g. 'power:c=1,s=1'.", None),
    "theta": (str, "", "Theta, row-major, rows separated by ';'; empty samples it.", None),
    "phi": (str, "", "Phi, row-major, rows separated by ';'; empty is the identity.", None),
    "y": (str, "", "inhomogeneous target; empty is zero (enumerate) or sampled.", None),
    "q_max": (int, 10, "largest sup-norm of q.", None),
    "q_schedule": (str, "100,1000,10000", "increasing list of truncations Q.", None),
    "samples": (int, 100000, "Monte Carlo samples.", None),
    "instances": (int, 50, "number of random instances in a dichotomy run.", None),
    "regime": (str, "divergent", "declared regime of the series.", ("divergent", "convergent")),
    "preset": (
        str,
        "none",
        "dichotomy preset.",
        ("none", "primitive-simultaneous", "paired-linear-form"),
    ),
    "k": (int, 1, "number of pairs for the paired-linear-form preset.", None),
    "unconstrained": (bool, False, "drop the primitivity filter.", None),
    "q": (str, "", "integer vector q, comma-separated.", None),
    "q2": (str, "", "second integer vector q' for pair measures.", None),
    "p": (str, "", "integer vector p, comma-separated.", None),
    "variant": (str, "F", "strip variant.", ("F", "E", "R")),
    "psi_value": (float, 0.1, "value of psi(|q|) for single strips.", None),
    "bins": (int, 16, "histogram bins per torus coordinate.", None),
    "mode": (
        str,
        "strip",
        "measure experiment.",
        ("strip", "pair", "strip-bound", "averaged", "borel-cantelli", "pushforward"),
    ),
    "range_bound": (int, 100, "largest modulus q in the sieve table.", None),
    "beta": (str, "1", "box scale, an exact rational such as 1/2.", None),
    "bound": (int, 1, "sup-norm bound for orbit exploration.", None),
    "word_budget": (int, 10**6, "cap on breadth-first search expansions.", None),
    "d": (int, 2, "dimension for primitive density counts.", None),
    "cond_max": (float, 1e12, "largest accepted condition number of Phi.", None),
}


@functools.cache
def _load_options() -> tuple[dict, dict]:
    """Load options from JSON files."""
    user_config_file = os.getenv("XDG_CONFIG_HOME", default=Path.home().joinpath(".config")) / Path(
        "dioprim", "dioprim_options.json"
    )
    try:
        with open(user_config_file) as f:
            user_options = json.load(f)
    except FileNotFoundError:
        user_options = {}

    pwd_config_file = Path.cwd().joinpath("dioprim_options.json")
    try:
        with open(pwd_config_file) as f:
            pwd_options = json.load(f)
    except FileNotFoundError:
        pwd_options = {}

    return (user_options, pwd_options)


def get_options(
    priority_options: dict[str, OptionValue] | None = None,
) -> dict[str, OptionValue]:
    """Return (a copy of) the merged option values for dioprim.

    Args:
        priority_options: take priority over all other option values (see notes)

    Returns:
        merged option values

    Note:
        This function sets the log level from the merged option values prior to
        returning.

        The `dioprim_options.json` files are cached on the first call. Subsequent
        calls to this function use this cache.

        Priority ordering of options from highest to lowest is:

        -  **priority_options** (API, command line and ``--config`` options)
        -  **$PWD/dioprim_options.json** (local options)
        -  **$XDG_CONFIG_HOME/dioprim/dioprim_options.json** (user options)
        -  **DIOPRIM_DEFAULT_OPTIONS** in `dioprim.options`

        `XDG_CONFIG_HOME` is `~/.config/` if the environment variable is not set.

        Example `dioprim_options.json` file:

          { "threads": 4 }

    """
    options: dict[str, OptionValue] = {}

    for opt, (_, value, _, _) in DIOPRIM_DEFAULT_OPTIONS.items():
        options[opt] = value

    # NOTE: _load_options uses functools.cache
    user_options, pwd_options = _load_options()

    options.update(user_options)
    options.update(pwd_options)
    if priority_options is not None:
        options.update(priority_options)

    logger.setLevel(int(options["verbosity"]))
    logger.info("Final option values")
    logger.info(pprint.pformat(options))

    return options


def _convert(name: str, text: str) -> OptionValue:
    try:
        kind, _, _, choices = DIOPRIM_DEFAULT_OPTIONS[name]
    except KeyError:
        raise KeyError(f"Unknown option {name!r}") from None
    value: OptionValue
    if kind is bool:
        if text.lower() not in ("true", "false"):
            raise ValueError(f"Option {name!r} expects true or false, got {text!r}")
        value = text.lower() == "true"
    elif kind is str:
        value = text
    else:
        try:
            value = kind(text)
        except ValueError as e:
            raise ValueError(f"Option {name!r} expects {kind.__name__}, got {text!r}") from e
    if choices is not None and value not in choices:
        raise ValueError(f"Option {name!r} must be one of {choices}, got {value!r}")
    return value


def parse_config(text: str) -> dict[str, OptionValue]:
    """Parse ``key=value`` lines into typed option values.

    Blank lines and lines starting with ``#`` are ignored. Only the first
    ``=`` separates key and value, so values may contain ``=``.
    """
    options: dict[str, OptionValue] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"Line {lineno}: expected key=value, got {line!r}")
        options[key.strip()] = _convert(key.strip(), value.strip())
    return options


def read_config(path: str | os.PathLike) -> dict[str, OptionValue]:
    """Read a ``key=value`` configuration file."""
    with open(path) as f:
        return parse_config(f.read())


def _format_value(value: OptionValue) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_config(options: dict[str, OptionValue]) -> str:
    """Render options as sorted ``key=value`` lines understood by ``parse_config``."""
    lines = [
        f"{key}={_format_value(options[key])}"
        for key in sorted(options)
        if key in DIOPRIM_DEFAULT_OPTIONS
    ]
    return "\n".join(lines) + "\n"


def parse_vector(text: str, dtype: npt.DTypeLike = np.float64) -> npt.NDArray:
    """Parse a comma-separated vector."""
    try:
        return np.array([dtype(x.strip()) for x in text.split(",")], dtype=dtype)  # type: ignore
    except ValueError as e:
        raise ValueError(f"Malformed vector {text!r}") from e


def parse_matrix(text: str, rows: int, cols: int) -> npt.NDArray[np.float64]:
    """Parse a row-major matrix with rows separated by ``;``."""
    data = [parse_vector(row) for row in text.split(";")]
    if len(data) != rows or any(len(r) != cols for r in data):
        raise ValueError(f"Matrix {text!r} is not {rows}x{cols}")
    return np.array(data, dtype=np.float64)


def format_vector(v: typing.Iterable[OptionValue]) -> str:
    """Inverse of ``parse_vector``."""
    return ",".join(_format_value(x.item() if isinstance(x, np.generic) else x) for x in v)


def format_matrix(A: npt.NDArray[np.float64]) -> str:
    """Inverse of ``parse_matrix``."""
    return ";".join(format_vector(row) for row in A)


def check_options(options: dict[str, OptionValue]) -> None:
    """Refuse option values outside their meaningful range.

    Raises:
        ValueError: on a non-positive thread count or budget, or a
            cond_max below 1.
    """
    for name in ("threads", "budget"):
        if int(options[name]) < 1:
            raise ValueError(f"Option {name!r} must be positive, got {options[name]!r}")
    if not float(options["cond_max"]) >= 1:
        raise ValueError(f"cond_max must be at least 1, got {options['cond_max']!r}")
