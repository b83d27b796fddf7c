# Copyright (C) 2026 dioprim developers
#
# This file is part of dioprim.
#
# SPDX-License-Identifier:    LGPL-3.0-or-later
"""Output formatting.

Every experiment writes plain-text results into its output directory:

- one CSV file per table, LF line endings, floats in shortest round-trip form
- ``manifest.txt``, the resolved configuration in ``key=value`` form,
  preceded by a single ``#`` comment carrying a timestamp
- ``plot_growth.py``, a stand-alone plotting script, for dichotomy runs

The manifest can be fed back with ``--config`` to replay a run.
"""

from __future__ import annotations

import csv
import datetime
import io
import logging
import os
import typing

from dioprim.options import OptionValue, format_config

logger = logging.getLogger("dioprim")

MANIFEST = "manifest.txt"

Cell = int | float | str | bool


class Table(typing.NamedTuple):
    """A CSV table."""

    filename: str
    header: tuple[str, ...]
    rows: list[tuple[Cell, ...]]


def _format_cell(value: Cell) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_table(table: Table) -> str:
    """Render a table as CSV text."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.header)
    for row in table.rows:
        if len(row) != len(table.header):
            raise ValueError(
                f"Row {row} of {table.filename} has {len(row)} cells, expected {len(table.header)}"
            )
        writer.writerow([_format_cell(v) for v in row])
    return buffer.getvalue()


def format_manifest(options: dict[str, OptionValue], timestamp: str | None = None) -> str:
    """Render the manifest of a run."""
    if timestamp is None:
        timestamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    return f"# dioprim run {timestamp}\n" + format_config(options)


def write_results(
    tables: typing.Sequence[Table],
    options: dict[str, OptionValue],
    output_dir: str,
    extra_files: dict[str, str] | None = None,
) -> list[str]:
    """Write the manifest, then every table and extra file.

    Returns:
        paths of the written files, manifest first
    """
    logger.info(79 * "*")
    logger.info(f"Writing results to {output_dir}")
    logger.info(79 * "*")

    os.makedirs(output_dir, exist_ok=True)
    written = [_write_file(format_manifest(options), MANIFEST, output_dir)]
    for table in tables:
        written.append(_write_file(format_table(table), table.filename, output_dir))
    for filename, text in (extra_files or {}).items():
        written.append(_write_file(text, filename, output_dir))
    return written


def _write_file(output: str, filename: str, output_dir: str) -> str:
    """Write text to file with LF line endings."""
    path = os.path.join(output_dir, filename)
    with open(path, "w", newline="\n") as f:
        f.write(output)
    logger.debug(f"Wrote {path}")
    return path


_PLOT_TEMPLATE = '''\
"""Plot primitive solution counts against the truncated series.

Generated by dioprim {version}. Needs matplotlib.
"""

import csv
import collections

import matplotlib.pyplot as plt

curves = collections.defaultdict(list)
with open("{growth}") as f:
    for row in csv.DictReader(f):
        curves[int(row["instance"])].append((int(row["Q"]), int(row["N"]), float(row["S"])))

fig, (ax_n, ax_r) = plt.subplots(1, 2, figsize=(10, 4))
for points in curves.values():
    Q, N, S = zip(*points)
    ax_n.loglog(Q, [max(x, 0.5) for x in N], color="tab:blue", alpha=0.3)
    ax_r.semilogx(Q, [x / s for x, s in zip(N, S)], color="tab:orange", alpha=0.3)
ax_n.set_xlabel("Q")
ax_n.set_ylabel("N(Q)")
ax_r.set_xlabel("Q")
ax_r.set_ylabel("N(Q) / S(Q)")
fig.tight_layout()
fig.savefig("growth.png", dpi=150)
'''


def format_plot_script(growth_csv: str, version: str) -> str:
    """Plotting script for a growth table."""
    return _PLOT_TEMPLATE.format(growth=growth_csv, version=version)
