# Copyright (C) 2026 dioprim developers
#
# This file is part of dioprim.
#
# SPDX-License-Identifier:    LGPL-3.0-or-later
"""Metric diophantine approximation by primitive points (dioprim).

dioprim enumerates primitive solutions of diophantine inequalities,
counts primitive lattice points and estimates the measures of the
associated strip sets by Monte Carlo.
"""

import importlib.metadata
import logging

# Import default options
from dioprim.options import get_options  # noqa: F401

__version__ = importlib.metadata.version("dioprim")

logger = logging.getLogger("dioprim")
